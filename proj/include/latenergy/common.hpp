#pragma once
// ============================================================================
// common.hpp -- shared error types, summation options, deterministic RNG
// ============================================================================

#include <cstdint>
#include <stdexcept>
#include <string>

namespace laten {

// ----------------------------------------------------------------------------
// Error taxonomy.  Validation errors derive from std::invalid_argument,
// numerical/resource errors from std::runtime_error; the CLI maps the former
// to exit code 1 and the latter to exit code 2.
// ----------------------------------------------------------------------------

struct SingularBasisError : std::invalid_argument {
  explicit SingularBasisError(const std::string& what)
      : std::invalid_argument(what) {}
};

struct NotSummableError : std::invalid_argument {
  explicit NotSummableError(const std::string& what)
      : std::invalid_argument(what) {}
};

struct SignError : std::invalid_argument {
  explicit SignError(const std::string& what) : std::invalid_argument(what) {}
};

struct NoAdmissibleSeedError : std::invalid_argument {
  explicit NoAdmissibleSeedError(const std::string& what)
      : std::invalid_argument(what) {}
};

struct CutoffTooLargeError : std::runtime_error {
  explicit CutoffTooLargeError(const std::string& what)
      : std::runtime_error(what) {}
};

struct BudgetExceededError : std::runtime_error {
  explicit BudgetExceededError(const std::string& what)
      : std::runtime_error(what) {}
};

struct NotConvergedError : std::runtime_error {
  explicit NotConvergedError(const std::string& what)
      : std::runtime_error(what) {}
};

struct DegenerateTangentError : std::runtime_error {
  explicit DegenerateTangentError(const std::string& what)
      : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// ----------------------------------------------------------------------------
// Summation options shared by every truncated lattice sum.  `tol` is the
// target bound on the truncation error (absolute, in the units of the sum
// being computed); `budget` caps the number of lattice vectors enumerated by
// a single sum before BudgetExceededError is thrown.
// ----------------------------------------------------------------------------
struct SumOptions {
  double tol = 1e-10;
  long long budget = 10'000'000;
};

// ----------------------------------------------------------------------------
// Counter-based deterministic RNG (SplitMix64).  Streams are derived from a
// (master seed, stream id) pair, so any grid point / probe batch can create
// its own generator independent of thread scheduling.  Reproducibility of
// every randomized result follows from deriving stream ids from loop indices
// rather than from shared mutable state.
// ----------------------------------------------------------------------------
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

 private:
  std::uint64_t state_;
};

// Mix a master seed with one or more stream indices into a stream seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  SplitMix64 m(master ^ 0x6a09e667f3bcc908ULL);
  std::uint64_t s = m.next_u64();
  s ^= a + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
  SplitMix64 m2(s);
  s = m2.next_u64();
  s ^= b + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
  SplitMix64 m3(s);
  s = m3.next_u64();
  s ^= c + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
  SplitMix64 m4(s);
  return m4.next_u64();
}

inline constexpr const char* kVersion = "0.1.0";

}  // namespace laten
