#pragma once
// ============================================================================
// potential.hpp -- interaction potentials and lattice sums
//
// Supported potentials act on squared distance r2:
//   Gaussian(alpha):      f(r2) = exp(-pi * alpha * r2),          alpha > 0
//   InversePower(s):      f(r2) = r2^(-s/2),                      s > d
//   LennardJones(p,q,a,b) f(r2) = a * r2^(-p) - b * r2^(-q),      p > q > d/2
//
// Lattice sums over L \ {0}:
//   theta(L, alpha)   = 1 + sum exp(-pi alpha Q(m))   (origin included)
//   epstein_zeta(L,s) = sum Q(m)^(-s/2)
//   energy(L, f)      = sum f(Q(m))
//
// Every sum returns the value together with a rigorous bound on the
// truncation error and the enumeration radius used.
// ============================================================================

#include <variant>

#include "latenergy/lattice.hpp"

namespace laten {

struct Gaussian {
  double alpha = 1.0;
};

struct InversePower {
  double s = 4.0;
};

struct LennardJones {
  double p = 6.0;
  double q = 3.0;
  double a = 1.0;
  double b = 2.0;
};

using PotentialSpec = std::variant<Gaussian, InversePower, LennardJones>;

// Throws NotSummableError unless the potential's sums converge in dimension d
// (alpha > 0; s > d; p > q > d/2).
void validate_potential(const PotentialSpec& pot, int dim);

struct EnergyResult {
  double value = 0.0;
  double tail_bound = 0.0;  // rigorous bound on the dropped tail
  double r2_cutoff = 0.0;   // squared-length enumeration radius used
};

// Theta function theta_L(alpha) = sum_{m in L} exp(-pi alpha |m|^2), origin
// term included.  Direct summation; the cutoff is grown until the tail bound
// drops below opts.tol.
EnergyResult theta(const Lattice& L, double alpha, const SumOptions& opts = {});

// Epstein zeta zeta_L(s) = sum_{m != 0} |m|^(-s), s > d.  Evaluated through
// the modular split
//   pi^(-s/2) Gamma(s/2) zeta_L(s)
//     = sum' g(s/2, pi Q(m)) + (1/V) sum' g((d-s)/2, pi Q*(n))
//       + 2/(V (s-d)) - 2/s
// with g(a,x) = Gamma(a,x) x^(-a), V the covolume and Q* the dual form; both
// sums converge superexponentially, so the cutoff stays small even for s
// close to d.
EnergyResult epstein_zeta(const Lattice& L, double s,
                          const SumOptions& opts = {});

// Serial reference path: direct shell summation with the algebraic tail bound
//   tail <= beta * s/(s-d) * R^(d-s).
// Kept for cross-checking the modular-split path; practical only when the
// requested tolerance is reachable for the given s - d gap within budget.
EnergyResult epstein_zeta_direct(const Lattice& L, double s,
                                 const SumOptions& opts = {});

// Energy per point E_f[L] = sum_{m != 0} f(Q(m)).
EnergyResult energy(const Lattice& L, const PotentialSpec& pot,
                    const SumOptions& opts = {});

// ----------------------------------------------------------------------------
// Helpers shared by the truncation logic (exposed for tests).
// ----------------------------------------------------------------------------

// Upper bound on #{m != 0 : Q(m) <= x}:  vol_d * (sqrt(x/mu) + sqrt(d)/2)^d,
// mu = smallest Gram eigenvalue.
double count_bound(int dim, double mu_min, double x);

// Rigorous bound on sum_{Q(m) > R2} Q(m)^k exp(-c Q(m)) for integer k >= 0,
// via the counting bound above (used by theta, gradients and Hessians).
double exp_tail_bound(int dim, double mu_min, double c, double R2, int k = 0);

// Rigorous bound on sum_{Q(m) > R2} Q(m)^(-s/2), s > d.
double power_tail_bound(int dim, double mu_min, double s, double R2);

}  // namespace laten
