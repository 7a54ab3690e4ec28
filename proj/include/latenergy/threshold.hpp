#pragma once
// ============================================================================
// threshold.hpp -- optimality thresholds for a reference lattice under a
// Lennard-Jones-type potential
//
// With f(r2) = a r2^(-p) - b r2^(-q) and a unit-bond family member L,
//   E_f[lambda L] = a lambda^(-2p) zeta_L(2p) - b lambda^(-2q) zeta_L(2q),
// so a reference lattice that minimizes (resp. maximizes) zeta over the
// family is energy-optimal exactly for
//   lambda <= lambda_0 = inf_L ( a D_p / (b D_q) )^(1/(2(p-q))),
//       D_s = zeta_L(s') - zeta_ref(s')   (reference = family minimizer)
//   lambda >= lambda_1 = sup_L ( a D'_p / (b D'_q) )^(1/(2(p-q))),
//       D'_s = zeta_ref(s') - zeta_L(s')  (reference = family maximizer).
// The extremum can be attained in the interior or only as a limit at the
// punctured reference point; both are searched (grid + local refinement, and
// cubic Richardson extrapolation toward the puncture).
// ============================================================================

#include <array>

#include "latenergy/family.hpp"
#include "latenergy/potential.hpp"

namespace laten {

enum class ThresholdMode {
  Lambda0,  // reference must be the family zeta-minimizer
  Lambda1,  // reference must be the family zeta-maximizer
};

// Search domain is implied by the reference:
//   SC2, A2        -> 2D unit-bond family t in [pi/3, pi/2]
//   SC3            -> full admissible 3D family
//   D3, D3star     -> the eight-bond surface sum(x) = -1
struct ThresholdQuery {
  ThresholdMode mode = ThresholdMode::Lambda0;
  CanonicalLattice reference = CanonicalLattice::SC2;
  LennardJones pot{};
  double tol = 1e-6;  // target half-width of the lambda bracket
};

struct ThresholdResult {
  double lambda_star = 0.0;
  Eigen::VectorXd argmin;  // family parameters of the extremizer: [t] or x
  bool attained_at_reference = false;  // extremum is a puncture limit
  std::array<double, 2> bracket{0.0, 0.0};
};

// Throws SignError when the sampled ratio signs show the reference is not
// the required family extremum; std::invalid_argument for unsupported
// (reference, potential) combinations; NotConvergedError if refinement
// stalls.
ThresholdResult solve_threshold(const ThresholdQuery& query,
                                const SumOptions& opts = {});

// Coefficient scaling: thresholds for (a', b') follow from (a, b) at equal
// exponents via lambda' = lambda * (a' b / (a b'))^(1/(2(p-q))).
double threshold_scaling(double lambda_star, const LennardJones& from,
                         const LennardJones& to);

}  // namespace laten
