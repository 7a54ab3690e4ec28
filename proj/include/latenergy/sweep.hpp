#pragma once
// ============================================================================
// sweep.hpp -- energy minimization over the unit-bond families, phase
// classification, phase-boundary location, global optimum over scale
// ============================================================================

#include <string>

#include "latenergy/family.hpp"
#include "latenergy/potential.hpp"

namespace laten {

enum class PhaseLabel {
  Square,
  Triangular,
  Rhombic2D,
  SC,
  BCC,
  FCC,
  Rhombic3D,
};

const char* phase_name(PhaseLabel label);

// Classification: 2D by the angle (|t - pi/2| and |t - pi/3| within 1e-6),
// 3D by the shell signature (relative squared lengths and counts of the
// first three shells) of the minimizing lattice.
PhaseLabel classify_2d(const FamilyPoint2D& p, double tol = 1e-6);
PhaseLabel classify_3d(const Eigen::Vector3d& x, double tol = 1e-6,
                       const SumOptions& opts = {});

struct PhasePoint {
  double lambda = 1.0;
  Eigen::VectorXd parameter;  // [t] in 2D, gram coords x in 3D
  PhaseLabel label = PhaseLabel::Square;
  double energy = 0.0;
};

struct MinimizeOptions {
  int grid_points = 512;     // 2D pre-scan resolution
  int multistart = 5;        // refined starts kept from the 2D pre-scan
  int random_seeds_3d = 200; // random admissible seeds in 3D
  std::uint64_t seed = 0;    // master seed for the random starts
  double grad_tol = 1e-10;   // stationarity threshold for descent
  int max_iterations = 10000;
};

// Minimize E_f[lambda L] over the family at fixed lambda.  3D descent runs in
// the off-diagonal Gram coordinates (projected onto sum(x) = -1 when
// `eight_bond_surface` is set); inadmissible steps are halved up to 20 times.
PhasePoint minimize_over_family_2d(double lambda, const PotentialSpec& pot,
                                   const MinimizeOptions& mopts = {},
                                   const SumOptions& opts = {});
PhasePoint minimize_over_family_3d(double lambda, const PotentialSpec& pot,
                                   bool eight_bond_surface = false,
                                   const MinimizeOptions& mopts = {},
                                   const SumOptions& opts = {});

// Gradient of the family energy with respect to the family parameters,
// computed term-by-term from f' (truncated with a rigorous tail bound).
// 2D: d/dt; 3D: d/dx over the Gram coordinates.
Eigen::VectorXd family_energy_gradient_2d(const FamilyPoint2D& p,
                                          double lambda,
                                          const PotentialSpec& pot,
                                          const SumOptions& opts = {});
Eigen::VectorXd family_energy_gradient_3d(const Eigen::Vector3d& x,
                                          double lambda,
                                          const PotentialSpec& pot,
                                          const SumOptions& opts = {});

// Family energy at a point (homogeneity-reduced: zeta/theta of the unit-bond
// lattice evaluated once, then rescaled).
double family_energy_2d(const FamilyPoint2D& p, double lambda,
                        const PotentialSpec& pot, const SumOptions& opts = {});
double family_energy_3d(const Eigen::Vector3d& x, double lambda,
                        const PotentialSpec& pot, const SumOptions& opts = {});

// ----------------------------------------------------------------------------
// Sweeps over a lambda grid.
// ----------------------------------------------------------------------------
struct LambdaGrid {
  double start = 0.6;
  double stop = 1.2;
  double step = 0.005;
  std::vector<double> values() const;
};

// threads = 0 picks the available hardware parallelism (the LATTICE_THREADS
// environment variable overrides it); every grid point is computed
// self-contained, so results are byte-identical for any thread count.
std::vector<PhasePoint> sweep_2d(const LambdaGrid& grid,
                                 const PotentialSpec& pot, int threads = 0,
                                 const MinimizeOptions& mopts = {},
                                 const SumOptions& opts = {});
std::vector<PhasePoint> sweep_3d(const LambdaGrid& grid,
                                 const PotentialSpec& pot, int threads = 0,
                                 const MinimizeOptions& mopts = {},
                                 const SumOptions& opts = {});

struct Transition {
  PhaseLabel from = PhaseLabel::Square;
  PhaseLabel to = PhaseLabel::Square;
  double lambda_star = 0.0;
  std::array<double, 2> bracket{0.0, 0.0};
};

struct TransitionReport {
  std::vector<Transition> transitions;
  bool monotone_phases = true;  // false if a label recurs after closing
};

// Scan a sweep for label changes and bisect each boundary down to
// bracket_tol.
TransitionReport find_transitions(const std::vector<PhasePoint>& sweep,
                                  int dim, const PotentialSpec& pot,
                                  double bracket_tol = 1e-4,
                                  const MinimizeOptions& mopts = {},
                                  const SumOptions& opts = {});

struct GlobalOptimum {
  double lambda_opt = 0.0;
  PhasePoint at;  // family minimizer at lambda_opt
};

// Minimize over (lambda, family) jointly: golden-section over lambda of the
// family-minimized energy, warm-started from a coarse scan.
GlobalOptimum global_optimum(int dim, double lambda_lo, double lambda_hi,
                             const PotentialSpec& pot,
                             const MinimizeOptions& mopts = {},
                             const SumOptions& opts = {});

// Number of worker threads the sweep drivers will use for `threads = 0`.
int resolve_threads(int threads);

}  // namespace laten
