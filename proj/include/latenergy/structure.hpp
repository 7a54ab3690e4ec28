#pragma once
// ============================================================================
// structure.hpp -- shell moments, eutaxy, criticality, constrained convexity
// ============================================================================

#include <optional>

#include "latenergy/potential.hpp"

namespace laten {

// ----------------------------------------------------------------------------
// Second moment of a shell, kept in both coordinate systems:
//   W_int  = sum_{m in shell} m m^T          (integer coordinates)
//   V_real = sum_{p in shell} p p^T = B^T W_int B   (real coordinates)
// The shell is proportional-to-inverse-Gram when rho * W_int == A^{-1} for
// some rho > 0 -- equivalently V_real is a multiple of the identity.  `rho`
// is set when the least-squares fit leaves a relative residual <= prop_tol.
// ----------------------------------------------------------------------------
struct ShellMoment {
  int shell_index = 0;  // 1-based
  double r2 = 0.0;
  int count = 0;
  Eigen::MatrixXd W_int;
  Eigen::MatrixXd V_real;
  std::optional<double> rho;
  double deviation = 0.0;  // relative residual of the proportionality fit
};

std::vector<ShellMoment> shell_moments(const Lattice& L, int n_shells,
                                       double prop_tol = 1e-8,
                                       const SumOptions& opts = {});

struct EutaxyReport {
  bool is_strongly_eutactic = false;
  int shells_checked = 0;
  double max_deviation = 0.0;  // worst relative residual over checked shells
  std::vector<ShellMoment> moments;
};

// Strong eutaxy across the first n_shells shells: every shell's second moment
// must be proportional to A^{-1} within tol (relative, entrywise against
// ||A^{-1}||_inf).
EutaxyReport check_strong_eutaxy(const Lattice& L, int n_shells = 6,
                                 double tol = 1e-8,
                                 const SumOptions& opts = {});

// ----------------------------------------------------------------------------
// Criticality of the Gaussian energy at a constrained lattice.  The gradient
// of theta with respect to the Gram matrix is
//   G_ij = sum_{m != 0} m_i m_j exp(-pi alpha Q(m));
// the lattice is critical among lattices sharing the bond set M when G lies
// in span{ m m^T : m in M }.  Returns the relative residual of that
// projection; `critical` is residual <= tol.
// ----------------------------------------------------------------------------
struct CriticalityReport {
  bool critical = false;
  double residual = 0.0;  // || G - proj G ||_F / || G ||_F
  Eigen::MatrixXd gradient;
};

CriticalityReport check_critical_point(const Lattice& L,
                                       const BondConstraint& constraint,
                                       double alpha, double tol = 1e-8,
                                       const SumOptions& opts = {});

// ----------------------------------------------------------------------------
// Positive definiteness of the theta Hessian restricted to the tangent space
// of the constraint set {Q(m) fixed for m in M}.  Directions are symmetric
// matrices H with m^T H m = 0 for all m in M.  Throws DegenerateTangentError
// when that tangent space is trivial (the constraint pins the Gram matrix,
// e.g. both canonical 3D bond sets).
// ----------------------------------------------------------------------------
struct HessianReport {
  double min_eigenvalue = 0.0;   // over the constrained tangent space
  double min_probe_value = 0.0;  // min of the quadratic form over probes
  int tangent_dim = 0;
  bool positive_definite = false;
};

HessianReport constrained_theta_hessian_pd(const Lattice& L,
                                           const BondConstraint& constraint,
                                           double alpha, int n_probes = 50,
                                           std::uint64_t seed = 0,
                                           double tol = 1e-10,
                                           const SumOptions& opts = {});

}  // namespace laten
