// ============================================================================
// structure.cpp -- shell moments, eutaxy, criticality, constrained Hessian
// ============================================================================

#include "latenergy/structure.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace laten {

namespace {

constexpr double kPi = std::numbers::pi;

void guard_budget(int dim, double mu, double r2, const SumOptions& opts,
                  const char* what) {
  if (count_bound(dim, mu, r2) > 4.0 * static_cast<double>(opts.budget)) {
    throw BudgetExceededError(std::string(what) +
                              ": tolerance unreachable within budget");
  }
}

// s(m) with m^T H m = s(m) . h for h = (H_11.., H_12, H_13, H_23) packing.
Eigen::VectorXd quad_coeffs(const Eigen::VectorXi& m) {
  const int d = static_cast<int>(m.size());
  Eigen::VectorXd s(d * (d + 1) / 2);
  int k = 0;
  for (int i = 0; i < d; ++i) s[k++] = double(m[i]) * m[i];
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) s[k++] = 2.0 * double(m[i]) * m[j];
  }
  return s;
}

Eigen::MatrixXd pair_outer_sum(const Shell& s, int d) {
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(d, d);
  for (const auto& m : s.vectors) {
    const Eigen::VectorXd v = m.cast<double>();
    W += v * v.transpose();
  }
  return W;
}

}  // namespace

// ----------------------------------------------------------------------------
// Shell moments and eutaxy
// ----------------------------------------------------------------------------

std::vector<ShellMoment> shell_moments(const Lattice& L, int n_shells,
                                       double prop_tol,
                                       const SumOptions& opts) {
  const int d = L.dim();
  const ShellDecomposition dec = first_shells(L, n_shells, opts);
  const Eigen::MatrixXd& Ainv = L.gram_inverse();
  const double ainf = Ainv.cwiseAbs().maxCoeff();

  std::vector<ShellMoment> out;
  int idx = 0;
  for (const Shell& s : dec.shells) {
    ShellMoment mo;
    mo.shell_index = ++idx;
    mo.r2 = s.r2;
    mo.count = s.count();
    mo.W_int = pair_outer_sum(s, d);
    mo.V_real = L.basis().transpose() * mo.W_int * L.basis();
    const double denom = mo.W_int.cwiseProduct(mo.W_int).sum();
    const double rho = mo.W_int.cwiseProduct(Ainv).sum() / denom;
    mo.deviation =
        (rho * mo.W_int - Ainv).cwiseAbs().maxCoeff() / ainf;
    if (rho > 0.0 && mo.deviation <= prop_tol) mo.rho = rho;
    out.push_back(std::move(mo));
  }
  return out;
}

EutaxyReport check_strong_eutaxy(const Lattice& L, int n_shells, double tol,
                                 const SumOptions& opts) {
  EutaxyReport rep;
  rep.moments = shell_moments(L, n_shells, tol, opts);
  rep.shells_checked = static_cast<int>(rep.moments.size());
  rep.is_strongly_eutactic = true;
  for (const ShellMoment& mo : rep.moments) {
    rep.max_deviation = std::max(rep.max_deviation, mo.deviation);
    if (!mo.rho.has_value()) rep.is_strongly_eutactic = false;
  }
  return rep;
}

// ----------------------------------------------------------------------------
// Criticality
// ----------------------------------------------------------------------------

CriticalityReport check_critical_point(const Lattice& L,
                                       const BondConstraint& constraint,
                                       double alpha, double tol,
                                       const SumOptions& opts) {
  if (!(alpha > 0.0)) throw NotSummableError("alpha must be positive");
  if (constraint.vectors.empty()) {
    throw std::invalid_argument("empty bond constraint");
  }
  const int d = L.dim();
  const double mu = L.gram_eig_min();
  const double c = kPi * alpha;

  // Scale reference: the minimal shell's contribution to G.
  const Shell min_shell = minimal_vectors(L, opts);
  const double g_scale =
      pair_outer_sum(min_shell, d).norm() * std::exp(-c * min_shell.r2);

  // Entrywise |(m m^T)_ij| <= |m|^2 <= Q/mu, so the dropped tail of G is
  // bounded by exp_tail_bound with one extra power of Q.
  double r2 = std::max(1.0, L.gram().diagonal().minCoeff());
  const double target = 1e-3 * std::max(tol, 1e-12) * g_scale;
  while (exp_tail_bound(d, mu, c, r2, 1) / mu > target) {
    r2 *= 1.5;
    guard_budget(d, mu, r2, opts, "check_critical_point");
  }

  ShellDecomposition dec;
  try {
    dec = shells(L, r2, opts);
  } catch (const CutoffTooLargeError& e) {
    throw BudgetExceededError(e.what());
  }
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(d, d);
  for (const Shell& s : dec.shells) {
    G += std::exp(-c * s.r2) * pair_outer_sum(s, d);
  }

  // Least-squares projection of G onto span{ m m^T : m in M }, computed in
  // an isometric vectorization of symmetric matrices.
  const int n = d * (d + 1) / 2;
  const auto vec_sym = [&](const Eigen::MatrixXd& Mx) {
    Eigen::VectorXd v(n);
    int k = 0;
    for (int i = 0; i < d; ++i) v[k++] = Mx(i, i);
    const double rt2 = std::sqrt(2.0);
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) v[k++] = rt2 * Mx(i, j);
    }
    return v;
  };

  std::vector<Eigen::VectorXd> cols;
  for (const auto& m : constraint.vectors) {
    if (m.size() != d) throw std::invalid_argument("bond dimension mismatch");
    const Eigen::VectorXd v = m.cast<double>();
    cols.push_back(vec_sym(v * v.transpose()));
  }
  Eigen::MatrixXd Phi(n, static_cast<int>(cols.size()));
  for (int j = 0; j < Phi.cols(); ++j) Phi.col(j) = cols[j];
  const Eigen::VectorXd g = vec_sym(G);
  const Eigen::VectorXd coef = Phi.colPivHouseholderQr().solve(g);

  CriticalityReport rep;
  rep.gradient = G;
  rep.residual = (Phi * coef - g).norm() / g.norm();
  rep.critical = rep.residual <= tol;
  return rep;
}

// ----------------------------------------------------------------------------
// Constrained Hessian
// ----------------------------------------------------------------------------

HessianReport constrained_theta_hessian_pd(const Lattice& L,
                                           const BondConstraint& constraint,
                                           double alpha, int n_probes,
                                           std::uint64_t seed, double tol,
                                           const SumOptions& opts) {
  if (!(alpha > 0.0)) throw NotSummableError("alpha must be positive");
  const int d = L.dim();
  const int n = d * (d + 1) / 2;
  const double mu = L.gram_eig_min();
  const double c = kPi * alpha;

  // Tangent space of the constraint set.
  Eigen::MatrixXd C(static_cast<int>(constraint.vectors.size()), n);
  for (int i = 0; i < C.rows(); ++i) {
    C.row(i) = quad_coeffs(constraint.vectors[i]).transpose();
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
  const Eigen::MatrixXd kernel = lu.kernel();
  // kernel() returns a single zero column when the map has full rank.
  const bool trivial =
      lu.dimensionOfKernel() == 0 ||
      (kernel.cols() == 1 && kernel.norm() < 1e-14);
  if (trivial) {
    throw DegenerateTangentError(
        "bond constraints pin the Gram matrix; tangent space is trivial");
  }
  const Eigen::MatrixXd N =
      Eigen::HouseholderQR<Eigen::MatrixXd>(kernel).householderQ() *
      Eigen::MatrixXd::Identity(n, static_cast<int>(kernel.cols()));

  // Hessian quadratic form on the vech coordinates.
  const Shell min_shell = minimal_vectors(L, opts);
  double h_scale = 0.0;
  for (const auto& m : min_shell.vectors) {
    h_scale += quad_coeffs(m).squaredNorm();
  }
  h_scale *= c * c * std::exp(-c * min_shell.r2);

  double r2 = std::max(1.0, L.gram().diagonal().minCoeff());
  const double target = 1e-3 * std::max(tol, 1e-12) * h_scale;
  while (c * c * 4.0 / (mu * mu) * exp_tail_bound(d, mu, c, r2, 2) > target) {
    r2 *= 1.5;
    guard_budget(d, mu, r2, opts, "constrained_theta_hessian_pd");
  }

  ShellDecomposition dec;
  try {
    dec = shells(L, r2, opts);
  } catch (const CutoffTooLargeError& e) {
    throw BudgetExceededError(e.what());
  }
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (const Shell& s : dec.shells) {
    const double w = std::exp(-c * s.r2);
    for (const auto& m : s.vectors) {
      const Eigen::VectorXd sv = quad_coeffs(m);
      H.noalias() += (c * c * w) * (sv * sv.transpose());
    }
  }

  const Eigen::MatrixXd P = N.transpose() * H * N;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);

  HessianReport rep;
  rep.tangent_dim = static_cast<int>(N.cols());
  rep.min_eigenvalue = es.eigenvalues().minCoeff();

  SplitMix64 rng(derive_seed(seed, 0x48455353ULL));
  double min_probe = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_probes; ++i) {
    Eigen::VectorXd gvec(N.cols());
    for (int j = 0; j < gvec.size(); ++j) {
      // Box-Muller from two uniforms.
      const double u1 = std::max(rng.next_double(), 1e-300);
      const double u2 = rng.next_double();
      gvec[j] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }
    const double denom = gvec.squaredNorm();
    if (denom < 1e-30) continue;
    min_probe = std::min(min_probe, gvec.dot(P * gvec) / denom);
  }
  rep.min_probe_value = min_probe;
  rep.positive_definite = rep.min_eigenvalue > tol;
  return rep;
}

}  // namespace laten
