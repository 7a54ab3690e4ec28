// ============================================================================
// lattice.cpp -- lattice construction, vector enumeration, bond classes
// ============================================================================

#include "latenergy/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace laten {

namespace {

constexpr double kShellGroupTol = 1e-9;

double shell_group_eps(double r2) { return kShellGroupTol * std::max(1.0, r2); }

// Lexicographic comparison of integer vectors.
bool lex_less(const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

// Canonical representative of the pair {m, -m}: first nonzero entry > 0.
Eigen::VectorXi canonical_pair_rep(const Eigen::VectorXi& m) {
  for (int i = 0; i < m.size(); ++i) {
    if (m[i] > 0) return m;
    if (m[i] < 0) return -m;
  }
  return m;
}

double unit_ball_volume(int d) {
  // V_d = pi^(d/2) / Gamma(d/2 + 1)
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

}  // namespace

// ----------------------------------------------------------------------------
// Lattice
// ----------------------------------------------------------------------------

Lattice Lattice::from_basis(const Eigen::MatrixXd& basis) {
  if (basis.rows() < 1 || basis.rows() != basis.cols()) {
    throw SingularBasisError("basis must be a square full-rank matrix");
  }
  const int d = static_cast<int>(basis.rows());
  double scale = 0.0;
  for (int i = 0; i < d; ++i) scale = std::max(scale, basis.row(i).norm());
  if (!(scale > 0.0) || !basis.allFinite()) {
    throw SingularBasisError("basis has a zero row or non-finite entries");
  }
  const double det = basis.determinant();
  if (std::abs(det) < 1e-12 * std::pow(scale, d)) {
    throw SingularBasisError("basis rows are numerically dependent");
  }

  Lattice L;
  L.basis_ = basis;
  L.gram_ = basis * basis.transpose();
  // Symmetrize against round-off so downstream solvers see an exact
  // symmetric matrix.
  L.gram_ = 0.5 * (L.gram_ + L.gram_.transpose()).eval();
  L.gram_inv_ = L.gram_.ldlt().solve(Eigen::MatrixXd::Identity(d, d));
  L.gram_inv_ = 0.5 * (L.gram_inv_ + L.gram_inv_.transpose()).eval();
  L.covolume_ = std::abs(det);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L.gram_);
  L.eig_min_ = es.eigenvalues().minCoeff();
  L.eig_max_ = es.eigenvalues().maxCoeff();
  if (!(L.eig_min_ > 0.0)) {
    throw SingularBasisError("Gram matrix is not positive definite");
  }
  return L;
}

Lattice Lattice::from_gram(const Eigen::MatrixXd& gram) {
  if (gram.rows() < 1 || gram.rows() != gram.cols()) {
    throw SingularBasisError("Gram matrix must be square");
  }
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * std::max(1.0, gram.cwiseAbs().maxCoeff())) {
    throw SingularBasisError("Gram matrix must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw SingularBasisError("Gram matrix is not positive definite");
  }
  return from_basis(Eigen::MatrixXd(llt.matrixL()));
}

double Lattice::quadratic_form(const Eigen::VectorXi& m) const {
  const Eigen::VectorXd v = m.cast<double>();
  return v.dot(gram_ * v);
}

Eigen::VectorXd Lattice::embed(const Eigen::VectorXi& m) const {
  return basis_.transpose() * m.cast<double>();
}

// ----------------------------------------------------------------------------
// Enumeration
// ----------------------------------------------------------------------------

namespace {

double predicted_count(int dim, double mu_min, double x) {
  if (x <= 0.0) return 0.0;
  const double r = std::sqrt(x / mu_min) + 0.5 * std::sqrt(double(dim));
  return unit_ball_volume(dim) * std::pow(r, dim);
}

// Depth-first walk over the Cholesky cone.  R is the upper-triangular factor
// (A = R^T R); q_i = R_ii^2, u_ij = R_ij / R_ii.
struct Enumerator {
  const Eigen::MatrixXd& A;
  Eigen::MatrixXd u;       // u(i, j), j > i
  Eigen::VectorXd q;       // q(i)
  double r2_enum = 0.0;
  long long budget = 0;
  long long visited = 0;
  std::vector<std::pair<double, Eigen::VectorXi>> out;
  Eigen::VectorXi m;
  int d = 0;

  void run() {
    m.setZero(d);
    descend(d - 1, 0.0);
  }

  void descend(int level, double partial) {
    // c = offset contributed by the already-fixed coordinates (> level)
    double c = 0.0;
    for (int j = level + 1; j < d; ++j) c += u(level, j) * m[j];
    const double room = r2_enum - partial;
    if (room < 0.0) return;
    const double half = std::sqrt(room / q[level]);
    const long long lo = static_cast<long long>(std::ceil(-c - half - 1e-12));
    const long long hi = static_cast<long long>(std::floor(-c + half + 1e-12));
    for (long long k = lo; k <= hi; ++k) {
      if (++visited > budget) {
        throw CutoffTooLargeError(
            "enumeration budget exceeded; shrink the cutoff or raise the "
            "budget");
      }
      m[level] = static_cast<int>(k);
      const double step = q[level] * (k + c) * (k + c);
      if (level == 0) {
        if (m.isZero()) continue;
        const Eigen::VectorXd v = m.cast<double>();
        const double Q = v.dot(A * v);
        if (Q <= r2_enum) out.emplace_back(Q, m);
      } else {
        descend(level - 1, partial + step);
      }
    }
    m[level] = 0;
  }
};

std::vector<std::pair<double, Eigen::VectorXi>> enumerate_vectors(
    const Lattice& L, double r2_max, const SumOptions& opts) {
  const int d = L.dim();
  const double r2_enum = r2_max + shell_group_eps(r2_max);
  const double predicted = predicted_count(d, L.gram_eig_min(), r2_enum);
  if (predicted > 4.0 * static_cast<double>(opts.budget)) {
    throw CutoffTooLargeError(
        "predicted vector count exceeds the enumeration budget");
  }

  Eigen::LLT<Eigen::MatrixXd> llt(L.gram());
  std::vector<std::pair<double, Eigen::VectorXi>> found;
  if (llt.info() == Eigen::Success) {
    Eigen::MatrixXd R = llt.matrixU();
    Enumerator en{L.gram(),  Eigen::MatrixXd::Zero(d, d),
                  Eigen::VectorXd::Zero(d), r2_enum,
                  opts.budget, 0,
                  {},          Eigen::VectorXi::Zero(d),
                  d};
    for (int i = 0; i < d; ++i) {
      en.q[i] = R(i, i) * R(i, i);
      for (int j = i + 1; j < d; ++j) en.u(i, j) = R(i, j) / R(i, i);
    }
    en.run();
    found = std::move(en.out);
  } else {
    // Axis-aligned integer box fallback (only reachable for ill-conditioned
    // Gram matrices where the factorization loses definiteness).
    const long long half = static_cast<long long>(
        std::floor(std::sqrt(r2_enum / L.gram_eig_min()))) + 1;
    Eigen::VectorXi m = Eigen::VectorXi::Zero(d);
    const long long span = 2 * half + 1;
    double total = 1.0;
    for (int i = 0; i < d; ++i) total *= static_cast<double>(span);
    if (total > static_cast<double>(opts.budget)) {
      throw CutoffTooLargeError("integer box exceeds the enumeration budget");
    }
    const auto advance = [&]() {
      for (int i = 0; i < d; ++i) {
        if (m[i] < half) {
          ++m[i];
          return true;
        }
        m[i] = -static_cast<int>(half);
      }
      return false;
    };
    m.setConstant(-static_cast<int>(half));
    do {
      if (m.isZero()) continue;
      const double Q = L.quadratic_form(m);
      if (Q <= r2_enum) found.emplace_back(Q, m);
    } while (advance());
  }
  return found;
}

}  // namespace

ShellDecomposition shells(const Lattice& L, double r2_max,
                          const SumOptions& opts) {
  if (!(r2_max > 0.0)) {
    return ShellDecomposition{r2_max, {}};
  }
  auto found = enumerate_vectors(L, r2_max, opts);
  std::sort(found.begin(), found.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first < b.first;
              return lex_less(a.second, b.second);
            });

  ShellDecomposition dec;
  dec.r2_max = r2_max;
  for (auto& [Q, m] : found) {
    if (dec.shells.empty() ||
        Q - dec.shells.back().r2 > shell_group_eps(dec.shells.back().r2)) {
      Shell s;
      s.r2 = Q;
      dec.shells.push_back(std::move(s));
    }
    dec.shells.back().vectors.push_back(std::move(m));
  }
  for (auto& s : dec.shells) {
    std::sort(s.vectors.begin(), s.vectors.end(), lex_less);
  }
  return dec;
}

Shell minimal_vectors(const Lattice& L, const SumOptions& opts) {
  double r2 = L.gram().diagonal().minCoeff();
  r2 += shell_group_eps(r2);
  ShellDecomposition dec = shells(L, r2, opts);
  // The minimal diagonal entry is itself a lattice vector length, so the
  // decomposition is never empty.
  return dec.shells.front();
}

ShellDecomposition first_shells(const Lattice& L, int n,
                                const SumOptions& opts) {
  double r2 = L.gram().diagonal().minCoeff() * std::max(1, n);
  for (int attempt = 0; attempt < 64; ++attempt) {
    ShellDecomposition dec = shells(L, r2, opts);
    if (static_cast<int>(dec.shells.size()) >= n) {
      dec.shells.resize(n);
      return dec;
    }
    r2 *= 1.7;
  }
  throw CutoffTooLargeError("could not collect the requested shells");
}

// ----------------------------------------------------------------------------
// Canonical lattices and bond sets
// ----------------------------------------------------------------------------

Lattice canonical(CanonicalLattice which, double lambda) {
  if (!(lambda > 0.0)) {
    throw SingularBasisError("bond length must be positive");
  }
  Eigen::MatrixXd B;
  switch (which) {
    case CanonicalLattice::SC1:
      B = Eigen::MatrixXd::Identity(1, 1);
      break;
    case CanonicalLattice::SC2:
      B = Eigen::MatrixXd::Identity(2, 2);
      break;
    case CanonicalLattice::SC3:
      B = Eigen::MatrixXd::Identity(3, 3);
      break;
    case CanonicalLattice::A2:
      B.resize(2, 2);
      B << 1.0, 0.0, 0.5, 0.5 * std::sqrt(3.0);
      break;
    case CanonicalLattice::D3:
      B.resize(3, 3);
      B << 1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0;
      B /= std::sqrt(2.0);
      break;
    case CanonicalLattice::D3star:
      B.resize(3, 3);
      B << 1.0, 1.0, -1.0, -1.0, 1.0, 1.0, 1.0, -1.0, 1.0;
      B /= std::sqrt(3.0);
      break;
  }
  return Lattice::from_basis(lambda * B);
}

BondConstraint canonical_bonds(CanonicalLattice which, double lambda) {
  std::vector<Eigen::VectorXi> half;
  const auto vec = [](std::initializer_list<int> ents) {
    Eigen::VectorXi v(static_cast<int>(ents.size()));
    int i = 0;
    for (int e : ents) v[i++] = e;
    return v;
  };
  switch (which) {
    case CanonicalLattice::SC1:
      half = {vec({1})};
      break;
    case CanonicalLattice::SC2:
      half = {vec({1, 0}), vec({0, 1})};
      break;
    case CanonicalLattice::SC3:
      half = {vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1})};
      break;
    case CanonicalLattice::A2:
      half = {vec({1, 0}), vec({0, 1}), vec({1, -1})};
      break;
    case CanonicalLattice::D3:
      half = {vec({1, 0, 0}),  vec({0, 1, 0}),  vec({0, 0, 1}),
              vec({1, -1, 0}), vec({1, 0, -1}), vec({0, 1, -1})};
      break;
    case CanonicalLattice::D3star:
      half = {vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1}), vec({1, 1, 1})};
      break;
  }
  BondConstraint c;
  c.lambda = lambda;
  for (const auto& m : half) {
    c.vectors.push_back(m);
    c.vectors.push_back(-m);
  }
  return c;
}

bool in_constraint_class(const Lattice& L, const BondConstraint& constraint,
                         bool strict, double tol, const SumOptions& opts) {
  const double l2 = constraint.lambda * constraint.lambda;
  const double eps = tol * std::max(1.0, l2);
  for (const auto& m : constraint.vectors) {
    if (m.size() != L.dim()) return false;
    if (std::abs(L.quadratic_form(m) - l2) > eps) return false;
  }
  Shell min_shell = minimal_vectors(L, opts);
  if (min_shell.r2 < l2 - eps) return false;  // something shorter than a bond
  if (!strict) return true;

  // Strict: the minimal shell must equal the bond set.
  std::vector<Eigen::VectorXi> a, b;
  for (const auto& m : min_shell.vectors) a.push_back(canonical_pair_rep(m));
  for (const auto& m : constraint.vectors) b.push_back(canonical_pair_rep(m));
  std::sort(a.begin(), a.end(), lex_less);
  std::sort(b.begin(), b.end(), lex_less);
  a.erase(std::unique(a.begin(), a.end()), a.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return a == b;
}

}  // namespace laten
