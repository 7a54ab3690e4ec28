// ============================================================================
// threshold.cpp -- optimality thresholds via grid scan + compass refinement
// + cubic Richardson extrapolation at the punctured reference points
// ============================================================================

#include "latenergy/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace laten {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPunctureRadius = 5e-4;

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

// Shared search-domain abstraction: free coordinates xi map to a unit-bond
// family lattice.  kind 0: the 2D segment (xi = off-diagonal Gram entry);
// kind 1: the full admissible 3D box (xi = x); kind 2: the eight-bond
// surface (xi = in-plane coordinates around the body-centred point).
struct SearchDomain {
  int kind = 0;
  int free_dims = 1;
  Eigen::Vector3d plane_d1, plane_d2, plane_center;
  std::vector<Eigen::VectorXd> punctures;  // reference copies, xi coords

  Eigen::Vector3d to_x(const Eigen::VectorXd& xi) const {
    if (kind == 2) return plane_center + xi[0] * plane_d1 + xi[1] * plane_d2;
    return Eigen::Vector3d(xi[0], xi.size() > 1 ? xi[1] : 0.0,
                           xi.size() > 2 ? xi[2] : 0.0);
  }

  bool admissible(const Eigen::VectorXd& xi) const {
    if (kind == 0) return xi[0] >= 0.0 && xi[0] <= 0.5;
    return admissible_3d(to_x(xi), 1e-9);
  }

  bool inside_puncture(const Eigen::VectorXd& xi) const {
    for (const auto& c : punctures) {
      if ((xi - c).norm() < kPunctureRadius) return true;
    }
    return false;
  }

  Lattice lattice(const Eigen::VectorXd& xi) const {
    if (kind == 0) {
      Eigen::Matrix2d A;
      A << 1.0, xi[0], xi[0], 1.0;
      return Lattice::from_gram(A);
    }
    return lattice_3d_coords(to_x(xi));
  }
};

struct RatioEvaluator {
  double p2 = 12.0, q2 = 6.0;    // zeta exponents 2p, 2q
  double zref_p = 0.0, zref_q = 0.0;
  bool sup_mode = false;
  double ab = 0.5;               // a / b
  double exponent = 1.0 / 6.0;   // 1 / (2 (p - q))
  double deg_floor = 0.0;        // degeneracy threshold on |D_q|
  SumOptions zopts;
  const SearchDomain* domain = nullptr;

  // Threshold value at xi; NaN for inadmissible or degenerate points.
  double operator()(const Eigen::VectorXd& xi) const {
    if (!domain->admissible(xi) || domain->inside_puncture(xi)) {
      return nan_value();
    }
    Lattice L = [&] {
      try {
        return domain->lattice(xi);
      } catch (const SingularBasisError&) {
        return Lattice::from_gram(Eigen::MatrixXd::Identity(1, 1));
      }
    }();
    if (L.dim() == 1) return nan_value();

    const auto evs = zeta_multi_for_threshold(L);
    double dp = evs[0] - zref_p;
    double dq = evs[1] - zref_q;
    if (sup_mode) {
      dp = -dp;
      dq = -dq;
    }
    if (std::abs(dq) <= deg_floor || std::abs(dp) <= deg_floor) {
      return nan_value();  // too close to a reference copy to resolve
    }
    if (dq < 0.0 || dp < 0.0) {
      throw SignError(
          "zeta difference has the wrong sign: the reference lattice is not "
          "the required family extremum on this domain");
    }
    return std::pow(ab * dp / dq, exponent);
  }

  std::array<double, 2> zeta_multi_for_threshold(const Lattice& L) const {
    const EnergyResult zp = epstein_zeta(L, p2, zopts);
    const EnergyResult zq = epstein_zeta(L, q2, zopts);
    return {zp.value, zq.value};
  }
};

// Cubic Richardson extrapolation toward a puncture along one direction:
// g(0) ~ (8 g(h) - 6 g(2h) + g(4h)) / 3 with error O(h^3).
double richardson_limit(const RatioEvaluator& f, const Eigen::VectorXd& origin,
                        const Eigen::VectorXd& dir, double h) {
  const double g1 = f(origin + h * dir);
  const double g2 = f(origin + 2.0 * h * dir);
  const double g4 = f(origin + 4.0 * h * dir);
  if (std::isnan(g1) || std::isnan(g2) || std::isnan(g4)) return nan_value();
  return (8.0 * g1 - 6.0 * g2 + g4) / 3.0;
}

// Deterministic compass (pattern) search from a start point; minimizes
// sign * f.  Inadmissible / NaN probes count as non-improving.
struct CompassResult {
  Eigen::VectorXd xi;
  double value = 0.0;
  double last_gain = 0.0;
};

CompassResult compass_search(const RatioEvaluator& f, Eigen::VectorXd xi,
                             double sign, double step0, double floor_step) {
  std::vector<Eigen::VectorXd> dirs;
  const int k = static_cast<int>(xi.size());
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(k);
    e[i] = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(k);
      e[i] = std::numbers::sqrt2 / 2.0;
      e[j] = std::numbers::sqrt2 / 2.0;
      dirs.push_back(e);
      dirs.push_back(-e);
      Eigen::VectorXd o = e;
      o[j] = -o[j];
      dirs.push_back(o);
      dirs.push_back(-o);
    }
  }

  double cur = sign * f(xi);
  double last_gain = 0.0;
  double step = step0;
  int evals = 0;
  while (step > floor_step && evals < 200000) {
    bool improved = false;
    for (const auto& d : dirs) {
      const Eigen::VectorXd cand = xi + step * d;
      const double v = sign * f(cand);
      ++evals;
      if (!std::isnan(v) && v < cur - 1e-15) {
        last_gain = cur - v;
        cur = v;
        xi = cand;
        improved = true;
        break;
      }
    }
    if (!improved) step *= 0.5;
  }
  return CompassResult{xi, sign * cur, last_gain};
}

}  // namespace

double threshold_scaling(double lambda_star, const LennardJones& from,
                         const LennardJones& to) {
  if (std::abs(from.p - to.p) > 1e-12 || std::abs(from.q - to.q) > 1e-12) {
    throw std::invalid_argument(
        "threshold_scaling requires matching exponents");
  }
  const double expo = 1.0 / (2.0 * (from.p - from.q));
  return lambda_star * std::pow((to.a * from.b) / (from.a * to.b), expo);
}

ThresholdResult solve_threshold(const ThresholdQuery& query,
                                const SumOptions& opts) {
  // --- validate and set up the domain -------------------------------------
  int dim = 0;
  SearchDomain dom;
  Eigen::VectorXd ref_xi;
  switch (query.reference) {
    case CanonicalLattice::SC2:
      dim = 2;
      dom.kind = 0;
      dom.free_dims = 1;
      ref_xi = Eigen::VectorXd::Zero(1);
      break;
    case CanonicalLattice::A2:
      dim = 2;
      dom.kind = 0;
      dom.free_dims = 1;
      ref_xi = Eigen::VectorXd::Constant(1, 0.5);
      break;
    case CanonicalLattice::SC3:
      dim = 3;
      dom.kind = 1;
      dom.free_dims = 3;
      ref_xi = Eigen::VectorXd::Zero(3);
      break;
    case CanonicalLattice::D3:
    case CanonicalLattice::D3star: {
      dim = 3;
      dom.kind = 2;
      dom.free_dims = 2;
      dom.plane_center = bcc_coords();
      dom.plane_d1 = Eigen::Vector3d(1.0, -1.0, 0.0) / std::sqrt(2.0);
      dom.plane_d2 = Eigen::Vector3d(1.0, 1.0, -2.0) / std::sqrt(6.0);
      break;
    }
    default:
      throw std::invalid_argument(
          "threshold reference must be SC2, A2, SC3, D3 or D3star");
  }

  const LennardJones& lj = query.pot;
  validate_potential(PotentialSpec{lj}, dim);

  // Reference copies inside the domain (punctures).
  const auto xi_of_surface_x = [&](const Eigen::Vector3d& x) {
    Eigen::VectorXd xi(2);
    xi[0] = (x - dom.plane_center).dot(dom.plane_d1);
    xi[1] = (x - dom.plane_center).dot(dom.plane_d2);
    return xi;
  };
  if (query.reference == CanonicalLattice::D3star) {
    ref_xi = Eigen::VectorXd::Zero(2);
    dom.punctures.push_back(ref_xi);
  } else if (query.reference == CanonicalLattice::D3) {
    // The face-centred representatives sit at the corners of the admissible
    // triangle; all three are copies of the reference.
    dom.punctures.push_back(xi_of_surface_x({-0.5, -0.5, 0.0}));
    dom.punctures.push_back(xi_of_surface_x({-0.5, 0.0, -0.5}));
    dom.punctures.push_back(xi_of_surface_x({0.0, -0.5, -0.5}));
    ref_xi = dom.punctures.front();
  } else {
    dom.punctures.push_back(ref_xi);
  }

  // --- evaluator -----------------------------------------------------------
  RatioEvaluator f;
  f.p2 = 2.0 * lj.p;
  f.q2 = 2.0 * lj.q;
  f.sup_mode = query.mode == ThresholdMode::Lambda1;
  f.ab = lj.a / lj.b;
  f.exponent = 1.0 / (2.0 * (lj.p - lj.q));
  f.zopts = opts;
  f.zopts.tol = std::min(opts.tol, 1e-11);
  f.domain = &dom;

  {
    const Lattice ref = canonical(query.reference, 1.0);
    SumOptions tight = f.zopts;
    tight.tol = 1e-13;
    f.zref_p = epstein_zeta(ref, f.p2, tight).value;
    f.zref_q = epstein_zeta(ref, f.q2, tight).value;
    f.deg_floor = 1e-9 * std::abs(f.zref_q);
  }

  const double sign = f.sup_mode ? -1.0 : 1.0;

  // --- grid scan -----------------------------------------------------------
  Eigen::VectorXd best_xi;
  double best_val = nan_value();
  const auto consider = [&](const Eigen::VectorXd& xi) {
    const double v = f(xi);
    if (std::isnan(v)) return;
    if (std::isnan(best_val) || sign * v < sign * best_val) {
      best_val = v;
      best_xi = xi;
    }
  };

  double grid_step = 0.0;
  if (dom.kind == 0) {
    const int n = 512;
    grid_step = 0.5 / n;
    for (int i = 0; i <= n; ++i) {
      consider(Eigen::VectorXd::Constant(1, 0.5 * i / n));
    }
  } else if (dom.kind == 1) {
    const int n = 16;  // 33^3 box scan
    grid_step = 0.5 / n;
    for (int i = -n; i <= n; ++i) {
      for (int j = -n; j <= n; ++j) {
        for (int k = -n; k <= n; ++k) {
          Eigen::VectorXd xi(3);
          xi << 0.5 * i / n, 0.5 * j / n, 0.5 * k / n;
          consider(xi);
        }
      }
    }
  } else {
    const int n = 32;  // 65^2 plane scan
    grid_step = 0.9 / n;
    for (int i = -n; i <= n; ++i) {
      for (int j = -n; j <= n; ++j) {
        Eigen::VectorXd xi(2);
        xi << 0.45 * i / n, 0.45 * j / n;
        consider(xi);
      }
    }
  }
  if (std::isnan(best_val)) {
    throw NotConvergedError("threshold grid scan found no evaluable point");
  }

  // --- interior refinement ---------------------------------------------------
  const double floor_step = std::max(1e-8, 0.05 * query.tol);
  const CompassResult interior =
      compass_search(f, best_xi, sign, grid_step, floor_step);

  // --- puncture limits -------------------------------------------------------
  double limit_val = nan_value();
  Eigen::VectorXd limit_xi;
  const double h = 1e-3;
  for (const auto& c : dom.punctures) {
    std::vector<Eigen::VectorXd> dirs;
    if (dom.free_dims == 1) {
      dirs.push_back(Eigen::VectorXd::Constant(1, 1.0));
      dirs.push_back(Eigen::VectorXd::Constant(1, -1.0));
    } else {
      const int n_ring = (dom.free_dims == 2) ? 48 : 0;
      for (int i = 0; i < n_ring; ++i) {
        const double a = 2.0 * kPi * i / n_ring;
        Eigen::VectorXd d(2);
        d << std::cos(a), std::sin(a);
        dirs.push_back(d);
      }
      if (dom.free_dims == 3) {
        // Canonical direction classes plus a deterministic spread.
        const std::vector<Eigen::Vector3d> base = {
            {1, 0, 0}, {0, 1, 0}, {0, 0, 1},
            {1, 1, 0}, {1, -1, 0}, {1, 0, 1},  {1, 0, -1},
            {0, 1, 1}, {0, 1, -1}, {1, 1, 1},  {1, 1, -1},
            {1, -1, 1}, {-1, 1, 1}};
        for (const auto& b : base) {
          Eigen::Vector3d u = b.normalized();
          dirs.push_back(Eigen::VectorXd(u));
          dirs.push_back(Eigen::VectorXd(-u));
        }
        SplitMix64 rng(0x5448524Cu);
        for (int i = 0; i < 26; ++i) {
          Eigen::Vector3d u(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                            rng.uniform(-1.0, 1.0));
          if (u.norm() < 1e-3) continue;
          dirs.push_back(Eigen::VectorXd(u.normalized()));
        }
      }
    }
    for (const auto& d : dirs) {
      const double v = richardson_limit(f, c, d, h);
      if (std::isnan(v)) continue;
      if (std::isnan(limit_val) || sign * v < sign * limit_val) {
        limit_val = v;
        limit_xi = c;
      }
    }
  }

  // --- combine ---------------------------------------------------------------
  ThresholdResult res;
  const bool limit_wins =
      !std::isnan(limit_val) && sign * limit_val < sign * interior.value;
  res.lambda_star = limit_wins ? limit_val : interior.value;
  res.attained_at_reference = limit_wins;
  const Eigen::VectorXd& where = limit_wins ? limit_xi : interior.xi;
  if (dim == 2) {
    res.argmin = Eigen::VectorXd::Constant(1, std::acos(where[0]));
  } else {
    res.argmin = Eigen::VectorXd(dom.to_x(where));
  }
  const double width =
      std::max({query.tol, std::abs(interior.last_gain), 4.0 * h * h * h});
  res.bracket = {res.lambda_star - width, res.lambda_star + width};
  if (!std::isfinite(res.lambda_star)) {
    throw NotConvergedError("threshold refinement did not converge");
  }
  return res;
}

}  // namespace laten
