// ============================================================================
// potential.cpp -- lattice sums with rigorous truncation bounds
// ============================================================================

#include "latenergy/potential.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "latenergy/gamma.hpp"

namespace laten {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double unit_ball_volume(int d) {
  return std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

// beta(R) such that #{m != 0 : Q(m) <= x} <= beta * x^(d/2) for all x >= R^2.
double beta_coefficient(int dim, double mu_min, double R2) {
  const double R = std::sqrt(R2);
  return unit_ball_volume(dim) *
         std::pow(1.0 / std::sqrt(mu_min) + 0.5 * std::sqrt(double(dim)) / R,
                  dim);
}

ShellDecomposition shells_checked(const Lattice& L, double r2,
                                  const SumOptions& opts) {
  try {
    return shells(L, r2, opts);
  } catch (const CutoffTooLargeError& e) {
    throw BudgetExceededError(e.what());
  }
}

// Guard a cutoff-growth loop: the requested tolerance must stay reachable
// within the enumeration budget.
void check_budget(int dim, double mu_min, double r2, const SumOptions& opts,
                  const char* what) {
  const double r = std::sqrt(r2 / mu_min) + 0.5 * std::sqrt(double(dim));
  const double predicted = unit_ball_volume(dim) * std::pow(r, dim);
  if (predicted > 4.0 * static_cast<double>(opts.budget)) {
    throw BudgetExceededError(std::string(what) +
                              ": tolerance unreachable within budget");
  }
}

}  // namespace

void validate_potential(const PotentialSpec& pot, int dim) {
  std::visit(
      overloaded{
          [&](const Gaussian& g) {
            if (!(g.alpha > 0.0)) {
              throw NotSummableError("Gaussian width alpha must be positive");
            }
          },
          [&](const InversePower& ip) {
            if (!(ip.s > dim)) {
              throw NotSummableError(
                  "inverse power requires s > dim for summability");
            }
          },
          [&](const LennardJones& lj) {
            if (!(lj.a > 0.0) || !(lj.b > 0.0)) {
              throw NotSummableError(
                  "Lennard-Jones coefficients must be positive");
            }
            if (!(lj.p > lj.q) || !(2.0 * lj.q > dim)) {
              throw NotSummableError(
                  "Lennard-Jones exponents require p > q > dim/2");
            }
          },
      },
      pot);
}

double count_bound(int dim, double mu_min, double x) {
  if (x <= 0.0) return 0.0;
  const double r = std::sqrt(x / mu_min) + 0.5 * std::sqrt(double(dim));
  return unit_ball_volume(dim) * std::pow(r, dim);
}

double exp_tail_bound(int dim, double mu_min, double c, double R2, int k) {
  // sum_{Q > R2} Q^k exp(-c Q) <= beta c^{-K} Gamma(K+1, c R2), K = k + d/2,
  // valid while x^k e^{-cx} is decreasing past R2 (c R2 >= k).
  if (c * R2 < static_cast<double>(k)) {
    return std::numeric_limits<double>::infinity();
  }
  const double K = k + 0.5 * dim;
  const double beta = beta_coefficient(dim, mu_min, R2);
  return beta * std::pow(c, -K) * upper_gamma(K + 1.0, c * R2);
}

double power_tail_bound(int dim, double mu_min, double s, double R2) {
  const double beta = beta_coefficient(dim, mu_min, R2);
  return beta * (s / (s - dim)) * std::pow(R2, 0.5 * (dim - s));
}

// ----------------------------------------------------------------------------
// theta
// ----------------------------------------------------------------------------

EnergyResult theta(const Lattice& L, double alpha, const SumOptions& opts) {
  if (!(alpha > 0.0)) {
    throw NotSummableError("theta requires alpha > 0");
  }
  const int d = L.dim();
  const double mu = L.gram_eig_min();
  const double c = kPi * alpha;

  double r2 = std::max(L.gram().diagonal().minCoeff(), 1.0 / c);
  while (exp_tail_bound(d, mu, c, r2, 0) > opts.tol) {
    r2 *= 1.5;
    check_budget(d, mu, r2, opts, "theta");
  }

  const ShellDecomposition dec = shells_checked(L, r2, opts);
  double sum = 0.0;
  double comp = 0.0;  // Kahan compensation
  for (const Shell& s : dec.shells) {
    const double term = s.count() * std::exp(-c * s.r2);
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  EnergyResult res;
  res.value = 1.0 + sum;
  res.tail_bound = exp_tail_bound(d, mu, c, r2, 0);
  res.r2_cutoff = r2;
  return res;
}

// ----------------------------------------------------------------------------
// Epstein zeta, modular-split evaluation
// ----------------------------------------------------------------------------

namespace {

// One side of the split: sum' g(a, pi Q(m)) over Q(m) <= r2 with the
// uniform bound g(a, x) <= 2 e^{-x} / x (valid once x >= 2a - 2).
struct SplitSide {
  double sum = 0.0;
  double tail = 0.0;
  double r2 = 0.0;
};

SplitSide split_sum(const Lattice& L, double a, double tol,
                    const SumOptions& opts, const char* what) {
  const int d = L.dim();
  const double mu = L.gram_eig_min();

  double r2 = std::max({L.gram().diagonal().minCoeff(),
                        (2.0 * a - 2.0) / kPi, 2.0 / kPi});
  const auto tail_at = [&](double R2) {
    return (2.0 / kPi) * exp_tail_bound(d, mu, kPi, R2, 0) / R2;
  };
  while (tail_at(r2) > tol) {
    r2 *= 1.5;
    check_budget(d, mu, r2, opts, what);
  }

  const ShellDecomposition dec = shells_checked(L, r2, opts);
  double sum = 0.0, comp = 0.0;
  for (const Shell& s : dec.shells) {
    const double term = s.count() * upper_gamma_scaled(a, kPi * s.r2);
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return SplitSide{sum, tail_at(r2), r2};
}

}  // namespace

EnergyResult epstein_zeta(const Lattice& L, double s, const SumOptions& opts) {
  const int d = L.dim();
  if (!(s > d)) {
    throw NotSummableError("epstein_zeta requires s > dim");
  }
  const double V = L.covolume();
  const double prefactor = std::pow(kPi, 0.5 * s) / std::tgamma(0.5 * s);

  // Split the tolerance between the two sides, measured on the zeta scale.
  const double base_tol = 0.5 * opts.tol / prefactor;

  const Lattice dual = Lattice::from_gram(L.gram_inverse());
  const SplitSide direct =
      split_sum(L, 0.5 * s, base_tol, opts, "epstein_zeta(direct)");
  const SplitSide dual_side = split_sum(dual, 0.5 * (d - s), base_tol * V,
                                        opts, "epstein_zeta(dual)");

  const double base = direct.sum + (dual_side.sum + 2.0 / (s - d)) / V -
                      2.0 / s;
  EnergyResult res;
  res.value = prefactor * base;
  res.tail_bound = prefactor * (direct.tail + dual_side.tail / V);
  res.r2_cutoff = direct.r2;
  return res;
}

EnergyResult epstein_zeta_direct(const Lattice& L, double s,
                                 const SumOptions& opts) {
  const int d = L.dim();
  if (!(s > d)) {
    throw NotSummableError("epstein_zeta requires s > dim");
  }
  const double mu = L.gram_eig_min();

  double r2 = L.gram().diagonal().minCoeff() * 4.0;
  while (power_tail_bound(d, mu, s, r2) > opts.tol) {
    r2 *= 1.5;
    check_budget(d, mu, r2, opts, "epstein_zeta_direct");
  }

  const ShellDecomposition dec = shells_checked(L, r2, opts);
  double sum = 0.0, comp = 0.0;
  // Shells are sorted by increasing length; accumulate smallest terms last
  // by walking in reverse.
  for (auto it = dec.shells.rbegin(); it != dec.shells.rend(); ++it) {
    const double term = it->count() * std::pow(it->r2, -0.5 * s);
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  EnergyResult res;
  res.value = sum;
  res.tail_bound = power_tail_bound(d, mu, s, r2);
  res.r2_cutoff = r2;
  return res;
}

// ----------------------------------------------------------------------------
// Energy
// ----------------------------------------------------------------------------

EnergyResult energy(const Lattice& L, const PotentialSpec& pot,
                    const SumOptions& opts) {
  validate_potential(pot, L.dim());
  return std::visit(
      overloaded{
          [&](const Gaussian& g) {
            EnergyResult r = theta(L, g.alpha, opts);
            r.value -= 1.0;  // origin excluded from the energy
            return r;
          },
          [&](const InversePower& ip) { return epstein_zeta(L, ip.s, opts); },
          [&](const LennardJones& lj) {
            SumOptions sub = opts;
            sub.tol = 0.5 * opts.tol / std::max(1.0, lj.a);
            EnergyResult zp = epstein_zeta(L, 2.0 * lj.p, sub);
            sub.tol = 0.5 * opts.tol / std::max(1.0, lj.b);
            EnergyResult zq = epstein_zeta(L, 2.0 * lj.q, sub);
            EnergyResult r;
            r.value = lj.a * zp.value - lj.b * zq.value;
            r.tail_bound = lj.a * zp.tail_bound + lj.b * zq.tail_bound;
            r.r2_cutoff = std::max(zp.r2_cutoff, zq.r2_cutoff);
            return r;
          },
      },
      pot);
}

}  // namespace laten
