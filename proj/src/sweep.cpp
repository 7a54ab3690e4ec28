// ============================================================================
// sweep.cpp -- family minimization, classification, sweeps, transitions
// ============================================================================

#include "latenergy/sweep.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
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

// Off-diagonal index pairs in the order used for gradient coordinates:
// 2D: (0,1); 3D: (0,1), (0,2), (1,2) -- matching the x = (a12, a13, a23)
// packing of the family coordinates.
std::vector<std::pair<int, int>> offdiag_pairs(int d) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

Eigen::MatrixXd shell_outer_sum(const Shell& s, int d) {
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(d, d);
  for (const auto& m : s.vectors) {
    const Eigen::VectorXd v = m.cast<double>();
    W += v * v.transpose();
  }
  return W;
}

// ----------------------------------------------------------------------------
// Modular-split zeta evaluation for several exponents at once (one
// enumeration per side), with optional gradient in the off-diagonal Gram
// coordinates.
// ----------------------------------------------------------------------------

struct ZetaEval {
  double value = 0.0;
  Eigen::VectorXd grad;  // empty unless gradients were requested
};

std::vector<ZetaEval> zeta_multi(const Lattice& L,
                                 const std::vector<double>& exponents,
                                 bool want_grad, const SumOptions& opts) {
  const int d = L.dim();
  const double V = L.covolume();
  const Eigen::MatrixXd& Ainv = L.gram_inverse();
  const Lattice dual = Lattice::from_gram(Ainv);
  const auto pairs = offdiag_pairs(d);
  const int nc = static_cast<int>(pairs.size());

  double s_max = 0.0;
  double pref_max = 0.0;
  for (double s : exponents) {
    if (!(s > d)) throw NotSummableError("zeta exponent must exceed dim");
    s_max = std::max(s_max, s);
    pref_max =
        std::max(pref_max, std::pow(kPi, 0.5 * s) / std::tgamma(0.5 * s));
  }
  const double base_tol = 0.25 * opts.tol / pref_max;

  // A single radius per side serves every exponent: the term bound
  // g(a, x) <= 2 e^{-x} / x is order-independent once x >= 2a - 2.
  const auto grow = [&](const Lattice& lat, double floor_x) {
    const double mu = lat.gram_eig_min();
    double r2 = std::max({lat.gram().diagonal().minCoeff(), floor_x / kPi,
                          2.0 / kPi});
    const auto tail = [&](double R2) {
      const double etb = exp_tail_bound(d, mu, kPi, R2, 0);
      double bound = (2.0 / kPi) * etb / R2;          // value terms
      if (want_grad) bound += (4.0 / mu) * etb;       // gradient terms
      return bound;
    };
    while (tail(r2) > base_tol) {
      r2 *= 1.5;
      if (count_bound(d, mu, r2) > 4.0 * static_cast<double>(opts.budget)) {
        throw BudgetExceededError("zeta: tolerance unreachable within budget");
      }
    }
    return r2;
  };
  const double r2_direct = grow(L, s_max + 2.0);
  const double r2_dual = grow(dual, 2.0);

  const auto get_shells = [&](const Lattice& lat, double r2) {
    try {
      return shells(lat, r2, opts);
    } catch (const CutoffTooLargeError& e) {
      throw BudgetExceededError(e.what());
    }
  };
  const ShellDecomposition dec_direct = get_shells(L, r2_direct);
  const ShellDecomposition dec_dual = get_shells(dual, r2_dual);

  const int ns = static_cast<int>(exponents.size());
  std::vector<ZetaEval> out(ns);
  for (int k = 0; k < ns; ++k) {
    const double s = exponents[k];
    const double a1 = 0.5 * s;
    const double a2 = 0.5 * (d - s);
    const double prefactor = std::pow(kPi, 0.5 * s) / std::tgamma(0.5 * s);

    double S1 = 0.0, S2 = 0.0;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(nc);
    for (const Shell& sh : dec_direct.shells) {
      const double x = kPi * sh.r2;
      S1 += sh.count() * upper_gamma_scaled(a1, x);
      if (want_grad) {
        const Eigen::MatrixXd W = shell_outer_sum(sh, d);
        const double gs = upper_gamma_scaled(a1 + 1.0, x);
        for (int c = 0; c < nc; ++c) {
          g[c] += -2.0 * kPi * gs * W(pairs[c].first, pairs[c].second);
        }
      }
    }
    for (const Shell& sh : dec_dual.shells) {
      const double x = kPi * sh.r2;
      S2 += sh.count() * upper_gamma_scaled(a2, x);
      if (want_grad) {
        const Eigen::MatrixXd Wt =
            Ainv * shell_outer_sum(sh, d) * Ainv;  // (A^-1 n)(A^-1 n)^T sum
        const double gs = upper_gamma_scaled(a2 + 1.0, x);
        for (int c = 0; c < nc; ++c) {
          g[c] += (2.0 * kPi * gs / V) * Wt(pairs[c].first, pairs[c].second);
        }
      }
    }

    const double bracket = S2 + 2.0 / (s - d);
    out[k].value = prefactor * (S1 + bracket / V - 2.0 / s);
    if (want_grad) {
      for (int c = 0; c < nc; ++c) {
        g[c] += -(Ainv(pairs[c].first, pairs[c].second) / V) * bracket;
      }
      out[k].grad = prefactor * g;
    }
  }
  return out;
}

// Gaussian energy and gradient in the off-diagonal Gram coordinates of the
// *unit* lattice: E = theta_L(c/pi) - 1 with c = pi alpha lambda^2.
ZetaEval gaussian_eval(const Lattice& L, double c, bool want_grad,
                       const SumOptions& opts) {
  const int d = L.dim();
  const double mu = L.gram_eig_min();
  const auto pairs = offdiag_pairs(d);
  const int nc = static_cast<int>(pairs.size());

  double r2 = std::max(L.gram().diagonal().minCoeff(), 1.0 / c);
  const auto tail = [&](double R2) {
    return exp_tail_bound(d, mu, c, R2, 0) +
           (want_grad ? 2.0 * c / mu * exp_tail_bound(d, mu, c, R2, 1) : 0.0);
  };
  while (tail(r2) > opts.tol) {
    r2 *= 1.5;
    if (count_bound(d, mu, r2) > 4.0 * static_cast<double>(opts.budget)) {
      throw BudgetExceededError(
          "gaussian energy: tolerance unreachable within budget");
    }
  }
  ShellDecomposition dec;
  try {
    dec = shells(L, r2, opts);
  } catch (const CutoffTooLargeError& e) {
    throw BudgetExceededError(e.what());
  }

  ZetaEval out;
  out.grad = Eigen::VectorXd::Zero(nc);
  for (const Shell& sh : dec.shells) {
    const double w = std::exp(-c * sh.r2);
    out.value += sh.count() * w;
    if (want_grad) {
      const Eigen::MatrixXd W = shell_outer_sum(sh, d);
      for (int k = 0; k < nc; ++k) {
        out.grad[k] += -2.0 * c * w * W(pairs[k].first, pairs[k].second);
      }
    }
  }
  return out;
}

// Energy (and gradient over the off-diagonal unit-Gram coordinates) of the
// scaled family member lambda * L(x).
struct EnergyGrad {
  double E = 0.0;
  Eigen::VectorXd g;
};

EnergyGrad eval_family(const Lattice& unit, double lambda,
                       const PotentialSpec& pot, bool want_grad,
                       const SumOptions& opts) {
  validate_potential(pot, unit.dim());
  return std::visit(
      overloaded{
          [&](const Gaussian& gs) {
            const double c = kPi * gs.alpha * lambda * lambda;
            ZetaEval ev = gaussian_eval(unit, c, want_grad, opts);
            return EnergyGrad{ev.value, ev.grad};
          },
          [&](const InversePower& ip) {
            const double scale = std::pow(lambda, -ip.s);
            auto evs = zeta_multi(unit, {ip.s}, want_grad, opts);
            EnergyGrad eg;
            eg.E = scale * evs[0].value;
            if (want_grad) eg.g = scale * evs[0].grad;
            return eg;
          },
          [&](const LennardJones& lj) {
            const double cp = lj.a * std::pow(lambda, -2.0 * lj.p);
            const double cq = lj.b * std::pow(lambda, -2.0 * lj.q);
            SumOptions sub = opts;
            sub.tol = opts.tol / std::max(1.0, cp + cq);
            auto evs =
                zeta_multi(unit, {2.0 * lj.p, 2.0 * lj.q}, want_grad, sub);
            EnergyGrad eg;
            eg.E = cp * evs[0].value - cq * evs[1].value;
            if (want_grad) eg.g = cp * evs[0].grad - cq * evs[1].grad;
            return eg;
          },
      },
      pot);
}

}  // namespace

// ----------------------------------------------------------------------------
// Classification
// ----------------------------------------------------------------------------

const char* phase_name(PhaseLabel label) {
  switch (label) {
    case PhaseLabel::Square:
      return "square";
    case PhaseLabel::Triangular:
      return "triangular";
    case PhaseLabel::Rhombic2D:
      return "rhombic";
    case PhaseLabel::SC:
      return "sc";
    case PhaseLabel::BCC:
      return "bcc";
    case PhaseLabel::FCC:
      return "fcc";
    case PhaseLabel::Rhombic3D:
      return "rhombic3d";
  }
  return "unknown";
}

PhaseLabel classify_2d(const FamilyPoint2D& p, double tol) {
  if (std::abs(p.t - kPi / 2.0) <= tol) return PhaseLabel::Square;
  if (std::abs(p.t - kPi / 3.0) <= tol) return PhaseLabel::Triangular;
  return PhaseLabel::Rhombic2D;
}

namespace {

struct SignatureEntry {
  double ratio;
  int count;
};

bool match_signature(const std::vector<SignatureEntry>& sig,
                     const std::vector<SignatureEntry>& ref, double tol) {
  if (sig.size() < ref.size()) return false;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    if (sig[i].count != ref[i].count) return false;
    if (std::abs(sig[i].ratio - ref[i].ratio) > 8.0 * tol) return false;
  }
  return true;
}

}  // namespace

PhaseLabel classify_3d(const Eigen::Vector3d& x, double tol,
                       const SumOptions& opts) {
  const Lattice L = lattice_3d_coords(x);
  const double r2_1 = minimal_vectors(L, opts).r2;
  const ShellDecomposition dec = shells(L, 4.0 * r2_1, opts);

  // Merge raw shells at the classification tolerance, then compare the first
  // three merged groups against the reference signatures.
  std::vector<SignatureEntry> sig;
  double group_r2 = -1.0;
  for (const Shell& s : dec.shells) {
    const double ratio = s.r2 / r2_1;
    if (sig.empty() || ratio - group_r2 > 4.0 * tol * std::max(1.0, ratio)) {
      sig.push_back({ratio, s.count()});
      group_r2 = ratio;
    } else {
      sig.back().count += s.count();
    }
    if (sig.size() > 3) break;
  }
  sig.resize(std::min<std::size_t>(sig.size(), 3));

  static const std::vector<SignatureEntry> kSc = {{1.0, 6}, {2.0, 12},
                                                  {3.0, 8}};
  static const std::vector<SignatureEntry> kBcc = {{1.0, 8},
                                                   {4.0 / 3.0, 6},
                                                   {8.0 / 3.0, 12}};
  static const std::vector<SignatureEntry> kFcc = {{1.0, 12}, {2.0, 6},
                                                   {3.0, 24}};
  if (match_signature(sig, kSc, tol)) return PhaseLabel::SC;
  if (match_signature(sig, kBcc, tol)) return PhaseLabel::BCC;
  if (match_signature(sig, kFcc, tol)) return PhaseLabel::FCC;
  return PhaseLabel::Rhombic3D;
}

// ----------------------------------------------------------------------------
// Public energies / gradients over the family parameters
// ----------------------------------------------------------------------------

double family_energy_2d(const FamilyPoint2D& p, double lambda,
                        const PotentialSpec& pot, const SumOptions& opts) {
  return eval_family(lattice_2d(p), lambda, pot, false, opts).E;
}

double family_energy_3d(const Eigen::Vector3d& x, double lambda,
                        const PotentialSpec& pot, const SumOptions& opts) {
  return eval_family(lattice_3d_coords(x), lambda, pot, false, opts).E;
}

namespace {

// Term-by-term gradient over the off-diagonal Gram coordinates: each lattice
// vector contributes f'(lambda^2 Q) * lambda^2 * 2 m_i m_j.  The cutoff is
// grown until a rigorous bound on the dropped tail falls below opts.tol.
Eigen::VectorXd direct_gradient(const Lattice& unit, double lambda,
                                const PotentialSpec& pot,
                                const SumOptions& opts) {
  validate_potential(pot, unit.dim());
  const int d = unit.dim();
  const double mu = unit.gram_eig_min();
  const double l2 = lambda * lambda;
  const auto pairs = offdiag_pairs(d);

  const auto tail_bound = [&](double R2) {
    return std::visit(
        overloaded{
            [&](const Gaussian& g) {
              const double c = kPi * g.alpha * l2;
              return 2.0 * c / mu * exp_tail_bound(d, mu, c, R2, 1);
            },
            [&](const InversePower& ip) {
              return ip.s * std::pow(lambda, -ip.s) / mu *
                     power_tail_bound(d, mu, ip.s, R2);
            },
            [&](const LennardJones& lj) {
              return 2.0 * lj.a * lj.p * std::pow(lambda, -2.0 * lj.p) / mu *
                         power_tail_bound(d, mu, 2.0 * lj.p, R2) +
                     2.0 * lj.b * lj.q * std::pow(lambda, -2.0 * lj.q) / mu *
                         power_tail_bound(d, mu, 2.0 * lj.q, R2);
            },
        },
        pot);
  };
  const auto fprime = [&](double r2) {
    return std::visit(
        overloaded{
            [&](const Gaussian& g) {
              return -kPi * g.alpha * std::exp(-kPi * g.alpha * r2);
            },
            [&](const InversePower& ip) {
              return -0.5 * ip.s * std::pow(r2, -0.5 * ip.s - 1.0);
            },
            [&](const LennardJones& lj) {
              return -lj.a * lj.p * std::pow(r2, -lj.p - 1.0) +
                     lj.b * lj.q * std::pow(r2, -lj.q - 1.0);
            },
        },
        pot);
  };

  double r2 = unit.gram().diagonal().minCoeff() * 4.0;
  while (tail_bound(r2) > opts.tol) {
    r2 *= 1.5;
    if (count_bound(d, mu, r2) > 4.0 * static_cast<double>(opts.budget)) {
      throw BudgetExceededError(
          "family_energy_gradient: tolerance unreachable within budget");
    }
  }
  ShellDecomposition dec;
  try {
    dec = shells(unit, r2, opts);
  } catch (const CutoffTooLargeError& e) {
    throw BudgetExceededError(e.what());
  }

  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<int>(pairs.size()));
  for (const Shell& sh : dec.shells) {
    const Eigen::MatrixXd W = shell_outer_sum(sh, d);
    const double fp = fprime(l2 * sh.r2) * l2;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      g[static_cast<int>(k)] +=
          fp * 2.0 * W(pairs[k].first, pairs[k].second);
    }
  }
  return g;
}

}  // namespace

Eigen::VectorXd family_energy_gradient_2d(const FamilyPoint2D& p,
                                          double lambda,
                                          const PotentialSpec& pot,
                                          const SumOptions& opts) {
  const Eigen::VectorXd gx = direct_gradient(lattice_2d(p), lambda, pot, opts);
  Eigen::VectorXd gt(1);
  gt[0] = -std::sin(p.t) * gx[0];  // chain rule through x = cos t
  return gt;
}

Eigen::VectorXd family_energy_gradient_3d(const Eigen::Vector3d& x,
                                          double lambda,
                                          const PotentialSpec& pot,
                                          const SumOptions& opts) {
  return direct_gradient(lattice_3d_coords(x), lambda, pot, opts);
}

// ----------------------------------------------------------------------------
// Descent
// ----------------------------------------------------------------------------

namespace {

struct DescentResult {
  Eigen::VectorXd x;
  double energy = 0.0;
};

// Projected Armijo descent over the off-diagonal Gram coordinates.
// `project` removes constrained components from the gradient; `admissible`
// guards every trial point (step halving, at most 20 times).
template <class Admissible, class Project>
DescentResult descend(Eigen::VectorXd x, double lambda,
                      const PotentialSpec& pot, const Admissible& admissible,
                      const Project& project, const MinimizeOptions& mopts,
                      const SumOptions& opts, int dim) {
  const auto make_lattice = [&](const Eigen::VectorXd& v) {
    if (dim == 2) {
      Eigen::Matrix2d A;
      A << 1.0, v[0], v[0], 1.0;
      return Lattice::from_gram(A);
    }
    return lattice_3d_coords(Eigen::Vector3d(v[0], v[1], v[2]));
  };

  EnergyGrad cur = eval_family(make_lattice(x), lambda, pot, true, opts);
  double step = 0.1;
  constexpr double kArmijoC1 = 1e-4;
  // Truncated sums put a noise floor under both the gradient and the energy
  // differences, so the gradient-norm test alone may never fire.  Treat a
  // run of accepted steps whose decrease is at rounding level as converged.
  int stagnant = 0;

  for (int iter = 0; iter < mopts.max_iterations; ++iter) {
    Eigen::VectorXd dir = project(x, cur.g);
    const double gnorm = dir.norm();
    if (gnorm < mopts.grad_tol) break;

    bool accepted = false;
    double trial_step = step;
    double decrease = 0.0;
    for (int halving = 0; halving < 60 && !accepted; ++halving) {
      Eigen::VectorXd cand = x - trial_step * dir;
      if (!admissible(cand)) {
        if (halving >= 20) break;  // inadmissibility allowance exhausted
        trial_step *= 0.5;
        continue;
      }
      EnergyGrad next;
      try {
        next = eval_family(make_lattice(cand), lambda, pot, true, opts);
      } catch (const std::exception&) {
        trial_step *= 0.5;
        continue;
      }
      if (next.E <= cur.E - kArmijoC1 * trial_step * gnorm * gnorm) {
        decrease = cur.E - next.E;
        x = std::move(cand);
        cur = std::move(next);
        accepted = true;
      } else {
        trial_step *= 0.5;
      }
    }
    if (!accepted) break;          // no acceptable step: stationary enough
    if (decrease <= 1e-14 * (1.0 + std::abs(cur.E))) {
      if (++stagnant >= 3) break;  // progress is below rounding resolution
    } else {
      stagnant = 0;
    }
    step = std::min(trial_step * 2.0, 1.0);
  }
  return DescentResult{x, cur.E};
}

int label_priority(PhaseLabel label) {
  switch (label) {
    case PhaseLabel::Square:
    case PhaseLabel::SC:
      return 0;
    case PhaseLabel::BCC:
      return 1;
    case PhaseLabel::Triangular:
    case PhaseLabel::FCC:
      return 2;
    default:
      return 3;
  }
}

}  // namespace

PhasePoint minimize_over_family_2d(double lambda, const PotentialSpec& pot,
                                   const MinimizeOptions& mopts,
                                   const SumOptions& opts) {
  // Pre-scan over x = cos t in [0, 1/2].
  const int n = std::max(mopts.grid_points, 8);
  std::vector<std::pair<double, double>> scan;  // (energy, x)
  for (int i = 0; i <= n; ++i) {
    const double x = 0.5 * i / n;
    Eigen::Matrix2d A;
    A << 1.0, x, x, 1.0;
    const double E =
        eval_family(Lattice::from_gram(A), lambda, pot, false, opts).E;
    scan.emplace_back(E, x);
  }
  std::sort(scan.begin(), scan.end());

  const auto admissible = [](const Eigen::VectorXd& v) {
    return v[0] >= 0.0 && v[0] <= 0.5;
  };
  const auto project = [](const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
    Eigen::VectorXd p = g;
    // Box projection: zero out components pushing through an active bound.
    if (x[0] <= 0.0 + 1e-15 && g[0] > 0.0) p[0] = 0.0;
    if (x[0] >= 0.5 - 1e-15 && g[0] < 0.0) p[0] = 0.0;
    return p;
  };

  DescentResult best;
  best.energy = std::numeric_limits<double>::infinity();
  const int starts = std::min<int>(mopts.multistart, static_cast<int>(scan.size()));
  std::vector<double> start_xs;
  for (int i = 0; i < starts; ++i) start_xs.push_back(scan[i].second);
  start_xs.push_back(0.0);  // both corners always participate
  start_xs.push_back(0.5);
  for (double x0 : start_xs) {
    Eigen::VectorXd x(1);
    x << x0;
    DescentResult r =
        descend(x, lambda, pot, admissible, project, mopts, opts, 2);
    if (r.energy < best.energy - 1e-15) best = r;
  }

  PhasePoint out;
  out.lambda = lambda;
  const double t = std::acos(std::clamp(best.x[0], 0.0, 0.5));
  out.parameter = Eigen::VectorXd::Constant(1, t);
  out.label = classify_2d(FamilyPoint2D{t});
  out.energy = best.energy;
  return out;
}

PhasePoint minimize_over_family_3d(double lambda, const PotentialSpec& pot,
                                   bool eight_bond_surface,
                                   const MinimizeOptions& mopts,
                                   const SumOptions& opts) {
  const auto admissible = [&](const Eigen::VectorXd& v) {
    const Eigen::Vector3d x(v[0], v[1], v[2]);
    if (eight_bond_surface && !on_eight_bond_surface(x, 1e-9)) return false;
    return admissible_3d(x, 1e-9);
  };
  const Eigen::Vector3d nrm = Eigen::Vector3d::Ones() / std::sqrt(3.0);
  const auto project = [&](const Eigen::VectorXd&, const Eigen::VectorXd& g) {
    if (!eight_bond_surface) return g;
    Eigen::Vector3d gg(g[0], g[1], g[2]);
    gg -= gg.dot(nrm) * nrm;
    return Eigen::VectorXd(gg);
  };

  std::vector<Eigen::Vector3d> seeds;
  if (eight_bond_surface) {
    seeds.push_back(bcc_coords());
    seeds.push_back(Eigen::Vector3d(-0.5, -0.5, 0.0));
  } else {
    seeds.push_back(sc_coords());
    seeds.push_back(bcc_coords());
    seeds.push_back(fcc_coords());
    seeds.push_back(Eigen::Vector3d(-0.5, -0.5, 0.0));
  }
  for (int i = 0; i < mopts.random_seeds_3d; ++i) {
    SplitMix64 rng(derive_seed(mopts.seed, 0x33445566ULL, i));
    seeds.push_back(eight_bond_surface ? sample_eight_bond_surface(rng)
                                       : sample_3d(rng));
  }

  // Two-stage multistart: every seed first descends under a small iteration
  // cap (most random starts drain into a basin another seed reaches anyway),
  // then only the most promising screened endpoints get the full budget.
  // Seeds are processed in a fixed order and selected purely by energy, so
  // the result is deterministic and independent of the thread count.
  MinimizeOptions screen = mopts;
  screen.max_iterations = std::min(mopts.max_iterations, 30);

  std::vector<DescentResult> screened;
  screened.reserve(seeds.size());
  for (const auto& seed : seeds) {
    if (!admissible(Eigen::VectorXd(seed))) continue;
    screened.push_back(descend(Eigen::VectorXd(seed), lambda, pot, admissible,
                               project, screen, opts, 3));
  }
  if (screened.empty()) {
    throw NoAdmissibleSeedError("no admissible seed for 3D minimization");
  }
  std::vector<std::size_t> order(screened.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return screened[a].energy < screened[b].energy;
                   });
  const std::size_t polish_count = std::min<std::size_t>(order.size(), 12);

  DescentResult best;
  best.energy = std::numeric_limits<double>::infinity();
  PhaseLabel best_label = PhaseLabel::Rhombic3D;
  bool have_best = false;
  for (std::size_t i = 0; i < polish_count; ++i) {
    DescentResult r = descend(screened[order[i]].x, lambda, pot, admissible,
                              project, mopts, opts, 3);
    const PhaseLabel label = classify_3d(Eigen::Vector3d(r.x), 1e-6, opts);
    if (!have_best || r.energy < best.energy - 1e-12) {
      best = r;
      best_label = label;
      have_best = true;
    } else if (std::abs(r.energy - best.energy) <= 1e-12 &&
               label_priority(label) < label_priority(best_label)) {
      best = r;  // tie: prefer the higher-symmetry label
      best_label = label;
    }
  }

  PhasePoint out;
  out.lambda = lambda;
  out.parameter = best.x;
  out.label = best_label;
  out.energy = best.energy;
  return out;
}

// ----------------------------------------------------------------------------
// Sweeps
// ----------------------------------------------------------------------------

std::vector<double> LambdaGrid::values() const {
  std::vector<double> v;
  if (!(step > 0.0) || stop < start - 1e-15) {
    throw std::invalid_argument("lambda grid requires start <= stop, step > 0");
  }
  // Round to the nearest count so both ends are represented within half a
  // step even when (stop - start) is not an exact multiple of step.
  const int n = static_cast<int>(std::llround((stop - start) / step));
  for (int i = 0; i <= n; ++i) v.push_back(start + i * step);
  return v;
}

int resolve_threads(int threads) {
  // The environment variable wins over an explicit request, which in turn
  // wins over the detected hardware parallelism.
  if (const char* env = std::getenv("LATTICE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  if (threads > 0) return threads;
  return std::max(1, omp_get_max_threads());
}

namespace {

std::vector<PhasePoint> run_sweep(int dim, const LambdaGrid& grid,
                                  const PotentialSpec& pot, int threads,
                                  const MinimizeOptions& mopts,
                                  const SumOptions& opts) {
  const std::vector<double> lambdas = grid.values();
  std::vector<PhasePoint> out(lambdas.size());
  const int nthreads = resolve_threads(threads);
  std::exception_ptr error;

  // Every iteration is self-contained (its own seeds, sums and refinement),
  // so the schedule cannot change any numeric result, only wall time.
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    try {
      MinimizeOptions local = mopts;
      local.seed = derive_seed(mopts.seed, 0x53574550ULL, i);
      out[i] = (dim == 2)
                   ? minimize_over_family_2d(lambdas[i], pot, local, opts)
                   : minimize_over_family_3d(lambdas[i], pot, false, local,
                                             opts);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace

std::vector<PhasePoint> sweep_2d(const LambdaGrid& grid,
                                 const PotentialSpec& pot, int threads,
                                 const MinimizeOptions& mopts,
                                 const SumOptions& opts) {
  return run_sweep(2, grid, pot, threads, mopts, opts);
}

std::vector<PhasePoint> sweep_3d(const LambdaGrid& grid,
                                 const PotentialSpec& pot, int threads,
                                 const MinimizeOptions& mopts,
                                 const SumOptions& opts) {
  return run_sweep(3, grid, pot, threads, mopts, opts);
}

// ----------------------------------------------------------------------------
// Transitions and the global optimum
// ----------------------------------------------------------------------------

TransitionReport find_transitions(const std::vector<PhasePoint>& sweep,
                                  int dim, const PotentialSpec& pot,
                                  double bracket_tol,
                                  const MinimizeOptions& mopts,
                                  const SumOptions& opts) {
  TransitionReport rep;
  const auto label_at = [&](double lambda) {
    MinimizeOptions local = mopts;
    local.seed = derive_seed(mopts.seed, 0x5452414eULL,
                             static_cast<std::uint64_t>(lambda * 1e9));
    return (dim == 2)
        ? minimize_over_family_2d(lambda, pot, local, opts).label
        : minimize_over_family_3d(lambda, pot, false, local, opts).label;
  };

  std::vector<PhaseLabel> closed;
  for (std::size_t i = 0; i + 1 < sweep.size(); ++i) {
    const PhaseLabel a = sweep[i].label;
    const PhaseLabel b = sweep[i + 1].label;
    if (a == b) continue;
    if (std::find(closed.begin(), closed.end(), b) != closed.end()) {
      rep.monotone_phases = false;
    }
    closed.push_back(a);

    double lo = sweep[i].lambda;
    double hi = sweep[i + 1].lambda;
    PhaseLabel lo_label = a;
    while (hi - lo > bracket_tol) {
      const double mid = 0.5 * (lo + hi);
      const PhaseLabel m = label_at(mid);
      if (m == lo_label) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    Transition tr;
    tr.from = a;
    tr.to = b;
    tr.lambda_star = 0.5 * (lo + hi);
    tr.bracket = {lo, hi};
    rep.transitions.push_back(tr);
  }
  return rep;
}

GlobalOptimum global_optimum(int dim, double lambda_lo, double lambda_hi,
                             const PotentialSpec& pot,
                             const MinimizeOptions& mopts,
                             const SumOptions& opts) {
  if (!(lambda_lo > 0.0) || !(lambda_hi > lambda_lo)) {
    throw std::invalid_argument("global_optimum requires 0 < lo < hi");
  }
  const auto value = [&](double lambda) {
    MinimizeOptions local = mopts;
    local.seed = derive_seed(mopts.seed, 0x474c4f42ULL,
                             static_cast<std::uint64_t>(lambda * 1e9));
    return (dim == 2)
        ? minimize_over_family_2d(lambda, pot, local, opts)
        : minimize_over_family_3d(lambda, pot, false, local, opts);
  };

  // Coarse bracket.
  const int n = 32;
  double best_lambda = lambda_lo;
  double best_energy = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double lam = lambda_lo + (lambda_hi - lambda_lo) * i / n;
    const double E = value(lam).energy;
    if (E < best_energy) {
      best_energy = E;
      best_lambda = lam;
    }
  }
  const double span = (lambda_hi - lambda_lo) / n;
  double lo = std::max(lambda_lo, best_lambda - span);
  double hi = std::min(lambda_hi, best_lambda + span);

  // Golden section on the family-minimized energy.
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  double fc = value(c).energy;
  double fd = value(d).energy;
  for (int iter = 0; iter < 120 && hi - lo > 1e-10; ++iter) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = value(c).energy;
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = value(d).energy;
    }
  }

  GlobalOptimum out;
  out.lambda_opt = 0.5 * (lo + hi);
  out.at = value(out.lambda_opt);
  return out;
}

}  // namespace laten
