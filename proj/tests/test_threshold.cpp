// ============================================================================
// test_threshold.cpp -- optimality thresholds for reference lattices
//
// Oracles: the two 2D thresholds admit closed-form limits at the punctured
// reference corner, computable from plain double sums:
//   * square reference: the optimal competitor ratio tends to the quotient of
//     second shear derivatives h_s = s(s+2) sum' m^2 n^2 (m^2+n^2)^(-s/2-2),
//     giving lambda_0 = (a h_12 / (b h_6))^(1/(2(p-q)));
//   * hexagonal reference: the first shear derivative at the corner equals
//     (s/3) zeta(s), so lambda_1 = (zeta(12)/zeta(6))^(1/6) for (1, 2)
//     coefficients.  The same quotient identity pins the 3D twelve-bond
//     threshold through the frozen face-centred zeta values.
// ============================================================================

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "latenergy/threshold.hpp"

using namespace laten;

namespace {

// Second derivative of the square-family zeta in the shear coordinate at the
// square corner, by brute-force double sum (tail ~ Q^{-3}, box 400 leaves
// ~1e-10 absolute).
double shear_second_derivative(double s) {
  const int box = 400;
  long double tot = 0.0L;
  for (int m = -box; m <= box; ++m) {
    for (int n = -box; n <= box; ++n) {
      if (m == 0 && n == 0) continue;
      const long double q = (long double)(m * m + n * n);
      tot += (long double)(m * m) * (n * n) *
             std::pow(q, (long double)(-s / 2.0 - 2.0));
    }
  }
  return static_cast<double>(s * (s + 2.0) * tot);
}

ThresholdQuery make_query(ThresholdMode mode, CanonicalLattice ref) {
  ThresholdQuery q;
  q.mode = mode;
  q.reference = ref;
  q.pot = LennardJones{6.0, 3.0, 1.0, 2.0};
  q.tol = 1e-6;
  return q;
}

constexpr double kZetaA2_6 = 6.375881552829821;
constexpr double kZetaA2_12 = 6.009813927966071;
constexpr double kZetaD3_6 = 14.453921043744424;
constexpr double kZetaD3_12 = 12.131880196544506;

}  // namespace

TEST_CASE("threshold: square lattice, closed-form corner limit") {
  const double h6 = shear_second_derivative(6.0);
  const double h12 = shear_second_derivative(12.0);
  const double oracle = std::pow(h12 / (2.0 * h6), 1.0 / 6.0);
  CHECK(oracle == doctest::Approx(0.7628674988406486).epsilon(1e-9));

  const ThresholdResult r =
      solve_threshold(make_query(ThresholdMode::Lambda0, CanonicalLattice::SC2));
  CHECK(std::abs(r.lambda_star - oracle) <= 2e-6);
  CHECK(r.attained_at_reference);  // optimum is the puncture limit
  CHECK(r.bracket[0] <= r.lambda_star);
  CHECK(r.lambda_star <= r.bracket[1]);
  CHECK(r.bracket[1] - r.bracket[0] <= 2.0000001e-6);
  REQUIRE(r.argmin.size() == 1);
  CHECK(r.argmin[0] == doctest::Approx(M_PI / 2.0).epsilon(1e-6));
}

TEST_CASE("threshold: hexagonal lattice, corner-derivative identity") {
  // The shear derivative of zeta at the hexagonal corner equals
  // (s/3) zeta(s): verify by Richardson-extrapolated finite differences.
  for (double s : {6.0, 12.0}) {
    auto zeta_c = [&](double c) {
      Eigen::Matrix2d g;
      g << 1.0, c, c, 1.0;
      SumOptions o;
      o.tol = 1e-12;
      return epstein_zeta(Lattice::from_gram(g), s, o).value;
    };
    const double h = 1e-3;
    const double d1 = (zeta_c(0.5 + h) - zeta_c(0.5 - h)) / (2.0 * h);
    const double d2 =
        (zeta_c(0.5 + h / 2) - zeta_c(0.5 - h / 2)) / h;
    const double deriv = (4.0 * d2 - d1) / 3.0;
    const double expect =
        (s / 3.0) * (s == 6.0 ? kZetaA2_6 : kZetaA2_12);
    CHECK(deriv == doctest::Approx(expect).epsilon(1e-8));
  }

  // That identity collapses the threshold to (zeta(12)/zeta(6))^(1/6).
  const double oracle = std::pow(kZetaA2_12 / kZetaA2_6, 1.0 / 6.0);
  const ThresholdResult r =
      solve_threshold(make_query(ThresholdMode::Lambda1, CanonicalLattice::A2));
  CHECK(std::abs(r.lambda_star - oracle) <= 2e-6);
  CHECK(r.attained_at_reference);
  CHECK(r.argmin[0] == doctest::Approx(M_PI / 3.0).epsilon(1e-6));
}

TEST_CASE("threshold: simple cubic, interior competitor") {
  const ThresholdResult r =
      solve_threshold(make_query(ThresholdMode::Lambda0, CanonicalLattice::SC3));
  CHECK(std::abs(r.lambda_star - 0.732478251681554) <= 2e-6);
  CHECK_FALSE(r.attained_at_reference);
  REQUIRE(r.argmin.size() == 3);
  // The tight competitor is a small uniform tilt away from the cube.
  for (int i = 0; i < 3; ++i) {
    CHECK(r.argmin[i] < -0.02);
    CHECK(r.argmin[i] > -0.06);
  }
}

TEST_CASE("threshold: eight-bond and twelve-bond references") {
  const ThresholdResult bcc = solve_threshold(
      make_query(ThresholdMode::Lambda0, CanonicalLattice::D3star));
  CHECK(std::abs(bcc.lambda_star - 0.91206801663548) <= 2e-6);
  CHECK_FALSE(bcc.attained_at_reference);
  CHECK(bcc.argmin.sum() == doctest::Approx(-1.0).epsilon(1e-8));

  const ThresholdResult fcc =
      solve_threshold(make_query(ThresholdMode::Lambda1, CanonicalLattice::D3));
  const double oracle = std::pow(kZetaD3_12 / kZetaD3_6, 1.0 / 6.0);
  CHECK(std::abs(fcc.lambda_star - oracle) <= 2e-6);
  CHECK(fcc.attained_at_reference);
  CHECK(fcc.bracket[1] - fcc.bracket[0] <= 2.0000001e-6);
}

TEST_CASE("threshold: coefficient scaling") {
  const LennardJones base{6.0, 3.0, 1.0, 2.0};
  // Equal coefficients scale the hexagonal threshold by 2^(1/6).
  const double lam = 0.9901936362880729;
  CHECK(threshold_scaling(lam, base, LennardJones{6.0, 3.0, 1.0, 1.0}) ==
        doctest::Approx(1.1114547772108165).epsilon(1e-12));
  // Identity scaling.
  CHECK(threshold_scaling(lam, base, base) == doctest::Approx(lam));
  // Doubling b divides by 2^(1/6).
  CHECK(threshold_scaling(lam, base, LennardJones{6.0, 3.0, 1.0, 4.0}) ==
        doctest::Approx(lam / std::pow(2.0, 1.0 / 6.0)).epsilon(1e-12));
}

TEST_CASE("threshold: wrong-extremum references throw SignError") {
  // The hexagonal lattice maximizes family zeta, so it cannot anchor the
  // small-lambda threshold, and vice versa for the square.
  CHECK_THROWS_AS(
      solve_threshold(make_query(ThresholdMode::Lambda0, CanonicalLattice::A2)),
      SignError);
  CHECK_THROWS_AS(
      solve_threshold(make_query(ThresholdMode::Lambda1, CanonicalLattice::SC2)),
      SignError);
  CHECK_THROWS_AS(
      solve_threshold(make_query(ThresholdMode::Lambda1, CanonicalLattice::SC3)),
      SignError);
}

TEST_CASE("threshold: unsupported references throw") {
  CHECK_THROWS_AS(
      solve_threshold(make_query(ThresholdMode::Lambda0, CanonicalLattice::SC1)),
      std::invalid_argument);
}
