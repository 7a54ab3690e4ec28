// ============================================================================
// test_structure.cpp -- shell moments, eutaxy, criticality, constrained
// Hessians
//
// Oracles: hand-computed shell second moments for the canonical lattices,
// the exact trace identity trace(V_real) = count * r2, finite differences
// for the theta gradient, and symmetry arguments fixing which reports must
// come back positive/negative.
// ============================================================================

#include <cmath>

#include "doctest.h"
#include "latenergy/family.hpp"
#include "latenergy/structure.hpp"

using namespace laten;

namespace {

SumOptions tight_opts() {
  SumOptions o;
  o.tol = 1e-12;
  return o;
}

}  // namespace

// ----------------------------------------------------------------------------
// Shell moments
// ----------------------------------------------------------------------------

TEST_CASE("shell moments: hand-checked values on the square lattice") {
  const auto mom = shell_moments(canonical(CanonicalLattice::SC2), 2);
  REQUIRE(mom.size() == 2);

  // Shell 1: {(+-1,0), (0,+-1)}, W = 2I, rho = 1/2 against A^{-1} = I.
  CHECK(mom[0].shell_index == 1);
  CHECK(mom[0].r2 == doctest::Approx(1.0));
  CHECK(mom[0].count == 4);
  CHECK(mom[0].W_int.isApprox(2.0 * Eigen::Matrix2d::Identity(), 1e-12));
  CHECK(mom[0].V_real.isApprox(2.0 * Eigen::Matrix2d::Identity(), 1e-10));
  REQUIRE(mom[0].rho.has_value());
  CHECK(*mom[0].rho == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(mom[0].deviation <= 1e-10);

  // Shell 2: {(+-1,+-1)}, W = 4I, rho = 1/4.
  CHECK(mom[1].r2 == doctest::Approx(2.0));
  CHECK(mom[1].count == 4);
  CHECK(mom[1].W_int.isApprox(4.0 * Eigen::Matrix2d::Identity(), 1e-12));
  REQUIRE(mom[1].rho.has_value());
  CHECK(*mom[1].rho == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("shell moments: hand-checked values on the hexagonal lattice") {
  const auto mom = shell_moments(canonical(CanonicalLattice::A2), 1);
  REQUIRE(mom.size() == 1);
  CHECK(mom[0].count == 6);

  // Bonds +-(1,0), +-(0,1), +-(1,-1) give W = [[4,-2],[-2,4]]; with
  // A^{-1} = (4/3, -2/3; -2/3, 4/3) the fit is rho = 1/3, and in real
  // coordinates the moment is (count * r2 / d) I = 3I.
  Eigen::Matrix2d expect_w;
  expect_w << 4.0, -2.0, -2.0, 4.0;
  CHECK(mom[0].W_int.isApprox(expect_w, 1e-12));
  CHECK(mom[0].V_real.isApprox(3.0 * Eigen::Matrix2d::Identity(), 1e-10));
  REQUIRE(mom[0].rho.has_value());
  CHECK(*mom[0].rho == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("shell moments: trace identity trace(V) = count * r2") {
  for (CanonicalLattice which :
       {CanonicalLattice::SC2, CanonicalLattice::A2, CanonicalLattice::SC3,
        CanonicalLattice::D3, CanonicalLattice::D3star}) {
    const auto mom = shell_moments(canonical(which, 1.1), 5);
    REQUIRE(mom.size() == 5);
    for (const auto& s : mom) {
      CHECK(s.V_real.trace() ==
            doctest::Approx(s.count * s.r2).epsilon(1e-10));
      CHECK(s.W_int.isApprox(s.W_int.transpose(), 1e-12));
    }
  }
}

TEST_CASE("shell moments: low-symmetry shells are not proportional") {
  // A generic Gram matrix has rank-one first-shell moment: no rho fits.
  Eigen::Matrix2d g;
  g << 1.1, 0.2, 0.2, 0.9;
  const auto mom = shell_moments(Lattice::from_gram(g), 1);
  REQUIRE(mom.size() == 1);
  CHECK(mom[0].count == 2);
  CHECK_FALSE(mom[0].rho.has_value());
  CHECK(mom[0].deviation > 1e-3);
}

// ----------------------------------------------------------------------------
// Eutaxy
// ----------------------------------------------------------------------------

TEST_CASE("eutaxy: canonical lattices are strongly eutactic") {
  // Each canonical point group acts irreducibly, so every shell's second
  // moment is forced to be a multiple of A^{-1}.
  for (CanonicalLattice which :
       {CanonicalLattice::SC2, CanonicalLattice::A2, CanonicalLattice::SC3,
        CanonicalLattice::D3, CanonicalLattice::D3star}) {
    const EutaxyReport rep = check_strong_eutaxy(canonical(which), 6);
    CHECK(rep.is_strongly_eutactic);
    CHECK(rep.shells_checked == 6);
    CHECK(rep.moments.size() == 6);
    CHECK(rep.max_deviation <= 1e-8);
  }
}

TEST_CASE("eutaxy: a sheared rhombic lattice is not strongly eutactic") {
  const Lattice L = lattice_2d(FamilyPoint2D{1.2});
  const EutaxyReport rep = check_strong_eutaxy(L, 3);
  CHECK_FALSE(rep.is_strongly_eutactic);
  CHECK(rep.max_deviation > 1e-2);
}

// ----------------------------------------------------------------------------
// Criticality
// ----------------------------------------------------------------------------

TEST_CASE("criticality: theta gradient matches finite differences") {
  const Lattice L = lattice_2d(FamilyPoint2D{1.2});
  const double alpha = 0.8;
  const CriticalityReport rep =
      check_critical_point(L, canonical_bonds(CanonicalLattice::SC2), alpha,
                           1e-8, tight_opts());
  // d theta / d A_ij along the symmetric perturbation E_ij + E_ji equals
  // -pi alpha (2 - delta_ij) G_ij for the reported G.
  const double h = 1e-5;
  for (int i = 0; i < 2; ++i) {
    for (int j = i; j < 2; ++j) {
      Eigen::Matrix2d S = Eigen::Matrix2d::Zero();
      S(i, j) += 1.0;
      S(j, i) += 1.0;
      if (i == j) S(i, i) = 1.0;
      const double tp =
          theta(Lattice::from_gram(L.gram() + h * S), alpha, tight_opts())
              .value;
      const double tm =
          theta(Lattice::from_gram(L.gram() - h * S), alpha, tight_opts())
              .value;
      const double fd = (tp - tm) / (2.0 * h);
      const double analytic =
          -M_PI * alpha * (i == j ? 1.0 : 2.0) * rep.gradient(i, j);
      CHECK(fd == doctest::Approx(analytic).epsilon(1e-6));
    }
  }
}

TEST_CASE("criticality: canonical lattices are critical for their bonds") {
  for (CanonicalLattice which :
       {CanonicalLattice::SC2, CanonicalLattice::A2, CanonicalLattice::SC3,
        CanonicalLattice::D3, CanonicalLattice::D3star}) {
    for (double alpha : {0.25, 1.0, 4.0}) {
      const CriticalityReport rep =
          check_critical_point(canonical(which), canonical_bonds(which), alpha);
      CHECK(rep.critical);
      CHECK(rep.residual <= 1e-8);
    }
  }
}

TEST_CASE("criticality: a sheared lattice fails the square-bond test") {
  // The t = 1.2 rhombic lattice has nonzero off-diagonal theta gradient,
  // which the diagonal span of the 4-bond set cannot absorb.
  const Lattice L = lattice_2d(FamilyPoint2D{1.2});
  const CriticalityReport rep =
      check_critical_point(L, canonical_bonds(CanonicalLattice::SC2), 1.0);
  CHECK_FALSE(rep.critical);
  CHECK(rep.residual > 1e-3);
}

// ----------------------------------------------------------------------------
// Constrained Hessian
// ----------------------------------------------------------------------------

TEST_CASE("hessian: rigid bond sets throw DegenerateTangentError") {
  // Six bonds in 2D (A2) and twelve in 3D (D3) pin the Gram matrix entirely.
  CHECK_THROWS_AS(
      constrained_theta_hessian_pd(canonical(CanonicalLattice::A2),
                                   canonical_bonds(CanonicalLattice::A2), 1.0),
      DegenerateTangentError);
  CHECK_THROWS_AS(
      constrained_theta_hessian_pd(canonical(CanonicalLattice::D3),
                                   canonical_bonds(CanonicalLattice::D3), 1.0),
      DegenerateTangentError);
}

TEST_CASE("hessian: positive definite on the nontrivial tangent spaces") {
  struct Row {
    CanonicalLattice which;
    int tangent_dim;
  };
  // 4 bonds in 2D leave the off-diagonal direction (dim 1); 6 bonds in 3D
  // leave the three off-diagonals (dim 3); 8 bonds leave dim 2.
  const Row rows[] = {
      {CanonicalLattice::SC2, 1},
      {CanonicalLattice::SC3, 3},
      {CanonicalLattice::D3star, 2},
  };
  for (const Row& r : rows) {
    for (double alpha : {0.5, 1.0, 2.0}) {
      const HessianReport rep = constrained_theta_hessian_pd(
          canonical(r.which), canonical_bonds(r.which), alpha);
      CHECK(rep.tangent_dim == r.tangent_dim);
      CHECK(rep.positive_definite);
      CHECK(rep.min_eigenvalue > 0.0);
      // No probe direction may undercut the smallest eigenvalue.
      CHECK(rep.min_probe_value >= rep.min_eigenvalue - 1e-9);
    }
  }
}

TEST_CASE("hessian: probe values are deterministic in the seed") {
  const HessianReport a = constrained_theta_hessian_pd(
      canonical(CanonicalLattice::SC3), canonical_bonds(CanonicalLattice::SC3),
      1.0, 50, 1234);
  const HessianReport b = constrained_theta_hessian_pd(
      canonical(CanonicalLattice::SC3), canonical_bonds(CanonicalLattice::SC3),
      1.0, 50, 1234);
  CHECK(a.min_probe_value == b.min_probe_value);
  CHECK(a.min_eigenvalue == b.min_eigenvalue);
}
