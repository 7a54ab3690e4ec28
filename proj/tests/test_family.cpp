// ============================================================================
// test_family.cpp -- unit-bond families, admissibility, coordinates, samplers
//
// Oracles: closed-form Gram matrices, geometric admissibility arguments
// (difference vectors shorter than the generators), and invariance of the
// canonical lattices under change of basis (checked through theta and the
// covolume, which are basis-independent).
// ============================================================================

#include <cmath>

#include "doctest.h"
#include "latenergy/family.hpp"
#include "latenergy/potential.hpp"
#include "latenergy/sweep.hpp"

using namespace laten;

// ----------------------------------------------------------------------------
// 2D family
// ----------------------------------------------------------------------------

TEST_CASE("family 2d: gram matrices and canonical points") {
  CHECK(gram_2d(square_point()).isApprox(Eigen::Matrix2d::Identity(), 1e-14));
  Eigen::Matrix2d hex;
  hex << 1.0, 0.5, 0.5, 1.0;
  CHECK(gram_2d(triangular_point()).isApprox(hex, 1e-14));

  // Both generators are unit bonds for any point in the family.
  const FamilyPoint2D p{1.2};
  const Eigen::Matrix2d g = gram_2d(p);
  CHECK(g(0, 0) == doctest::Approx(1.0));
  CHECK(g(1, 1) == doctest::Approx(1.0));
  CHECK(g(0, 1) == doctest::Approx(std::cos(1.2)));
  CHECK(lattice_2d(p).gram().isApprox(g, 1e-14));

  // Scaling multiplies the Gram by lambda^2.
  CHECK(lattice_2d(p, 1.5).gram().isApprox(2.25 * g, 1e-14));
}

TEST_CASE("family 2d: admissibility window") {
  CHECK(admissible_2d(square_point()));
  CHECK(admissible_2d(triangular_point()));
  CHECK(admissible_2d(FamilyPoint2D{1.2}));
  // Below pi/3 the difference u1 - u2 is shorter than the generators.
  CHECK_FALSE(admissible_2d(FamilyPoint2D{1.0}));
  CHECK_FALSE(admissible_2d(FamilyPoint2D{0.2}));
}

TEST_CASE("family 2d: minimal vectors have unit length") {
  for (double t : {M_PI / 3.0, 1.2, 1.4, M_PI / 2.0}) {
    const Lattice L = lattice_2d(FamilyPoint2D{t});
    CHECK(minimal_vectors(L).r2 == doctest::Approx(1.0).epsilon(1e-12));
  }
}

// ----------------------------------------------------------------------------
// 3D family
// ----------------------------------------------------------------------------

TEST_CASE("family 3d: coordinates round-trip through angles") {
  const Eigen::Vector3d pts[] = {
      sc_coords(),
      bcc_coords(),
      Eigen::Vector3d(-0.2, 0.1, -0.3),
      Eigen::Vector3d(0.3, -0.4, -0.25),
  };
  for (const auto& x : pts) {
    const FamilyPoint3D p = family_point_from_coords(x);
    CHECK((gram_coords(p) - x).norm() <= 1e-10);
    CHECK(lattice_3d(p).gram().isApprox(gram_3d(x), 1e-10));
  }
}

TEST_CASE("family 3d: gram matrix, determinant, covolume") {
  const Eigen::Vector3d x(-0.2, 0.1, -0.3);
  const Eigen::Matrix3d g = gram_3d(x);
  CHECK(g(0, 0) == doctest::Approx(1.0));
  CHECK(g(1, 1) == doctest::Approx(1.0));
  CHECK(g(2, 2) == doctest::Approx(1.0));
  CHECK(g(0, 1) == doctest::Approx(x[0]));
  CHECK(g(0, 2) == doctest::Approx(x[1]));
  CHECK(g(1, 2) == doctest::Approx(x[2]));
  CHECK(gram_det_3d(x) == doctest::Approx(g.determinant()).epsilon(1e-12));
  const Lattice L = lattice_3d_coords(x);
  CHECK(L.covolume() * L.covolume() ==
        doctest::Approx(gram_det_3d(x)).epsilon(1e-12));
  // Scaling behaves like the 2D case.
  CHECK(lattice_3d_coords(x, 2.0).gram().isApprox(4.0 * g, 1e-12));
}

TEST_CASE("family 3d: admissibility") {
  CHECK(admissible_3d(sc_coords()));
  CHECK(admissible_3d(bcc_coords()));
  CHECK(admissible_3d(fcc_coords()));
  CHECK(admissible_3d(Eigen::Vector3d(-0.2, 0.1, -0.3)));
  // u1 - u2 has squared length 2 - 2 * 0.8 < 1.
  CHECK_FALSE(admissible_3d(Eigen::Vector3d(0.8, 0.0, 0.0)));
  // Shorter combined vector u1 - u2, u1 - u3, ... for strong uniform tilt.
  CHECK_FALSE(admissible_3d(Eigen::Vector3d(0.6, 0.6, 0.6)));
  // Not positive definite.
  CHECK_FALSE(admissible_3d(Eigen::Vector3d(-0.9, -0.9, -0.9)));
}

TEST_CASE("family 3d: canonical coordinates and the eight-bond surface") {
  CHECK(sc_coords().isApprox(Eigen::Vector3d::Zero(), 1e-14));
  CHECK(bcc_coords().isApprox(Eigen::Vector3d(-1.0 / 3, -1.0 / 3, -1.0 / 3),
                              1e-14));
  // The canonical face-centred representative uses the all-60-degree basis;
  // its surface representatives are the permutations of (-1/2, -1/2, 0).
  CHECK(fcc_coords().isApprox(Eigen::Vector3d(0.5, 0.5, 0.5), 1e-14));

  CHECK(on_eight_bond_surface(bcc_coords()));
  CHECK(on_eight_bond_surface(Eigen::Vector3d(-0.5, -0.5, 0.0)));
  CHECK(on_eight_bond_surface(Eigen::Vector3d(-0.4, -0.4, -0.2)));
  CHECK_FALSE(on_eight_bond_surface(sc_coords()));
  CHECK_FALSE(on_eight_bond_surface(fcc_coords()));
}

TEST_CASE("family 3d: canonical points produce the canonical lattices") {
  // The family bases differ from the canonical ones, so compare through
  // basis-independent quantities.
  const Lattice sc = lattice_3d_coords(sc_coords());
  CHECK(sc.gram().isApprox(Eigen::Matrix3d::Identity(), 1e-12));

  const Lattice bcc = lattice_3d_coords(bcc_coords());
  const Lattice bcc_ref = canonical(CanonicalLattice::D3star);
  CHECK(bcc.covolume() == doctest::Approx(bcc_ref.covolume()).epsilon(1e-12));
  CHECK(theta(bcc, 1.0).value ==
        doctest::Approx(theta(bcc_ref, 1.0).value).epsilon(1e-10));

  const Lattice fcc = lattice_3d_coords(fcc_coords());
  const Lattice fcc_ref = canonical(CanonicalLattice::D3);
  CHECK(fcc.gram().isApprox(fcc_ref.gram(), 1e-12));

  // The surface representative (-1/2, -1/2, 0) is the same lattice in a
  // different basis: equal covolume and theta.
  const Lattice fcc_surf = lattice_3d_coords(Eigen::Vector3d(-0.5, -0.5, 0.0));
  CHECK(fcc_surf.covolume() ==
        doctest::Approx(fcc_ref.covolume()).epsilon(1e-12));
  CHECK(theta(fcc_surf, 1.0).value ==
        doctest::Approx(theta(fcc_ref, 1.0).value).epsilon(1e-10));
}

// ----------------------------------------------------------------------------
// Samplers
// ----------------------------------------------------------------------------

TEST_CASE("samplers: deterministic, admissible, inside the family windows") {
  SplitMix64 rng_a(42);
  SplitMix64 rng_b(42);
  for (int i = 0; i < 200; ++i) {
    const FamilyPoint2D p = sample_2d(rng_a);
    const FamilyPoint2D q = sample_2d(rng_b);
    CHECK(p.t == q.t);
    CHECK(admissible_2d(p));
    CHECK(p.t >= M_PI / 3.0 - 1e-12);
    CHECK(p.t <= M_PI / 2.0 + 1e-12);
  }
  SplitMix64 rng_c(7);
  SplitMix64 rng_d(7);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d x = sample_3d(rng_c);
    CHECK(x == sample_3d(rng_d));
    CHECK(admissible_3d(x));
  }
  SplitMix64 rng_e(99);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d x = sample_eight_bond_surface(rng_e);
    CHECK(admissible_3d(x));
    CHECK(on_eight_bond_surface(x));
  }
}

// ----------------------------------------------------------------------------
// Classification
// ----------------------------------------------------------------------------

TEST_CASE("classification: canonical points get their names back") {
  CHECK(classify_2d(square_point()) == PhaseLabel::Square);
  CHECK(classify_2d(triangular_point()) == PhaseLabel::Triangular);
  CHECK(classify_2d(FamilyPoint2D{1.2}) == PhaseLabel::Rhombic2D);

  CHECK(classify_3d(sc_coords()) == PhaseLabel::SC);
  CHECK(classify_3d(bcc_coords()) == PhaseLabel::BCC);
  CHECK(classify_3d(fcc_coords()) == PhaseLabel::FCC);
  // Any face-centred representative classifies the same way.
  CHECK(classify_3d(Eigen::Vector3d(0.0, -0.5, -0.5)) == PhaseLabel::FCC);
  CHECK(classify_3d(Eigen::Vector3d(-0.2, -0.2, -0.2)) == PhaseLabel::Rhombic3D);

  CHECK(phase_name(PhaseLabel::Square) == doctest::String("square"));
  CHECK(phase_name(PhaseLabel::FCC) == doctest::String("fcc"));
}
