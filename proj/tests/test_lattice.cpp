// ============================================================================
// test_lattice.cpp -- lattices, shell decompositions, bond constraints
//
// The oracle used throughout is an independent brute-force box enumeration:
// all integer vectors in |m_i| <= N are binned by quadratic-form value with
// no shared code with the Fincke-Pohst walk under test.
// ============================================================================

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "latenergy/lattice.hpp"

using namespace laten;

namespace {

// Brute-force shell oracle: counts per squared length (quantized to 1e-9
// relative, matching the library's shell-merge rule).
std::map<long long, int> box_shell_counts(const Eigen::MatrixXd& gram,
                                          double r2_max, int box) {
  const int d = static_cast<int>(gram.rows());
  std::map<long long, int> counts;
  std::vector<int> m(d, -box);
  while (true) {
    bool zero = true;
    for (int v : m) zero &= (v == 0);
    if (!zero) {
      double q = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) q += gram(i, j) * m[i] * m[j];
      if (q <= r2_max * (1.0 + 1e-12)) {
        counts[static_cast<long long>(std::llround(q * 1e6))]++;
      }
    }
    int k = 0;
    while (k < d && m[k] == box) m[k++] = -box;
    if (k == d) break;
    ++m[k];
  }
  return counts;
}

}  // namespace

TEST_CASE("canonical lattices: dimension, covolume, minimal shell") {
  struct Row {
    CanonicalLattice which;
    int dim;
    int kissing;
    double covolume;  // at bond length 1
  };
  const Row rows[] = {
      {CanonicalLattice::SC1, 1, 2, 1.0},
      {CanonicalLattice::SC2, 2, 4, 1.0},
      {CanonicalLattice::A2, 2, 6, std::sqrt(3.0) / 2.0},
      {CanonicalLattice::SC3, 3, 6, 1.0},
      {CanonicalLattice::D3, 3, 12, std::sqrt(2.0) / 2.0},
      {CanonicalLattice::D3star, 3, 8, 4.0 / (3.0 * std::sqrt(3.0))},
  };
  for (const Row& row : rows) {
    const Lattice L = canonical(row.which);
    CHECK(L.dim() == row.dim);
    CHECK(L.covolume() == doctest::Approx(row.covolume).epsilon(1e-12));
    const Shell s = minimal_vectors(L);
    CHECK(s.count() == row.kissing);
    CHECK(s.r2 == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("canonical lattices scale with the bond length") {
  for (auto which : {CanonicalLattice::SC2, CanonicalLattice::A2,
                     CanonicalLattice::D3, CanonicalLattice::D3star}) {
    const Lattice L1 = canonical(which, 1.0);
    const Lattice L2 = canonical(which, 2.0);
    const Shell s = minimal_vectors(L2);
    CHECK(s.r2 == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(s.count() == minimal_vectors(L1).count());
    CHECK(L2.covolume() ==
          doctest::Approx(std::pow(2.0, L1.dim()) * L1.covolume())
              .epsilon(1e-12));
  }
}

TEST_CASE("from_gram reproduces the Gram matrix; embed matches Q") {
  Eigen::Matrix3d A;
  A << 1.0, -0.3, 0.1, -0.3, 1.0, -0.45, 0.1, -0.45, 1.0;
  const Lattice L = Lattice::from_gram(A);
  CHECK((L.gram() - A).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((L.gram() * L.gram_inverse() - Eigen::Matrix3d::Identity())
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK(L.covolume() == doctest::Approx(std::sqrt(A.determinant())));

  SplitMix64 rng(42);
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::VectorXi m(3);
    for (int i = 0; i < 3; ++i)
      m[i] = static_cast<int>(rng.uniform(-6.0, 7.0));
    const double q = L.quadratic_form(m);
    const double q_byhand = m.cast<double>().transpose() * A * m.cast<double>();
    CHECK(q == doctest::Approx(q_byhand).epsilon(1e-12));
    CHECK(L.embed(m).squaredNorm() == doctest::Approx(q).epsilon(1e-10));
  }
}

TEST_CASE("singular or non-positive inputs are rejected") {
  Eigen::Matrix2d B;
  B << 1.0, 2.0, 2.0, 4.0;  // rank 1
  CHECK_THROWS_AS((void)Lattice::from_basis(B), SingularBasisError);
  Eigen::Matrix2d A;
  A << 1.0, 1.2, 1.2, 1.0;  // indefinite
  CHECK_THROWS_AS((void)Lattice::from_gram(A), SingularBasisError);
}

TEST_CASE("shells match the brute-force box oracle") {
  const double r2_max = 25.0;
  for (auto which : {CanonicalLattice::SC2, CanonicalLattice::A2,
                     CanonicalLattice::SC3, CanonicalLattice::D3,
                     CanonicalLattice::D3star}) {
    const Lattice L = canonical(which);
    const ShellDecomposition dec = shells(L, r2_max);
    // Box size: |m| <= 12 covers Q <= 25 for every canonical Gram here
    // because the smallest Gram eigenvalue is >= 1/4.
    const auto oracle = box_shell_counts(L.gram(), r2_max, 12);
    REQUIRE(dec.shells.size() == oracle.size());
    std::size_t i = 0;
    for (const auto& [key, count] : oracle) {
      CHECK(std::llround(dec.shells[i].r2 * 1e6) == key);
      CHECK(dec.shells[i].count() == count);
      ++i;
    }
  }
}

TEST_CASE("shell contents: sorted, sign-symmetric, consistent lengths") {
  const Lattice L = canonical(CanonicalLattice::A2);
  const ShellDecomposition dec = shells(L, 9.0);
  double prev = 0.0;
  for (const Shell& s : dec.shells) {
    CHECK(s.r2 > prev);
    prev = s.r2;
    CHECK(s.count() % 2 == 0);
    for (const auto& m : s.vectors) {
      CHECK(L.quadratic_form(m) == doctest::Approx(s.r2).epsilon(1e-9));
      CHECK(std::find(s.vectors.begin(), s.vectors.end(), -m) !=
            s.vectors.end());
    }
    CHECK(std::is_sorted(s.vectors.begin(), s.vectors.end(),
                         [](const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
                           return std::lexicographical_compare(
                               a.data(), a.data() + a.size(), b.data(),
                               b.data() + b.size());
                         }));
  }
}

TEST_CASE("first_shells grows until n shells are present") {
  const Lattice L = canonical(CanonicalLattice::SC3);
  const ShellDecomposition dec = first_shells(L, 5);
  REQUIRE(dec.shells.size() >= 5);
  // Z^3 squared lengths: 1, 2, 3, 4, 5 with counts 6, 12, 8, 6, 24.
  const int counts[] = {6, 12, 8, 6, 24};
  for (int i = 0; i < 5; ++i) {
    CHECK(dec.shells[i].r2 == doctest::Approx(i + 1.0).epsilon(1e-12));
    CHECK(dec.shells[i].count() == counts[i]);
  }
  CHECK(minimal_vectors(L).count() == 6);
}

TEST_CASE("enumeration budget is enforced") {
  const Lattice L = canonical(CanonicalLattice::SC2);
  SumOptions tiny;
  tiny.budget = 10;
  CHECK_THROWS_AS((void)shells(L, 400.0, tiny), CutoffTooLargeError);
}

TEST_CASE("constraint-class membership") {
  const Lattice sq = canonical(CanonicalLattice::SC2);
  const Lattice tri = canonical(CanonicalLattice::A2);
  const BondConstraint sq_bonds = canonical_bonds(CanonicalLattice::SC2);
  const BondConstraint tri_bonds = canonical_bonds(CanonicalLattice::A2);

  CHECK(in_constraint_class(sq, sq_bonds, /*strict=*/true));
  CHECK(in_constraint_class(tri, tri_bonds, /*strict=*/true));

  // The triangular lattice carries the two unit generators of the square
  // bond set (closure membership) but has six minimal vectors, so it fails
  // the strict test.
  CHECK(in_constraint_class(tri, sq_bonds, /*strict=*/false));
  CHECK_FALSE(in_constraint_class(tri, sq_bonds, /*strict=*/true));

  // Wrong bond length: the unit lattice does not satisfy lambda = 2 bonds.
  const BondConstraint long_bonds = canonical_bonds(CanonicalLattice::SC2, 2.0);
  CHECK_FALSE(in_constraint_class(sq, long_bonds));
  CHECK(in_constraint_class(canonical(CanonicalLattice::SC2, 2.0), long_bonds,
                            /*strict=*/true));

  // A lattice with a vector shorter than the prescribed bond is outside.
  Eigen::Matrix2d A;
  A << 0.64, 0.0, 0.0, 1.0;
  CHECK_FALSE(in_constraint_class(Lattice::from_gram(A), sq_bonds));
}

TEST_CASE("canonical bond sets are sign-symmetric and have the right size") {
  const int sizes[] = {2, 4, 6, 6, 12, 8};
  const CanonicalLattice all[] = {CanonicalLattice::SC1, CanonicalLattice::SC2,
                                  CanonicalLattice::A2, CanonicalLattice::SC3,
                                  CanonicalLattice::D3, CanonicalLattice::D3star};
  for (int i = 0; i < 6; ++i) {
    const BondConstraint bc = canonical_bonds(all[i]);
    const Lattice L = canonical(all[i]);
    CHECK(static_cast<int>(bc.vectors.size()) == sizes[i]);
    for (const auto& m : bc.vectors) {
      CHECK(L.quadratic_form(m) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::find(bc.vectors.begin(), bc.vectors.end(), -m) !=
            bc.vectors.end());
    }
  }
}
