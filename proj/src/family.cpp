// ============================================================================
// family.cpp -- unit-bond family parametrizations and samplers
// ============================================================================

#include "latenergy/family.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace laten {

namespace {

constexpr double kPi = std::numbers::pi;

// Any admissible 3D point satisfies det A >= 1/2 (the densest-packing bound
// for unit minimal distance); rejecting below 0.3 keeps the minimality
// enumeration well conditioned without excluding anything admissible.
constexpr double kDetFloor = 0.3;

}  // namespace

// --- 2D ---------------------------------------------------------------------

Eigen::Matrix2d gram_2d(const FamilyPoint2D& p) {
  const double c = std::cos(p.t);
  Eigen::Matrix2d A;
  A << 1.0, c, c, 1.0;
  return A;
}

Lattice lattice_2d(const FamilyPoint2D& p, double lambda) {
  Eigen::Matrix2d B;
  B << 1.0, 0.0, std::cos(p.t), std::sin(p.t);
  return Lattice::from_basis(lambda * B);
}

bool admissible_2d(const FamilyPoint2D& p, double tol) {
  return p.t >= kPi / 3.0 - tol && p.t <= kPi / 2.0 + tol;
}

FamilyPoint2D square_point() { return FamilyPoint2D{kPi / 2.0}; }
FamilyPoint2D triangular_point() { return FamilyPoint2D{kPi / 3.0}; }

FamilyPoint2D sample_2d(SplitMix64& rng) {
  return FamilyPoint2D{rng.uniform(kPi / 3.0, kPi / 2.0)};
}

// --- 3D ---------------------------------------------------------------------

Eigen::Vector3d gram_coords(const FamilyPoint3D& p) {
  const double st = std::sin(p.theta);
  return Eigen::Vector3d(std::cos(p.t), st * std::cos(p.phi),
                         st * std::cos(p.t - p.phi));
}

FamilyPoint3D family_point_from_coords(const Eigen::Vector3d& x) {
  const double x1 = std::clamp(x[0], -1.0, 1.0);
  const double t = std::acos(x1);
  const double st = std::sin(t);
  const double det = gram_det_3d(x);
  const double ct3 = std::sqrt(std::max(det, 0.0)) / st;  // cos(theta) >= 0
  const double a = x[1];                       // sin(theta) cos(phi)
  const double b = (x[2] - x[0] * x[1]) / st;  // sin(theta) sin(phi)
  FamilyPoint3D p;
  p.t = t;
  p.theta = std::atan2(std::hypot(a, b), ct3);
  p.phi = std::atan2(b, a);
  return p;
}

Eigen::Matrix3d gram_3d(const Eigen::Vector3d& x) {
  Eigen::Matrix3d A;
  A << 1.0, x[0], x[1], x[0], 1.0, x[2], x[1], x[2], 1.0;
  return A;
}

double gram_det_3d(const Eigen::Vector3d& x) {
  return 1.0 + 2.0 * x[0] * x[1] * x[2] - x[0] * x[0] - x[1] * x[1] -
         x[2] * x[2];
}

Lattice lattice_3d(const FamilyPoint3D& p, double lambda) {
  return lattice_3d_coords(gram_coords(p), lambda);
}

Lattice lattice_3d_coords(const Eigen::Vector3d& x, double lambda) {
  return Lattice::from_gram(lambda * lambda * gram_3d(x));
}

bool admissible_3d(const Eigen::Vector3d& x, double tol) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(x[i]) > 0.5 + tol) return false;
  }
  if (gram_det_3d(x) < kDetFloor) return false;
  const Lattice L = lattice_3d_coords(x);
  return minimal_vectors(L).r2 >= 1.0 - std::max(tol, 1e-12);
}

bool on_eight_bond_surface(const Eigen::Vector3d& x, double tol) {
  return std::abs(x.sum() + 1.0) <= tol;
}

FamilyPoint3D sc_point() { return FamilyPoint3D{kPi / 2.0, 0.0, 0.0}; }

FamilyPoint3D fcc_point() {
  return FamilyPoint3D{kPi / 3.0, std::asin(1.0 / std::sqrt(3.0)), kPi / 6.0};
}

FamilyPoint3D bcc_point() { return family_point_from_coords(bcc_coords()); }

Eigen::Vector3d sc_coords() { return Eigen::Vector3d::Zero(); }
Eigen::Vector3d fcc_coords() { return Eigen::Vector3d(0.5, 0.5, 0.5); }
Eigen::Vector3d bcc_coords() {
  return Eigen::Vector3d(-1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0);
}

Eigen::Vector3d sample_3d(SplitMix64& rng) {
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Eigen::Vector3d x(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                      rng.uniform(-0.5, 0.5));
    if (admissible_3d(x)) return x;
  }
  throw NoAdmissibleSeedError("rejection sampling found no admissible point");
}

Eigen::Vector3d sample_eight_bond_surface(SplitMix64& rng) {
  // Orthonormal frame of the plane sum(x) = -1.  The admissible patch is the
  // triangle spanned by the three face-centred representatives (circumradius
  // sqrt(1/6) around the body-centred point).
  const Eigen::Vector3d center = bcc_coords();
  const Eigen::Vector3d d1 =
      Eigen::Vector3d(1.0, -1.0, 0.0) / std::sqrt(2.0);
  const Eigen::Vector3d d2 =
      Eigen::Vector3d(1.0, 1.0, -2.0) / std::sqrt(6.0);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double u = rng.uniform(-0.45, 0.45);
    const double v = rng.uniform(-0.45, 0.45);
    const Eigen::Vector3d x = center + u * d1 + v * d2;
    if (admissible_3d(x)) return x;
  }
  throw NoAdmissibleSeedError(
      "rejection sampling found no admissible surface point");
}

}  // namespace laten
