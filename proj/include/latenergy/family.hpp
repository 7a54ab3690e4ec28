#pragma once
// ============================================================================
// family.hpp -- the unit-bond lattice families searched by the solvers
//
// 2D: basis u1 = (1, 0), u2 = (cos t, sin t), t in [pi/3, pi/2].  Both basis
//     vectors are unit bonds; t = pi/2 is the square lattice, t = pi/3 the
//     triangular one.
//
// 3D: three unit vectors with pairwise angles (t, theta, phi) as
//     u1 = (1,0,0), u2 = (cos t, sin t, 0),
//     u3 = (sin theta cos phi, sin theta sin phi, cos theta).
//     Internally the family is handled through the off-diagonal Gram
//     coordinates x = (u1.u2, u1.u3, u2.u3), which makes admissibility and
//     the fixed-trace constraint surfaces linear/polynomial and removes the
//     phi coordinate singularity at theta = 0.
//
// A family point is *admissible* when the three generators are genuinely
// minimal vectors: Q is positive definite and no nonzero lattice vector is
// shorter than 1.
// ============================================================================

#include <optional>

#include "latenergy/lattice.hpp"

namespace laten {

struct FamilyPoint2D {
  double t = 0.0;  // angle between the two unit generators
};

struct FamilyPoint3D {
  double t = 0.0;      // angle(u1, u2)
  double theta = 0.0;  // polar angle of u3 measured from the z-axis
  double phi = 0.0;    // azimuth of u3
};

// --- 2D ---------------------------------------------------------------------

Eigen::Matrix2d gram_2d(const FamilyPoint2D& p);
Lattice lattice_2d(const FamilyPoint2D& p, double lambda = 1.0);
bool admissible_2d(const FamilyPoint2D& p, double tol = 1e-9);

// --- 3D ---------------------------------------------------------------------

// Off-diagonal Gram coordinates x = (a12, a13, a23) of a 3D family point.
Eigen::Vector3d gram_coords(const FamilyPoint3D& p);

// Inverse map; requires det A(x) >= 0 (cos theta is taken >= 0, which is the
// reflection-gauge every lattice in the family admits).
FamilyPoint3D family_point_from_coords(const Eigen::Vector3d& x);

Eigen::Matrix3d gram_3d(const Eigen::Vector3d& x);
double gram_det_3d(const Eigen::Vector3d& x);

Lattice lattice_3d(const FamilyPoint3D& p, double lambda = 1.0);
Lattice lattice_3d_coords(const Eigen::Vector3d& x, double lambda = 1.0);

// Admissibility of x: positive definite, and the unit generators are minimal
// (no lattice vector with Q < 1 - tol).
bool admissible_3d(const Eigen::Vector3d& x, double tol = 1e-9);

// Fixed-bond-count constraint surfaces inside the 3D family, identified by
// the trace of the off-diagonal coordinates.  sum(x) = -1 carries the
// 8-bond family (the body-centred lattice sits at x = (-1/3,-1/3,-1/3), the
// face-centred representatives at permutations of (-1/2,-1/2,0)).
bool on_eight_bond_surface(const Eigen::Vector3d& x, double tol = 1e-9);

// Canonical family points.
FamilyPoint2D square_point();      // t = pi/2
FamilyPoint2D triangular_point();  // t = pi/3
FamilyPoint3D sc_point();
FamilyPoint3D fcc_point();
FamilyPoint3D bcc_point();
Eigen::Vector3d sc_coords();
Eigen::Vector3d fcc_coords();
Eigen::Vector3d bcc_coords();

// Rejection samplers for random admissible points (deterministic given rng).
FamilyPoint2D sample_2d(SplitMix64& rng);
Eigen::Vector3d sample_3d(SplitMix64& rng);
Eigen::Vector3d sample_eight_bond_surface(SplitMix64& rng);

}  // namespace laten
