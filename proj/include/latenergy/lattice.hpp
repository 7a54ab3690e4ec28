#pragma once
// ============================================================================
// lattice.hpp -- lattices, shell decompositions, bond constraint classes
//
// A rank-d lattice is stored by a row-basis B (row i = generator u_i) together
// with its Gram matrix A = B B^T.  All quadratic-form evaluations use integer
// coordinate vectors m, Q(m) = m^T A m, which keeps shell grouping stable.
// ============================================================================

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "latenergy/common.hpp"

namespace laten {

class Lattice {
 public:
  // Build from a row-basis; throws SingularBasisError if the rows are
  // (numerically) linearly dependent.
  static Lattice from_basis(const Eigen::MatrixXd& basis);

  // Build from a symmetric positive definite Gram matrix; the stored basis is
  // the lower Cholesky factor, so gram() reproduces the input.
  static Lattice from_gram(const Eigen::MatrixXd& gram);

  int dim() const { return static_cast<int>(basis_.rows()); }
  const Eigen::MatrixXd& basis() const { return basis_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::MatrixXd& gram_inverse() const { return gram_inv_; }
  double covolume() const { return covolume_; }

  // Extreme eigenvalues of the Gram matrix (used for enumeration bounds and
  // truncation estimates).
  double gram_eig_min() const { return eig_min_; }
  double gram_eig_max() const { return eig_max_; }

  // Q(m) = m^T A m for an integer coordinate vector.
  double quadratic_form(const Eigen::VectorXi& m) const;

  // Real-space embedding of an integer coordinate vector: p = B^T m.
  Eigen::VectorXd embed(const Eigen::VectorXi& m) const;

 private:
  Lattice() = default;
  Eigen::MatrixXd basis_;
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd gram_inv_;
  double covolume_ = 0.0;
  double eig_min_ = 0.0;
  double eig_max_ = 0.0;
};

// ----------------------------------------------------------------------------
// Shell decomposition: nonzero lattice vectors grouped by squared length.
// Vectors are stored in integer coordinates, both signs included, sorted
// lexicographically inside a shell; shells sorted by squared length.  Two
// squared lengths belong to the same shell when they differ by at most
// 1e-9 * max(1, r2).
// ----------------------------------------------------------------------------
struct Shell {
  double r2 = 0.0;                       // squared length of the shell
  std::vector<Eigen::VectorXi> vectors;  // all lattice vectors of that length
  int count() const { return static_cast<int>(vectors.size()); }
};

struct ShellDecomposition {
  double r2_max = 0.0;  // enumeration radius actually used
  std::vector<Shell> shells;
};

// Enumerate all nonzero vectors with Q(m) <= r2_max (Fincke–Pohst style walk
// driven by the Cholesky factor of the Gram matrix, with an axis-aligned box
// fallback).  Throws CutoffTooLargeError when the predicted or actual vector
// count exceeds opts.budget.
ShellDecomposition shells(const Lattice& L, double r2_max,
                          const SumOptions& opts = {});

// First shell only (squared length = lambda_1^2).
Shell minimal_vectors(const Lattice& L, const SumOptions& opts = {});

// Grow the enumeration radius until at least n shells are present.
ShellDecomposition first_shells(const Lattice& L, int n,
                                const SumOptions& opts = {});

// ----------------------------------------------------------------------------
// Bond constraint class: a finite symmetric set M of integer coordinate
// vectors that must realize the prescribed bond length lambda, together with
// the requirement that no lattice vector is shorter.  `strict` additionally
// demands that M is exactly the set of minimal vectors.
// ----------------------------------------------------------------------------
struct BondConstraint {
  std::vector<Eigen::VectorXi> vectors;  // symmetric: m in M  =>  -m in M
  double lambda = 1.0;
};

enum class CanonicalLattice { SC1, SC2, SC3, A2, D3, D3star };

// Canonical row-bases scaled so the minimal distance equals lambda.
Lattice canonical(CanonicalLattice which, double lambda = 1.0);

// The canonical bond sets (integer coordinates w.r.t. the canonical bases).
BondConstraint canonical_bonds(CanonicalLattice which, double lambda = 1.0);

// Membership test for the (closure of the) constraint class: every m in M has
// Q(m) = lambda^2 within tol and no nonzero vector is shorter.  With
// strict=true the minimal shell must coincide with M as a set.
bool in_constraint_class(const Lattice& L, const BondConstraint& constraint,
                         bool strict = false, double tol = 1e-9,
                         const SumOptions& opts = {});

}  // namespace laten
