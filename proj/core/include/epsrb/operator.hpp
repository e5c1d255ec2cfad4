#pragma once

#include "epsrb/linalg.hpp"
#include "epsrb/space.hpp"

namespace epsrb {

/// Bounded linear map L : X -> Y between two finite-dimensional inner-product
/// spaces, stored as a dense dim(Y) x dim(X) matrix.
class BoundedOperator {
 public:
  /// Throws DimensionMismatch if the matrix shape disagrees with the spaces
  /// and NonFinite on NaN/Inf entries.
  BoundedOperator(Matrix matrix, Space domain, Space codomain);

  const Matrix& matrix() const { return matrix_; }
  const Space& domain() const { return domain_; }
  const Space& codomain() const { return codomain_; }

  Vector apply(const Vector& u) const;
  /// L* v = G_X^{-1} M^T G_Y v, without forming the adjoint matrix.
  Vector apply_adjoint(const Vector& v) const;

 private:
  Matrix matrix_;
  Space domain_;
  Space codomain_;
};

/// The Hilbert adjoint L* : Y -> X with matrix G_X^{-1} M^T G_Y.
BoundedOperator adjoint(const BoundedOperator& op);

/// Lambda = L L*, the Gram operator on the codomain of L.
///
/// Self-adjoint and positive semidefinite in <.,.>_Y. Besides the matrix of
/// Lambda the object keeps its energy form G_Y Lambda (symmetric), which is
/// what the SPD solves and generalized eigenproblems work with.
class GramOperator {
 public:
  explicit GramOperator(BoundedOperator op);

  const BoundedOperator& op() const { return op_; }
  const Space& space() const { return op_.codomain(); }
  Index dim() const { return lambda_.rows(); }

  const Matrix& matrix() const { return lambda_; }
  /// Symmetrized G_Y * Lambda.
  const Matrix& energy() const { return energy_; }

  Vector apply(const Vector& v) const;

  /// Infinity-norm of the Lambda matrix; an upper bound on its spectral
  /// radius, which equals ||Lambda||_{L(Y)}.
  double gershgorin_bound() const { return gershgorin_; }

  /// Extreme eigenvalues of Lambda in the Y inner product (dense
  /// generalized symmetric eigensolve, O(dim^3)).
  struct Spectrum {
    double min;
    double max;
  };
  Spectrum spectrum() const;

 private:
  BoundedOperator op_;
  Matrix lambda_;
  Matrix energy_;
  double gershgorin_ = 0.0;
};

/// L(L* v); throws DimensionMismatch when v is not a codomain vector.
Vector gram_apply(const BoundedOperator& op, const Vector& v);

/// Eigenvalues of the Y-self-adjoint operator whose energy form is
/// `energy` (= G_Y A), ascending.
Vector y_eigenvalues(const Matrix& energy, const Space& space);

}  // namespace epsrb
