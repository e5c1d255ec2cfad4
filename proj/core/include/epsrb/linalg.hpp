#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace epsrb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Symmetric tridiagonal matrix stored by its diagonal and off-diagonal.
///
/// Used as the banded fast path for the elliptic testbed: stiffness matrices
/// are assembled in this form and Gram matrices of the discrete Sobolev
/// spaces are powers of one of them.
class Tridiagonal {
 public:
  Tridiagonal() = default;
  /// `off` holds entries (i, i+1) == (i+1, i); its size must be diag.size()-1.
  Tridiagonal(Vector diag, Vector off);

  Index size() const { return diag_.size(); }
  const Vector& diagonal() const { return diag_; }
  const Vector& off_diagonal() const { return off_; }

  Vector multiply(const Vector& x) const;
  Matrix multiply(const Matrix& x) const;

  /// Thomas algorithm. Valid without pivoting for SPD matrices; throws
  /// NotPositiveDefinite when a pivot is not strictly positive.
  Vector solve(const Vector& rhs) const;
  Matrix solve(const Matrix& rhs) const;

  /// True when every LDL^T pivot is strictly positive.
  bool is_positive_definite() const;

  Matrix to_dense() const;

 private:
  void factor() const;

  Vector diag_;
  Vector off_;
};

/// max |a_ij - a_ji| <= rtol * max |a_ij|
bool is_symmetric(const Matrix& a, double rtol = 1e-12);

bool all_finite(const Matrix& a);
bool all_finite(const Vector& v);

/// Relative Frobenius distance ||a - b||_F / ||b||_F (absolute when b == 0).
double relative_frobenius(const Matrix& a, const Matrix& b);

}  // namespace epsrb
