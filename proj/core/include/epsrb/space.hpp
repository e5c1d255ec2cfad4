#pragma once

#include "epsrb/linalg.hpp"

#include <cstdint>
#include <memory>

namespace epsrb {

/// Finite-dimensional real inner-product space <u, v> = u^T G v defined by a
/// symmetric positive-definite Gram matrix G.
///
/// A Space is an immutable handle: copies share the validated Gram matrix and
/// its cached factorization, so it is cheap to pass around and safe to use
/// from several threads at once.
class Space {
 public:
  /// Validates symmetry (relative 1e-12) and positive definiteness
  /// (Cholesky). Throws NonSymmetric / NotPositiveDefinite / NonFinite.
  static Space from_gram(Matrix gram);

  /// Euclidean R^dim.
  static Space euclidean(Index dim);

  /// G = scale * T^power for a symmetric positive-definite tridiagonal T and
  /// power in {-1, 1, 2}. Gram solves go through the Thomas algorithm instead
  /// of a dense factorization.
  static Space tridiagonal_power(double scale, Tridiagonal base, int power);

  Index dim() const;
  const Matrix& gram() const;

  double inner(const Vector& u, const Vector& v) const;
  double norm(const Vector& v) const;
  double squared_norm(const Vector& v) const;

  /// G v
  Vector apply_gram(const Vector& v) const;
  /// G^{-1} v
  Vector solve_gram(const Vector& v) const;
  Matrix solve_gram(const Matrix& m) const;

  /// Digest of the Gram matrix (dimensions plus entries).
  std::uint64_t gram_hash() const;

  /// True when both handles refer to the same validated space.
  bool same_as(const Space& other) const { return state_ == other.state_; }

 private:
  struct State;
  explicit Space(std::shared_ptr<const State> state) : state_(std::move(state)) {}

  std::shared_ptr<const State> state_;
};

}  // namespace epsrb
