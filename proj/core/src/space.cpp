#include "epsrb/space.hpp"

#include "epsrb/error.hpp"
#include "epsrb/hash.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace epsrb {

struct Space::State {
  Matrix gram;
  Eigen::LLT<Matrix> llt;  // empty when the tridiagonal path is active
  struct Banded {
    double scale;
    Tridiagonal base;
    int power;
  };
  std::optional<Banded> banded;
  std::uint64_t hash = 0;
};

namespace {

void check_dim(const Matrix& gram, const Vector& v, const char* what) {
  if (v.size() != gram.rows()) {
    raise(ErrorCode::DimensionMismatch, std::string(what) + ": vector of size " +
                                            std::to_string(v.size()) + " in space of dimension " +
                                            std::to_string(gram.rows()));
  }
}

}  // namespace

Space Space::from_gram(Matrix gram) {
  if (gram.rows() != gram.cols()) raise(ErrorCode::DimensionMismatch, "Gram matrix must be square");
  if (gram.rows() < 1) raise(ErrorCode::InvalidArgument, "Gram matrix must be non-empty");
  if (!gram.allFinite()) raise(ErrorCode::NonFinite, "Gram matrix has non-finite entries");
  if (!is_symmetric(gram, 1e-12)) raise(ErrorCode::NonSymmetric, "Gram matrix is not symmetric");

  auto state = std::make_shared<State>();
  state->llt.compute(gram);
  if (state->llt.info() != Eigen::Success) {
    raise(ErrorCode::NotPositiveDefinite, "Cholesky factorization of the Gram matrix failed");
  }
  state->hash = Fnv1a{}.matrix(gram).digest();
  state->gram = std::move(gram);
  return Space(std::move(state));
}

Space Space::euclidean(Index dim) { return from_gram(Matrix::Identity(dim, dim)); }

Space Space::tridiagonal_power(double scale, Tridiagonal base, int power) {
  if (!(scale > 0.0)) raise(ErrorCode::InvalidArgument, "Gram scale must be positive");
  if (power != -1 && power != 1 && power != 2) {
    raise(ErrorCode::InvalidArgument, "tridiagonal Gram power must be -1, 1 or 2");
  }
  if (!base.is_positive_definite()) {
    raise(ErrorCode::NotPositiveDefinite, "tridiagonal Gram base is not positive definite");
  }
  const Index n = base.size();
  Matrix gram;
  switch (power) {
    case -1: gram = base.solve(Matrix(Matrix::Identity(n, n))); break;
    case 1: gram = base.to_dense(); break;
    default: gram = base.multiply(base.to_dense()); break;
  }
  gram *= scale;
  gram = 0.5 * (gram + gram.transpose());

  auto state = std::make_shared<State>();
  state->hash = Fnv1a{}.matrix(gram).digest();
  state->gram = std::move(gram);
  state->banded = State::Banded{scale, std::move(base), power};
  return Space(std::move(state));
}

Index Space::dim() const { return state_->gram.rows(); }

const Matrix& Space::gram() const { return state_->gram; }

Vector Space::apply_gram(const Vector& v) const {
  check_dim(state_->gram, v, "apply_gram");
  if (const auto& b = state_->banded) {
    switch (b->power) {
      case -1: return b->scale * b->base.solve(v);
      case 1: return b->scale * b->base.multiply(v);
      default: return b->scale * b->base.multiply(b->base.multiply(v));
    }
  }
  return state_->gram * v;
}

double Space::inner(const Vector& u, const Vector& v) const {
  check_dim(state_->gram, u, "inner");
  return u.dot(apply_gram(v));
}

double Space::squared_norm(const Vector& v) const {
  const double s = inner(v, v);
  return s > 0.0 ? s : 0.0;
}

double Space::norm(const Vector& v) const { return std::sqrt(squared_norm(v)); }

Vector Space::solve_gram(const Vector& v) const {
  check_dim(state_->gram, v, "solve_gram");
  if (const auto& b = state_->banded) {
    switch (b->power) {
      case -1: return b->base.multiply(v) / b->scale;
      case 1: return b->base.solve(v) / b->scale;
      default: return b->base.solve(b->base.solve(v)) / b->scale;
    }
  }
  return state_->llt.solve(v);
}

Matrix Space::solve_gram(const Matrix& m) const {
  if (m.rows() != dim()) raise(ErrorCode::DimensionMismatch, "solve_gram: row count");
  if (state_->banded) {
    Matrix out(m.rows(), m.cols());
    for (Index j = 0; j < m.cols(); ++j) out.col(j) = solve_gram(Vector(m.col(j)));
    return out;
  }
  return state_->llt.solve(m);
}

std::uint64_t Space::gram_hash() const { return state_->hash; }

}  // namespace epsrb
