#include "epsrb/operator.hpp"

#include "epsrb/error.hpp"

#include <string>

namespace epsrb {

BoundedOperator::BoundedOperator(Matrix matrix, Space domain, Space codomain)
    : matrix_(std::move(matrix)), domain_(std::move(domain)), codomain_(std::move(codomain)) {
  if (matrix_.rows() != codomain_.dim() || matrix_.cols() != domain_.dim()) {
    raise(ErrorCode::DimensionMismatch,
          "operator matrix is " + std::to_string(matrix_.rows()) + "x" +
              std::to_string(matrix_.cols()) + " but spaces are dim(Y)=" +
              std::to_string(codomain_.dim()) + ", dim(X)=" + std::to_string(domain_.dim()));
  }
  if (!matrix_.allFinite()) raise(ErrorCode::NonFinite, "operator matrix has non-finite entries");
}

Vector BoundedOperator::apply(const Vector& u) const {
  if (u.size() != domain_.dim()) raise(ErrorCode::DimensionMismatch, "apply: domain dimension");
  return matrix_ * u;
}

Vector BoundedOperator::apply_adjoint(const Vector& v) const {
  if (v.size() != codomain_.dim()) {
    raise(ErrorCode::DimensionMismatch, "apply_adjoint: codomain dimension");
  }
  return domain_.solve_gram(Vector(matrix_.transpose() * codomain_.apply_gram(v)));
}

BoundedOperator adjoint(const BoundedOperator& op) {
  Matrix gy_m = op.codomain().gram() * op.matrix();  // G_Y M
  Matrix adj = op.domain().solve_gram(Matrix(gy_m.transpose()));
  return BoundedOperator(std::move(adj), op.codomain(), op.domain());
}

GramOperator::GramOperator(BoundedOperator op) : op_(std::move(op)) {
  const BoundedOperator adj = adjoint(op_);
  lambda_ = op_.matrix() * adj.matrix();
  const Matrix e = op_.codomain().gram() * lambda_;
  energy_ = 0.5 * (e + e.transpose());
  gershgorin_ = lambda_.cwiseAbs().rowwise().sum().maxCoeff();
}

Vector GramOperator::apply(const Vector& v) const {
  if (v.size() != dim()) raise(ErrorCode::DimensionMismatch, "GramOperator::apply");
  return lambda_ * v;
}

GramOperator::Spectrum GramOperator::spectrum() const {
  const Vector ev = y_eigenvalues(energy_, space());
  return {ev(0), ev(ev.size() - 1)};
}

Vector gram_apply(const BoundedOperator& op, const Vector& v) {
  if (v.size() != op.codomain().dim()) raise(ErrorCode::DimensionMismatch, "gram_apply");
  return op.apply(op.apply_adjoint(v));
}

Vector y_eigenvalues(const Matrix& energy, const Space& space) {
  if (energy.rows() != space.dim() || energy.cols() != space.dim()) {
    raise(ErrorCode::DimensionMismatch, "y_eigenvalues");
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(energy, space.gram(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) raise(ErrorCode::SingularGram, "generalized eigensolve failed");
  return es.eigenvalues();
}

}  // namespace epsrb
