#include "epsrb/shifted_solve.hpp"

#include "epsrb/error.hpp"

#include <cmath>
#include <string>

namespace epsrb {

SpdSystem::SpdSystem(Space space, Matrix energy, Action action, LinearSolverOptions options)
    : space_(std::move(space)),
      energy_(std::move(energy)),
      action_(std::move(action)),
      options_(options) {
  if (energy_.rows() != space_.dim() || energy_.cols() != space_.dim()) {
    raise(ErrorCode::DimensionMismatch, "SpdSystem: energy matrix shape");
  }
  if (!energy_.allFinite()) raise(ErrorCode::NonFinite, "SpdSystem: energy matrix");
  if (space_.dim() <= options_.direct_max_dim) {
    llt_.emplace(energy_);
    if (llt_->info() != Eigen::Success) {
      raise(ErrorCode::LinearSolveFailure, "Cholesky factorization of the shifted system failed");
    }
  }
}

Vector SpdSystem::solve(const Vector& rhs, LinearSolveStats* stats) const {
  if (rhs.size() != dim()) raise(ErrorCode::DimensionMismatch, "SpdSystem::solve");
  LinearSolveStats local;
  Vector w = llt_ ? solve_direct(rhs, local) : solve_cg(rhs, local);
  if (!w.allFinite()) raise(ErrorCode::LinearSolveFailure, "non-finite solution");
  if (stats) *stats = local;
  return w;
}

Vector SpdSystem::solve_direct(const Vector& rhs, LinearSolveStats& stats) const {
  stats.direct = true;
  const double rhs_norm = space_.norm(rhs);
  Vector w = llt_->solve(space_.apply_gram(rhs));
  Vector r = rhs - action_(w);
  double res = space_.norm(r);
  for (int k = 0; k < options_.refinement_steps && res > 0.0; ++k) {
    const Vector w_next = w + llt_->solve(space_.apply_gram(r));
    const Vector r_next = rhs - action_(w_next);
    const double res_next = space_.norm(r_next);
    if (!(res_next < res)) break;
    w = w_next;
    r = r_next;
    res = res_next;
    ++stats.iterations;
  }
  stats.relative_residual = rhs_norm > 0.0 ? res / rhs_norm : res;
  return w;
}

// Conjugate gradients in the Y inner product; A is Y-self-adjoint so the
// Krylov recurrences stay short.
Vector SpdSystem::solve_cg(const Vector& rhs, LinearSolveStats& stats) const {
  stats.direct = false;
  const int max_it = options_.cg_max_iterations > 0 ? options_.cg_max_iterations
                                                    : static_cast<int>(10 * dim());
  const double rhs_norm = space_.norm(rhs);
  Vector w = Vector::Zero(dim());
  if (rhs_norm == 0.0) return w;

  Vector r = rhs;
  Vector p = r;
  Vector gr = space_.apply_gram(r);
  double rr = r.dot(gr);
  for (int it = 0; it < max_it; ++it) {
    if (std::sqrt(rr) <= options_.cg_rtol * rhs_norm) {
      stats.iterations = it;
      stats.relative_residual = std::sqrt(rr) / rhs_norm;
      return w;
    }
    const Vector ap = action_(p);
    const double pap = space_.inner(p, ap);
    if (!(pap > 0.0)) raise(ErrorCode::LinearSolveFailure, "CG: operator not positive definite");
    const double step = rr / pap;
    w += step * p;
    r -= step * ap;
    gr = space_.apply_gram(r);
    const double rr_next = r.dot(gr);
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  raise(ErrorCode::MaxIterations, "CG did not reach relative residual " +
                                       std::to_string(options_.cg_rtol) + " in " +
                                       std::to_string(max_it) + " iterations");
}

SpdSystem shifted_system(const GramOperator& gram, double eta, const LinearSolverOptions& options) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    raise(ErrorCode::InvalidArgument, "shift eta must be positive and finite");
  }
  Matrix energy = gram.energy() + eta * gram.space().gram();
  const Matrix* lambda = &gram.matrix();
  return SpdSystem(gram.space(), std::move(energy),
                   [lambda, eta](const Vector& w) -> Vector { return (*lambda) * w + eta * w; },
                   options);
}

Vector solve_shifted(const GramOperator& gram, double eta, const Vector& rhs,
                     const LinearSolverOptions& options, LinearSolveStats* stats) {
  return shifted_system(gram, eta, options).solve(rhs, stats);
}

}  // namespace epsrb
