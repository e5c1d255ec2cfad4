#pragma once

#include "epsrb/linalg.hpp"
#include "epsrb/operator.hpp"
#include "epsrb/space.hpp"

#include <functional>
#include <optional>

namespace epsrb {

struct LinearSolverOptions {
  /// Dense Cholesky up to this dimension, conjugate gradients above.
  Index direct_max_dim = 512;
  double cg_rtol = 1e-12;
  /// 0 selects 10 * dim.
  int cg_max_iterations = 0;
  /// Residual-correction passes after a direct solve.
  int refinement_steps = 3;
};

struct LinearSolveStats {
  bool direct = true;
  int iterations = 0;
  /// ||f - A w||_Y / ||f||_Y after the solve.
  double relative_residual = 0.0;
};

/// Solver for A w = f where A is self-adjoint and positive definite in the Y
/// inner product.
///
/// A is described twice: by its energy matrix G_Y A (symmetric, factored by
/// Cholesky on the direct path) and by an action w -> A w, which is used for
/// residuals, iterative refinement and the CG path.
class SpdSystem {
 public:
  using Action = std::function<Vector(const Vector&)>;

  SpdSystem(Space space, Matrix energy, Action action, LinearSolverOptions options = {});

  Vector solve(const Vector& rhs, LinearSolveStats* stats = nullptr) const;

  Index dim() const { return space_.dim(); }

 private:
  Vector solve_direct(const Vector& rhs, LinearSolveStats& stats) const;
  Vector solve_cg(const Vector& rhs, LinearSolveStats& stats) const;

  Space space_;
  Matrix energy_;
  Action action_;
  LinearSolverOptions options_;
  std::optional<Eigen::LLT<Matrix>> llt_;
};

/// (Lambda + eta I) as an SpdSystem. `gram` must outlive the returned system.
SpdSystem shifted_system(const GramOperator& gram, double eta, const LinearSolverOptions& options = {});

/// Convenience: solve (Lambda + eta I) w = rhs.
Vector solve_shifted(const GramOperator& gram, double eta, const Vector& rhs,
                     const LinearSolverOptions& options = {}, LinearSolveStats* stats = nullptr);

}  // namespace epsrb
