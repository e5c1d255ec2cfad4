#pragma once

#include "epsrb/family.hpp"
#include "epsrb/linalg.hpp"
#include "epsrb/operator.hpp"
#include "epsrb/shifted_solve.hpp"

#include <span>
#include <vector>

namespace epsrb {

/// min ||u||_X subject to ||L u - f||_Y <= eps. eps = 0 is accepted so the
/// dual functional can be evaluated, but the solvers require eps > 0.
class EpsProblem {
 public:
  EpsProblem(BoundedOperator op, Vector target, double eps);
  EpsProblem(GramOperator gram, Vector target, double eps);
  EpsProblem(const FamilyInstance& instance, double eps);

  const BoundedOperator& op() const { return gram_.op(); }
  const GramOperator& gram() const { return gram_; }
  const Space& space() const { return gram_.space(); }
  const Vector& target() const { return target_; }
  double eps() const { return eps_; }

 private:
  GramOperator gram_;
  Vector target_;
  double eps_;
};

struct EpsSolverOptions {
  /// Stop when -psi_rtol * eps <= psi(eta) <= 0 (feasible side) ...
  double psi_rtol = 1e-10;
  /// ... or when the bracket on log(eta) is narrower than this.
  double bracket_rtol = 1e-12;
  double expansion_factor = 10.0;
  int max_expansions = 60;
  int max_iterations = 200;
  LinearSolverOptions linear{};
};

struct EpsSolution {
  Vector v_tilde;  ///< dual minimizer
  Vector u_tilde;  ///< L* v_tilde, the minimal-norm eps-solution
  double s = 0.0;  ///< ||v_tilde||_Y
  /// eps / s. Infinite for the zero solution. For solve_finite_dim this is
  /// the multiplier of the orthogonal block instead (infinite when the
  /// constraint is inactive).
  double eta_star = 0.0;
  double misfit = 0.0;  ///< ||L u_tilde - f||_Y
  int iterations = 0;   ///< psi evaluations (bracketing + root finding)
  bool converged = false;
  bool zero_solution = false;
  /// Upper bound (||Lambda|| + eta) / eta on the condition number of the
  /// last shifted system, in the Y inner product.
  double condition_bound = 1.0;
};

/// J(v) = 1/2 ||L* v||_X^2 + eps ||v||_Y - <f, v>_Y
double eval_dual(const EpsProblem& problem, const Vector& v);

/// Minimizes J through the scalar reduction psi(eta) = eta ||w(eta)||_Y - eps
/// with w(eta) = (Lambda + eta I)^{-1} f: geometric bracketing followed by a
/// safeguarded Illinois iteration on log(eta). Returns the zero solution when
/// ||f||_Y <= eps. Throws BracketFailure, LinearSolveFailure, MaxIterations.
EpsSolution solve_dual(const EpsProblem& problem, const EpsSolverOptions& options = {});

struct DiagonalSolution {
  Vector v;             ///< coefficients v_k = f_k / (lambda_k + eps / s)
  double s = 0.0;       ///< ||v||
  double eta = 0.0;     ///< eps / s (infinite when zero_target)
  bool zero_target = false;
};

/// Fourier-coefficient form of the Euler-Lagrange equation for a diagonal
/// Lambda in an orthonormal basis. Solved by plain bisection on log(eta),
/// independent of solve_dual, so it can serve as its oracle.
DiagonalSolution solve_dual_diagonal(std::span<const double> lambdas, std::span<const double> f,
                                     double eps);

/// Minimizer of J_E(v) = 1/2 ||L* v||^2 + eps ||P_{E-perp} v|| - <f, v> for a
/// subspace E spanned by `basis` (Y-vectors). The returned u = L* v satisfies
/// P_E(L u) = P_E(f) and ||L u - f||_Y <= eps. An empty basis reduces to
/// solve_dual. Throws DependentBasis if the basis is not independent in Y.
EpsSolution solve_finite_dim(const EpsProblem& problem, const std::vector<Vector>& basis,
                             const EpsSolverOptions& options = {});

/// Smallest eigenvalue, in the Y inner product, of
/// Lambda + (eps / ||v||_Y)(I - P_v), the derivative of the Euler-Lagrange
/// map at v. Throws ZeroVector for v == 0.
double hessian_min_eig(const GramOperator& gram, const Vector& v, double eps);
double hessian_min_eig(const BoundedOperator& op, const Vector& v, double eps);

/// Y-orthonormal basis of span(vectors): modified Gram-Schmidt with one
/// reorthogonalization pass. Throws DependentBasis when a vector keeps less
/// than `rtol` of its norm after orthogonalization.
Matrix y_orthonormalize(const Space& space, const std::vector<Vector>& vectors, double rtol = 1e-10);

}  // namespace epsrb
