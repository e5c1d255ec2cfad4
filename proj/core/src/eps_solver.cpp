#include "epsrb/eps_solver.hpp"

#include "epsrb/error.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace epsrb {

EpsProblem::EpsProblem(BoundedOperator op, Vector target, double eps)
    : EpsProblem(GramOperator(std::move(op)), std::move(target), eps) {}

EpsProblem::EpsProblem(GramOperator gram, Vector target, double eps)
    : gram_(std::move(gram)), target_(std::move(target)), eps_(eps) {
  if (!(eps_ >= 0.0) || !std::isfinite(eps_)) raise(ErrorCode::InvalidArgument, "eps must be non-negative");
  if (target_.size() != gram_.dim()) raise(ErrorCode::DimensionMismatch, "target size");
  if (!target_.allFinite()) raise(ErrorCode::NonFinite, "target has non-finite entries");
}

EpsProblem::EpsProblem(const FamilyInstance& instance, double eps)
    : EpsProblem(instance.gram, instance.target, eps) {}

double eval_dual(const EpsProblem& problem, const Vector& v) {
  if (v.size() != problem.gram().dim()) raise(ErrorCode::DimensionMismatch, "eval_dual");
  const Vector u = problem.op().apply_adjoint(v);
  const Space& y = problem.space();
  return 0.5 * problem.op().domain().squared_norm(u) + problem.eps() * y.norm(v) -
         y.inner(problem.target(), v);
}

namespace {

struct RootResult {
  double eta = 0.0;
  int evaluations = 0;
};

// Root of a continuous increasing psi on (0, inf), searched in t = log(eta).
RootResult find_increasing_root(const std::function<double(double)>& psi, double eta0, double psi_tol,
                                const EpsSolverOptions& opt) {
  RootResult res;
  auto eval = [&](double t) {
    ++res.evaluations;
    return psi(std::exp(t));
  };

  double t = std::log(eta0);
  // Only roots from below are accepted: psi <= 0 keeps the misfit at or
  // under eps.
  const auto accept = [psi_tol](double v) { return v <= 0.0 && v >= -psi_tol; };
  double f = eval(t);
  if (accept(f)) {
    res.eta = std::exp(t);
    return res;
  }
  const double step = std::log(opt.expansion_factor);
  double lo, hi, f_lo, f_hi;
  if (f < 0.0) {
    lo = t;
    f_lo = f;
    int k = 0;
    for (;;) {
      if (++k > opt.max_expansions) {
        raise(ErrorCode::BracketFailure, "psi stays negative up to eta = " + std::to_string(std::exp(t)));
      }
      t += step;
      f = eval(t);
      if (f >= 0.0) break;
      lo = t;
      f_lo = f;
    }
    hi = t;
    f_hi = f;
  } else {
    hi = t;
    f_hi = f;
    int k = 0;
    for (;;) {
      if (++k > opt.max_expansions) {
        raise(ErrorCode::BracketFailure, "psi stays positive down to eta = " + std::to_string(std::exp(t)));
      }
      t -= step;
      f = eval(t);
      if (f < 0.0) break;
      hi = t;
      f_hi = f;
    }
    lo = t;
    f_lo = f;
  }
  if (accept(f_lo)) {
    res.eta = std::exp(lo);
    return res;
  }

  // Illinois regula falsi; a bisection step whenever two consecutive steps
  // fail to halve the bracket.
  int side = 0;
  int slow = 0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const double width = hi - lo;
    if (width <= opt.bracket_rtol) {
      res.eta = std::exp(lo);
      return res;
    }
    double tn = slow >= 2 ? 0.5 * (lo + hi) : hi - f_hi * (hi - lo) / (f_hi - f_lo);
    if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
    const bool bisected = slow >= 2;
    const double fn = eval(tn);
    if (accept(fn)) {
      res.eta = std::exp(tn);
      return res;
    }
    if (fn < 0.0) {
      if (side == -1 && !bisected) f_hi *= 0.5;
      lo = tn;
      f_lo = fn;
      side = -1;
    } else {
      if (side == 1 && !bisected) f_lo *= 0.5;
      hi = tn;
      f_hi = fn;
      side = 1;
    }
    slow = (hi - lo) > 0.5 * width ? slow + 1 : 0;
    if (bisected) slow = 0;
  }
  raise(ErrorCode::MaxIterations, "eta root-finding did not converge in " +
                                      std::to_string(opt.max_iterations) + " iterations");
}

EpsSolution zero_solution(const EpsProblem& problem) {
  EpsSolution sol;
  sol.v_tilde = Vector::Zero(problem.gram().dim());
  sol.u_tilde = Vector::Zero(problem.op().domain().dim());
  sol.s = 0.0;
  sol.eta_star = std::numeric_limits<double>::infinity();
  sol.misfit = problem.space().norm(problem.target());
  sol.converged = true;
  sol.zero_solution = true;
  return sol;
}

void finish(const EpsProblem& problem, EpsSolution& sol) {
  sol.u_tilde = problem.op().apply_adjoint(sol.v_tilde);
  sol.misfit = problem.space().norm(Vector(problem.op().apply(sol.u_tilde) - problem.target()));
  sol.s = problem.space().norm(sol.v_tilde);
}

}  // namespace

EpsSolution solve_dual(const EpsProblem& problem, const EpsSolverOptions& options) {
  const Space& y = problem.space();
  const double eps = problem.eps();
  if (!(eps > 0.0)) raise(ErrorCode::InvalidArgument, "solve_dual needs eps > 0");
  const double f_norm = y.norm(problem.target());
  if (f_norm <= eps) return zero_solution(problem);

  const double lambda_bar = problem.gram().gershgorin_bound();
  if (!(lambda_bar > 0.0)) raise(ErrorCode::BracketFailure, "Lambda vanishes; no eta root exists");

  auto psi = [&](double eta) {
    const Vector w = solve_shifted(problem.gram(), eta, problem.target(), options.linear);
    return eta * y.norm(w) - eps;
  };
  const double eta0 = eps / f_norm * lambda_bar;
  const RootResult root = find_increasing_root(psi, eta0, options.psi_rtol * eps, options);

  EpsSolution sol;
  sol.v_tilde = solve_shifted(problem.gram(), root.eta, problem.target(), options.linear);
  finish(problem, sol);
  sol.eta_star = eps / sol.s;
  sol.iterations = root.evaluations;
  sol.converged = true;
  sol.condition_bound = (lambda_bar + root.eta) / root.eta;
  return sol;
}

DiagonalSolution solve_dual_diagonal(std::span<const double> lambdas, std::span<const double> f,
                                     double eps) {
  if (lambdas.size() != f.size() || lambdas.empty()) {
    raise(ErrorCode::DimensionMismatch, "solve_dual_diagonal: lambdas and f must have equal, non-zero length");
  }
  if (!(eps > 0.0)) raise(ErrorCode::InvalidArgument, "eps must be positive");
  const std::size_t n = f.size();
  double f_norm = 0.0;
  double lambda_max = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(lambdas[k] >= 0.0)) raise(ErrorCode::InvalidArgument, "eigenvalues must be non-negative");
    f_norm += f[k] * f[k];
    lambda_max = std::max(lambda_max, lambdas[k]);
  }
  f_norm = std::sqrt(f_norm);

  DiagonalSolution out;
  out.v = Vector::Zero(static_cast<Index>(n));
  if (f_norm <= eps) {
    out.zero_target = true;
    out.eta = std::numeric_limits<double>::infinity();
    return out;
  }

  auto psi = [&](double eta) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double c = f[k] / (lambdas[k] + eta);
      acc += c * c;
    }
    return eta * std::sqrt(acc) - eps;
  };

  double lo = lambda_max > 0.0 ? eps / f_norm * lambda_max : 1.0;
  double hi = lo;
  for (int k = 0; psi(lo) >= 0.0; ++k) {
    if (k > 600) raise(ErrorCode::BracketFailure, "diagonal psi has no negative value");
    lo *= 0.5;
  }
  for (int k = 0; psi(hi) <= 0.0; ++k) {
    if (k > 600) raise(ErrorCode::BracketFailure, "diagonal psi has no positive value");
    hi *= 2.0;
  }
  for (int it = 0; it < 400 && hi / lo - 1.0 > 1e-15; ++it) {
    const double mid = std::sqrt(lo * hi);
    (psi(mid) < 0.0 ? lo : hi) = mid;
  }
  const double eta = std::sqrt(lo * hi);
  for (std::size_t k = 0; k < n; ++k) out.v(static_cast<Index>(k)) = f[k] / (lambdas[k] + eta);
  out.s = out.v.norm();
  out.eta = eps / out.s;
  return out;
}

Matrix y_orthonormalize(const Space& space, const std::vector<Vector>& vectors, double rtol) {
  Matrix q(space.dim(), 0);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const Vector& v = vectors[i];
    if (v.size() != space.dim()) raise(ErrorCode::DimensionMismatch, "basis vector size");
    const double norm0 = space.norm(v);
    if (!(norm0 > 0.0)) raise(ErrorCode::DependentBasis, "basis vector " + std::to_string(i) + " is zero");
    Vector w = v;
    for (int pass = 0; pass < 2; ++pass) {
      for (Index j = 0; j < q.cols(); ++j) w -= space.inner(Vector(q.col(j)), w) * q.col(j);
    }
    const double norm1 = space.norm(w);
    if (norm1 <= rtol * norm0) {
      raise(ErrorCode::DependentBasis, "basis vector " + std::to_string(i) + " depends on its predecessors");
    }
    q.conservativeResize(Eigen::NoChange, q.cols() + 1);
    q.col(q.cols() - 1) = w / norm1;
  }
  return q;
}

EpsSolution solve_finite_dim(const EpsProblem& problem, const std::vector<Vector>& basis,
                             const EpsSolverOptions& options) {
  if (basis.empty()) return solve_dual(problem, options);
  if (!(problem.eps() > 0.0)) raise(ErrorCode::InvalidArgument, "solve_finite_dim needs eps > 0");

  const Space& y = problem.space();
  const GramOperator& gram = problem.gram();
  const Vector& f = problem.target();
  const double eps = problem.eps();
  const Matrix q = y_orthonormalize(y, basis);
  const Index n = y.dim();
  const Index k = q.cols();
  const Matrix gq = y.gram() * q;  // G_Y Q

  EpsSolution sol;
  sol.converged = true;

  // The constraint block alone: v in E with P_E(Lambda v - f) = 0.
  const Matrix reduced = q.transpose() * gram.energy() * q;
  Eigen::LLT<Matrix> reduced_llt(0.5 * (reduced + reduced.transpose()));
  if (reduced_llt.info() != Eigen::Success) {
    raise(ErrorCode::LinearSolveFailure, "Lambda is singular on the subspace E");
  }
  Vector v_inf = q * reduced_llt.solve(Vector(gq.transpose() * f));
  if (k < n) {
    const Vector r = f - gram.apply(v_inf);
    const Vector r_perp = r - q * (gq.transpose() * r);
    if (y.norm(r_perp) > eps) v_inf.resize(0);  // constraint active; use the eta branch
  }
  if (v_inf.size() == n) {
    // Either E = Y, or the subgradient of eps ||P_perp v|| at P_perp v = 0
    // absorbs the orthogonal residual.
    sol.v_tilde = std::move(v_inf);
    finish(problem, sol);
    sol.eta_star = std::numeric_limits<double>::infinity();
    return sol;
  }

  const Matrix perp_energy = y.gram() - gq * gq.transpose();
  const Matrix* lambda = &gram.matrix();
  auto system_at = [&](double eta) {
    return SpdSystem(y, gram.energy() + eta * perp_energy,
                     [&, eta](const Vector& w) -> Vector {
                       return (*lambda) * w + eta * (w - q * (gq.transpose() * w));
                     },
                     options.linear);
  };
  auto perp_part = [&](const Vector& w) -> Vector { return w - q * (gq.transpose() * w); };
  auto psi = [&](double eta) {
    const Vector w = system_at(eta).solve(f);
    return eta * y.norm(perp_part(w)) - eps;
  };
  const double lambda_bar = gram.gershgorin_bound();
  const double eta0 = eps / y.norm(f) * (lambda_bar > 0.0 ? lambda_bar : 1.0);
  const RootResult root = find_increasing_root(psi, eta0, options.psi_rtol * eps, options);

  sol.v_tilde = system_at(root.eta).solve(f);
  finish(problem, sol);
  sol.eta_star = root.eta;
  sol.iterations = root.evaluations;
  sol.condition_bound = (lambda_bar + root.eta) / root.eta;
  return sol;
}

double hessian_min_eig(const GramOperator& gram, const Vector& v, double eps) {
  const Space& y = gram.space();
  if (v.size() != y.dim()) raise(ErrorCode::DimensionMismatch, "hessian_min_eig");
  const double nv = y.norm(v);
  if (!(nv > 0.0)) raise(ErrorCode::ZeroVector, "hessian_min_eig needs v != 0");
  const double c = eps / nv;
  const Vector gv = y.apply_gram(v) / nv;
  const Matrix energy = gram.energy() + c * (y.gram() - gv * gv.transpose());
  return y_eigenvalues(0.5 * (energy + energy.transpose()), y)(0);
}

double hessian_min_eig(const BoundedOperator& op, const Vector& v, double eps) {
  return hessian_min_eig(GramOperator(op), v, eps);
}

}  // namespace epsrb
