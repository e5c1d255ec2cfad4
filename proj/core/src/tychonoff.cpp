#include "epsrb/tychonoff.hpp"

#include "epsrb/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epsrb {

TychProblem::TychProblem(GramOperator gram, Vector target, double eta)
    : gram_(std::move(gram)), target_(std::move(target)), eta_(eta) {
  if (!(eta_ > 0.0) || !std::isfinite(eta_)) raise(ErrorCode::InvalidArgument, "eta must be positive");
  if (target_.size() != gram_.dim()) raise(ErrorCode::DimensionMismatch, "TychProblem target size");
}

TychProblem::TychProblem(const FamilyInstance& instance, double eta)
    : TychProblem(instance.gram, instance.target, eta) {}

Vector solve_tychonoff(const TychProblem& problem, const LinearSolverOptions& options,
                       LinearSolveStats* stats) {
  return solve_shifted(problem.gram(), problem.eta(), problem.target(), options, stats);
}

Residual residual(const TychProblem& problem, const Vector& w) {
  if (w.size() != problem.gram().dim()) raise(ErrorCode::DimensionMismatch, "residual");
  Residual out{problem.gram().apply(w) + problem.eta() * w - problem.target(), 0.0};
  out.norm = problem.space().norm(out.r);
  return out;
}

ResidualBounds residual_bounds(const TychProblem& problem) {
  return {problem.eta(), problem.gram().spectrum().max + problem.eta()};
}

EtaInterval eta_interval_from_bounds(double eps, double v_minus, double v_plus) {
  if (!(eps > 0.0)) raise(ErrorCode::InvalidArgument, "eps must be positive");
  if (!(v_minus > 0.0) || !(v_plus >= v_minus) || !std::isfinite(v_plus)) {
    raise(ErrorCode::InvalidArgument, "need 0 < v_minus <= v_plus");
  }
  return {eps / v_plus, eps / v_minus, v_minus, v_plus};
}

EtaInterval estimate_eta_interval(const ProblemFamily& family, const std::vector<Parameter>& samples,
                                  double safety_factor, const EpsSolverOptions& options) {
  if (samples.empty()) raise(ErrorCode::EmptyGrid, "estimate_eta_interval: no samples");
  if (!(safety_factor >= 1.0)) raise(ErrorCode::InvalidArgument, "safety factor must be >= 1");
  const double eps = family.eps();
  double f_min = std::numeric_limits<double>::infinity();
  double lambda_max = 0.0;
  double v_max = 0.0;
  for (const auto& nu : samples) {
    const FamilyInstance inst = family.instance(nu);
    const double f_norm = family.codomain().norm(inst.target);
    if (!(f_norm > eps)) {
      raise(ErrorCode::InfeasibleFamily,
            "||f_nu||_Y = " + std::to_string(f_norm) + " <= eps at " + to_string(nu));
    }
    f_min = std::min(f_min, f_norm);
    lambda_max = std::max(lambda_max, inst.gram.spectrum().max);
    const EpsSolution sol = solve_dual(EpsProblem(inst, eps), options);
    v_max = std::max(v_max, sol.s);
  }
  const double v_minus = (f_min - eps) / lambda_max;
  const double v_plus = std::max(safety_factor * v_max, v_minus);
  return eta_interval_from_bounds(eps, v_minus, v_plus);
}

ContainmentAudit audit_eta_interval(const EtaInterval& interval, const ProblemFamily& family,
                                    const std::vector<Parameter>& samples,
                                    const EpsSolverOptions& options) {
  ContainmentAudit audit;
  audit.eta_star_min = std::numeric_limits<double>::infinity();
  audit.eta_star_max = 0.0;
  for (const auto& nu : samples) {
    const EpsSolution sol = solve_dual(EpsProblem(family.instance(nu), family.eps()), options);
    audit.eta_star_min = std::min(audit.eta_star_min, sol.eta_star);
    audit.eta_star_max = std::max(audit.eta_star_max, sol.eta_star);
    if (!interval.contains(sol.eta_star)) audit.violations.push_back(nu);
  }
  return audit;
}

void require_eta_containment(const EtaInterval& interval, const ProblemFamily& family,
                             const std::vector<Parameter>& samples, const EpsSolverOptions& options) {
  const ContainmentAudit audit = audit_eta_interval(interval, family, samples, options);
  if (!audit.ok()) {
    raise(ErrorCode::ContainmentViolation,
          std::to_string(audit.violations.size()) + " parameter(s) with eta* outside [" +
              std::to_string(interval.eta_minus) + ", " + std::to_string(interval.eta_plus) +
              "], first at " + to_string(audit.violations.front()));
  }
}

}  // namespace epsrb
