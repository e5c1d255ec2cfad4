#pragma once

#include "epsrb/eps_solver.hpp"
#include "epsrb/family.hpp"
#include "epsrb/linalg.hpp"
#include "epsrb/operator.hpp"
#include "epsrb/shifted_solve.hpp"

#include <vector>

namespace epsrb {

/// The regularized linear system (Lambda_nu + eta I) w = f_nu.
class TychProblem {
 public:
  TychProblem(GramOperator gram, Vector target, double eta);
  TychProblem(const FamilyInstance& instance, double eta);

  const GramOperator& gram() const { return gram_; }
  const Space& space() const { return gram_.space(); }
  const Vector& target() const { return target_; }
  double eta() const { return eta_; }

 private:
  GramOperator gram_;
  Vector target_;
  double eta_;
};

/// Exact solution w~ of the regularized system. The system is SPD with
/// smallest Y-eigenvalue >= eta, so only numerical breakdown raises
/// LinearSolveFailure.
Vector solve_tychonoff(const TychProblem& problem, const LinearSolverOptions& options = {},
                       LinearSolveStats* stats = nullptr);

struct Residual {
  Vector r;     ///< Lambda w + eta w - f
  double norm;  ///< ||r||_Y
};

Residual residual(const TychProblem& problem, const Vector& w);

/// Constants of the two-sided bound
///   lower ||w~ - w||_Y <= ||R w||_Y <= upper ||w~ - w||_Y
/// with lower = eta and upper = ||Lambda|| + eta (exact spectral norm).
struct ResidualBounds {
  double lower;
  double upper;
};

ResidualBounds residual_bounds(const TychProblem& problem);

/// [eta_-, eta_+] = [eps / v_+, eps / v_-], the range that contains
/// eps / ||v~_nu||_Y for every parameter.
struct EtaInterval {
  double eta_minus = 0.0;
  double eta_plus = 0.0;
  double v_minus = 0.0;
  double v_plus = 0.0;

  bool contains(double eta) const { return eta >= eta_minus && eta <= eta_plus; }
};

/// Explicit interval from solution-norm bounds; validates 0 < v_- <= v_+.
EtaInterval eta_interval_from_bounds(double eps, double v_minus, double v_plus);

/// v_- = (min ||f_nu|| - eps) / max ||Lambda_nu||, and
/// v_+ = safety_factor * max ||v~_nu||_Y, both over `samples`.
/// Throws InfeasibleFamily if some ||f_nu||_Y <= eps.
EtaInterval estimate_eta_interval(const ProblemFamily& family, const std::vector<Parameter>& samples,
                                  double safety_factor = 2.0, const EpsSolverOptions& options = {});

struct ContainmentAudit {
  double eta_star_min = 0.0;
  double eta_star_max = 0.0;
  std::vector<Parameter> violations;

  bool ok() const { return violations.empty(); }
};

/// Solves the eps-problem at each parameter and checks eta* in the interval.
ContainmentAudit audit_eta_interval(const EtaInterval& interval, const ProblemFamily& family,
                                    const std::vector<Parameter>& samples,
                                    const EpsSolverOptions& options = {});

/// audit_eta_interval, raising ContainmentViolation on any miss.
void require_eta_containment(const EtaInterval& interval, const ProblemFamily& family,
                             const std::vector<Parameter>& samples,
                             const EpsSolverOptions& options = {});

}  // namespace epsrb
