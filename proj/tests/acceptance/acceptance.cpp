// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run all criteria
//   acceptance 3 9        run the listed criteria
//
// Exit status is non-zero when any selected criterion fails, including by
// exceeding its runtime budget.

#include "generators.hpp"

#include "epsrb/elliptic.hpp"
#include "epsrb/eps_solver.hpp"
#include "epsrb/greedy.hpp"
#include "epsrb/tychonoff.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace epsrb;
using namespace epsrb::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

struct Instance {
  BoundedOperator op;
  Vector f;
  double eps;
};

Instance random_instance(std::mt19937_64& rng, Index n, bool dense, double lambda_lo, double lambda_hi) {
  BoundedOperator op = operator_with_spectrum(rng, log_spectrum(rng, n, lambda_lo, lambda_hi), dense);
  const double f_norm = uniform(rng, 0.5, 5.0);
  Vector f = target_with_norm(rng, op.codomain(), f_norm);
  return {std::move(op), std::move(f), uniform(rng, 0.05, 0.95) * f_norm};
}

elliptic::EllipticFamily default_family() { return elliptic::EllipticFamily(elliptic::EllipticSpec{}); }

EtaInterval default_interval(const ProblemFamily& pf) {
  return estimate_eta_interval(pf, pf.box().tensor_grid({5, 5}), 2.0);
}

std::vector<Parameter> validation_parameters(const ProblemFamily& pf) {
  std::mt19937_64 rng(20240601);
  return pf.box().sample(rng, 50);
}

Outcome constraint_activity() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Index n = 2 + static_cast<Index>(rng() % 63);
    const Instance in = random_instance(rng, n, k % 2 == 1, 1e-6, 10.0);
    const EpsSolution s = solve_dual(EpsProblem(in.op, in.f, in.eps));
    worst = std::max(worst, std::abs(s.misfit - in.eps) / in.eps);
  }
  return {worst <= 1e-8, "max |misfit - eps| / eps = " + fmt(worst) + " over 200 instances"};
}

Outcome minimal_norm() {
  std::mt19937_64 rng(202);
  std::size_t violations = 0, competitors = 0;
  double min_gap = INFINITY;
  for (int k = 0; k < 20; ++k) {
    const Index n = 2 + static_cast<Index>(k % 3);
    const Instance in = random_instance(rng, n, k % 2 == 0, 1e-2, 10.0);
    const EpsSolution s = solve_dual(EpsProblem(in.op, in.f, in.eps));
    const double best = in.op.domain().norm(s.u_tilde);
    const auto lu = in.op.matrix().partialPivLu();
    std::size_t kept = 0;
    for (int c = 0; kept < 100000; ++c) {
      // r uniform in the eps-ball of Y, or on its boundary for every other draw
      Vector r = random_vector(rng, n);
      const double radius = c % 2 ? 1.0 : std::pow(uniform(rng, 0.0, 1.0), 1.0 / static_cast<double>(n));
      r *= in.eps * radius / in.op.codomain().norm(r);
      const Vector u = lu.solve(Vector(in.f + r));
      if (in.op.codomain().norm(Vector(in.op.apply(u) - in.f)) > in.eps) continue;  // rounding pushed it out
      ++competitors;
      ++kept;
      const double gap = in.op.domain().norm(u) - best;
      min_gap = std::min(min_gap, gap);
      if (best > in.op.domain().norm(u) + 1e-6) ++violations;
    }
  }
  return {violations == 0, std::to_string(competitors) + " feasible competitors (1e5 per instance), " + std::to_string(violations) +
              " violations, min(||u|| - ||u~||) = " + fmt(min_gap)};
}

Outcome zero_law() {
  std::mt19937_64 rng(303);
  int nonzero = 0;
  for (int k = 0; k < 100; ++k) {
    const Index n = 2 + static_cast<Index>(rng() % 30);
    const BoundedOperator op = operator_with_spectrum(rng, log_spectrum(rng, n, 1e-4, 10.0), k % 2 == 0);
    const double eps = uniform(rng, 0.1, 2.0);
    const Vector f = target_with_norm(rng, op.codomain(), eps * uniform(rng, 0.01, 0.999));
    const EpsSolution s = solve_dual(EpsProblem(op, f, eps));
    const bool exact = s.zero_solution && (s.v_tilde.array() == 0.0).all() && (s.u_tilde.array() == 0.0).all();
    nonzero += exact ? 0 : 1;
  }
  return {nonzero == 0, std::to_string(100 - nonzero) + "/100 exact zero solutions"};
}

Outcome diagonal_oracle() {
  std::mt19937_64 rng(404);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Index n = 1 + static_cast<Index>(rng() % 256);
    const Vector lam = log_spectrum(rng, n, 1e-6, 10.0);
    const Space e = Space::euclidean(n);
    const BoundedOperator op(Matrix(lam.cwiseSqrt().asDiagonal()), e, e);
    const double f_norm = uniform(rng, 0.5, 5.0);
    const Vector f = target_with_norm(rng, e, f_norm);
    const double eps = uniform(rng, 0.05, 0.95) * f_norm;
    const EpsSolution s = solve_dual(EpsProblem(op, f, eps));
    const DiagonalSolution d = solve_dual_diagonal({lam.data(), static_cast<std::size_t>(n)},
                                                   {f.data(), static_cast<std::size_t>(n)}, eps);
    worst = std::max(worst, (s.v_tilde - d.v).norm() / d.v.norm());
  }
  return {worst <= 1e-8, "max relative difference = " + fmt(worst) + " over 100 instances"};
}

Outcome adjoint_formula() {
  std::mt19937_64 rng(505);
  double worst = 0.0;
  for (int n : {8, 32, 128}) {
    elliptic::EllipticSpec spec;
    spec.n = n;
    const elliptic::EllipticFamily fam(spec);
    for (const auto& nu : spec.box.sample(rng, 10)) {
      const Matrix gram_based = adjoint(fam.problem_family().instance(nu).op()).matrix();
      worst = std::max(worst, relative_frobenius(gram_based, fam.analytic_adjoint(nu)));
    }
  }
  return {worst <= 1e-10, "max relative Frobenius error = " + fmt(worst) + " (n = 8, 32, 128)"};
}

Outcome residual_bracket() {
  std::mt19937_64 rng(606);
  int violations = 0;
  double lo_ratio = INFINITY, hi_ratio = INFINITY;
  for (int k = 0; k < 500; ++k) {
    const Index n = 2 + static_cast<Index>(rng() % 31);
    const GramOperator g(operator_with_spectrum(rng, log_spectrum(rng, n, 1e-8, 10.0), k % 2 == 0));
    const TychProblem p(g, random_vector(rng, n), log_uniform(rng, 1e-8, 1.0));
    const Vector exact = solve_tychonoff(p);
    Vector d = random_vector(rng, n);
    d *= log_uniform(rng, 1e-3, 1e2) * (1.0 + g.space().norm(exact)) / g.space().norm(d);
    const Vector w = exact + d;
    const double err = g.space().norm(Vector(exact - w));
    const double r = residual(p, w).norm;
    const ResidualBounds b = residual_bounds(p);
    // relative slack for rounding in the residual and the exact solve
    const bool ok = b.lower * err <= r * (1.0 + 1e-9) && r <= b.upper * err * (1.0 + 1e-9);
    violations += ok ? 0 : 1;
    lo_ratio = std::min(lo_ratio, r / (b.lower * err));
    hi_ratio = std::min(hi_ratio, b.upper * err / r);
  }
  return {violations == 0, std::to_string(violations) + " violations in 500 draws; min ||R||/(eta err) = " +
                               fmt(lo_ratio) + ", min (||Lambda||+eta) err/||R|| = " + fmt(hi_ratio)};
}

Outcome hessian_coercivity() {
  std::mt19937_64 rng(707);
  double smallest = INFINITY;
  int nonpositive = 0;
  for (int k = 0; k < 100; ++k) {
    const Index n = 2 + static_cast<Index>(rng() % 24);
    const double lo = k % 2 == 0 ? 1e-8 : log_uniform(rng, 1e-8, 1e-2);
    const BoundedOperator op = operator_with_spectrum(rng, log_spectrum(rng, n, lo, 1.0), k % 3 == 0);
    const double m = hessian_min_eig(op, random_vector(rng, n), log_uniform(rng, 1e-3, 1.0));
    smallest = std::min(smallest, m);
    nonpositive += m > 0.0 ? 0 : 1;
  }
  return {nonpositive == 0, "smallest eigenvalue over 100 instances = " + fmt(smallest)};
}

Outcome dual_coercivity() {
  std::mt19937_64 rng(808);
  double worst = INFINITY;
  int violations = 0;
  const double t = 1e6;
  for (int k = 0; k < 20; ++k) {
    const Index n = 2 + static_cast<Index>(rng() % 30);
    const Instance in = random_instance(rng, n, k % 2 == 0, 1e-4, 10.0);
    const EpsProblem p(in.op, in.f, in.eps);
    for (int j = 0; j < 100; ++j) {
      Vector v = random_vector(rng, n);
      v /= p.space().norm(v);
      const double ratio = eval_dual(p, Vector(t * v)) / t;
      worst = std::min(worst, ratio - in.eps);
      violations += ratio >= in.eps - 1e-6 ? 0 : 1;
    }
  }
  return {violations == 0, "min J(tv)/(t||v||) - eps = " + fmt(worst) + " over 20 x 100 directions"};
}

struct Trained {
  elliptic::EllipticFamily family = default_family();
  EtaInterval interval;
  TrainingGrid grid;
  ReducedBasis basis;
};

Trained train_default() {
  Trained t;
  const ProblemFamily& pf = t.family.problem_family();
  t.interval = default_interval(pf);
  t.grid = TrainingGrid::tensor(pf.box(), {4, 4}, t.interval, 16);
  t.basis = train_offline(pf, t.grid, 1e-6);
  return t;
}

Outcome greedy_convergence() {
  const Trained t = train_default();
  const ReducedBasis& b = t.basis;
  bool monotone = true;
  for (std::size_t k = 1; k < b.history.size(); ++k) monotone = monotone && b.history[k] <= b.history[k - 1];
  const double terminal = b.history.back();
  const auto rows = surrogate_report(b, t.grid, t.family.problem_family());
  std::size_t uncertified = 0;
  double worst = 0.0;
  for (const auto& r : rows) {
    worst = std::max(worst, r.true_error * r.eta / 1e-6);
    uncertified += r.true_error <= 1e-6 / r.eta ? 0 : 1;
  }
  const bool pass = monotone && b.converged() && terminal <= 1e-6 && uncertified == 0 && rows.size() == 256;
  return {pass, "m = " + std::to_string(b.size()) + ", monotone = " + (monotone ? "yes" : "no") +
                    ", terminal max surrogate = " + fmt(terminal) + ", max eta*err/delta = " + fmt(worst) +
                    " over " + std::to_string(rows.size()) + " points"};
}

Outcome online_feasibility() {
  const Trained t = train_default();
  const ProblemFamily& pf = t.family.problem_family();
  double worst = 0.0;
  for (const auto& nu : validation_parameters(pf)) {
    worst = std::max(worst, reconstruct_online(t.basis, pf, nu).misfit);
  }
  const std::size_t m = t.basis.size();
  return {worst <= 1.001 * pf.eps(), "max misfit/eps = " + fmt(worst / pf.eps()) + " over 50 parameters, m = " +
                                         std::to_string(m) + (m < 20 ? " (< 20)" : " (expected < 20, not met)")};
}

Outcome finite_dim() {
  std::mt19937_64 rng(1111);
  double worst_proj = 0.0, worst_misfit = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Index n = 3 + static_cast<Index>(rng() % 18);
    const Instance in = random_instance(rng, n, k % 2 == 0, 1e-4, 10.0);
    const Index dim_e = k % 3 == 0 ? 1 : k % 3 == 1 ? 2 : n;
    std::vector<Vector> basis;
    for (Index j = 0; j < dim_e; ++j) basis.push_back(random_vector(rng, n));
    const EpsProblem p(in.op, in.f, in.eps);
    const EpsSolution s = solve_finite_dim(p, basis);
    const Space& y = p.space();
    const Matrix q = y_orthonormalize(y, basis);
    const Vector r = in.op.apply(s.u_tilde) - in.f;
    const Vector proj = q * (q.transpose() * y.apply_gram(r));
    worst_proj = std::max(worst_proj, y.norm(proj) / y.norm(in.f));
    worst_misfit = std::max(worst_misfit, s.misfit / in.eps);
  }
  // misfit <= eps up to the root-finding tolerance on psi
  const double slack = EpsSolverOptions{}.psi_rtol;
  return {worst_proj <= 1e-8 && worst_misfit <= 1.0 + slack,
          "max ||P_E(Lu - f)|| / ||f|| = " + fmt(worst_proj) + ", max misfit/eps - 1 = " + fmt(worst_misfit - 1.0)};
}

Outcome eta_containment() {
  const auto fam = default_family();
  const ProblemFamily& pf = fam.problem_family();
  const EtaInterval iv = default_interval(pf);
  const ContainmentAudit a = audit_eta_interval(iv, pf, validation_parameters(pf));
  return {a.ok(), "eta* in [" + fmt(a.eta_star_min) + ", " + fmt(a.eta_star_max) + "] vs interval [" +
                      fmt(iv.eta_minus) + ", " + fmt(iv.eta_plus) + "], " + std::to_string(a.violations.size()) +
                      " violations"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "constraint activity", 10, constraint_activity},
      {2, "minimal norm", 30, minimal_norm},
      {3, "zero-solution law", 1, zero_law},
      {4, "diagonal oracle equivalence", 5, diagonal_oracle},
      {5, "adjoint formula", 20, adjoint_formula},
      {6, "residual bracket", 10, residual_bracket},
      {7, "hessian coercivity", 5, hessian_coercivity},
      {8, "dual coercivity", 5, dual_coercivity},
      {9, "greedy convergence", 60, greedy_convergence},
      {10, "online feasibility", 30, online_feasibility},
      {11, "finite-dimensional solvability", 10, finite_dim},
      {12, "eta-interval containment", 10, eta_containment},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("[%s] %2d %s: %s; %.2f s (budget %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", exceeded");
  }
  return failures == 0 ? 0 : 1;
}
