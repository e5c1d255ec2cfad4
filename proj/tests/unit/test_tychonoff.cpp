#include "generators.hpp"

#include "epsrb/error.hpp"
#include "epsrb/family.hpp"
#include "epsrb/tychonoff.hpp"

#include <doctest.h>

#include <cmath>

using namespace epsrb;
using namespace epsrb::testing;

namespace {

GramOperator diag_gram(const Vector& lambdas) {
  const Space e = Space::euclidean(lambdas.size());
  return GramOperator(BoundedOperator(Matrix(lambdas.cwiseSqrt().asDiagonal()), e, e));
}

Vector vec2(double a, double b) { return (Vector(2) << a, b).finished(); }

// nu -> (L_nu, f_nu) with Lambda_nu = diag(1 + nu, 0.5) and ||f_nu|| = 1 + nu.
ProblemFamily small_family(double eps) {
  const Space e = Space::euclidean(2);
  return ProblemFamily(e, e, ParamBox({0.0}, {1.0}), eps, [](const Parameter& nu) {
    ProblemFamily::Assembly a;
    a.op = Matrix::Zero(2, 2);
    a.op.diagonal() << std::sqrt(1.0 + nu[0]), std::sqrt(0.5);
    a.target = vec2(0.6, 0.8) * (1.0 + nu[0]);
    return a;
  });
}

}  // namespace

TEST_CASE("identity system") {
  const Vector w = solve_tychonoff(TychProblem(diag_gram(Vector::Ones(2)), vec2(2, 0), 1.0));
  CHECK((w - vec2(1, 0)).norm() <= 1e-15);
}

TEST_CASE("residual at the exact solution vanishes") {
  std::mt19937_64 rng(5);
  const GramOperator g(operator_with_spectrum(rng, log_spectrum(rng, 12, 1e-6, 1.0), true));
  const TychProblem p(g, random_vector(rng, 12), 1e-3);
  CHECK(residual(p, solve_tychonoff(p)).norm <= 1e-12);
}

TEST_CASE("diagonal residual and its bounds") {
  const TychProblem p(diag_gram(vec2(1.0, 0.25)), Vector::Zero(2), 0.5);
  const Residual r = residual(p, vec2(1, 0));
  CHECK((r.r - vec2(1.5, 0)).norm() <= 1e-15);
  CHECK(r.norm == doctest::Approx(1.5));
  const ResidualBounds b = residual_bounds(p);
  CHECK(b.lower == 0.5);
  CHECK(b.upper == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(b.lower * 1.0 <= r.norm);
  CHECK(r.norm <= b.upper * 1.0 + 1e-12);
}

TEST_CASE("eta must be positive") {
  CHECK_THROWS_AS(TychProblem(diag_gram(Vector::Ones(2)), vec2(1, 0), 0.0), Error);
}

TEST_CASE("interval from Lemma-style bounds") {
  // single sample with f_- = 1, eps = 0.25, L_+ = 2
  const Space e = Space::euclidean(2);
  const ProblemFamily fam(e, e, ParamBox({0.0}, {1.0}), 0.25, [](const Parameter&) {
    ProblemFamily::Assembly a;
    a.op = Matrix::Zero(2, 2);
    a.op.diagonal() << std::sqrt(2.0), 1.0;
    a.target = vec2(0.6, 0.8);
    return a;
  });
  const EtaInterval iv = estimate_eta_interval(fam, {{0.5}});
  CHECK(iv.v_minus == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(iv.eta_plus == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(iv.eta_minus <= iv.eta_plus);

  const EtaInterval direct = eta_interval_from_bounds(0.25, 0.375, 1.5);
  CHECK(direct.eta_minus == doctest::Approx(0.25 / 1.5));
  CHECK_THROWS_AS(eta_interval_from_bounds(0.25, 2.0, 1.0), Error);
  CHECK_THROWS_AS(eta_interval_from_bounds(0.25, 0.0, 1.0), Error);
}

TEST_CASE("infeasible family is rejected") {
  try {
    estimate_eta_interval(small_family(1.5), {{0.0}, {1.0}});
    FAIL("expected InfeasibleFamily");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InfeasibleFamily);
  }
}

TEST_CASE("containment audit") {
  const ProblemFamily fam = small_family(0.3);
  const std::vector<Parameter> samples{{0.0}, {0.25}, {0.5}, {0.75}, {1.0}};
  const EtaInterval iv = estimate_eta_interval(fam, samples, 2.0);
  const ContainmentAudit a = audit_eta_interval(iv, fam, samples);
  CHECK(a.ok());
  CHECK(a.eta_star_min >= iv.eta_minus);
  CHECK(a.eta_star_max <= iv.eta_plus);
  CHECK_NOTHROW(require_eta_containment(iv, fam, samples));

  const EtaInterval narrow = eta_interval_from_bounds(0.3, iv.v_plus / 2.0 * 0.999, iv.v_plus / 2.0 * 1.001);
  CHECK_FALSE(audit_eta_interval(narrow, fam, samples).ok());
  CHECK_THROWS_AS(require_eta_containment(narrow, fam, samples), Error);
}

TEST_CASE("SPD guarantee, residual bracket and monotone damping on random systems") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 2 + static_cast<Index>(rng() % 16);
    const GramOperator g(operator_with_spectrum(rng, log_spectrum(rng, n, 1e-8, 5.0), trial % 2 == 0));
    const Vector f = random_vector(rng, n);
    const double eta1 = log_uniform(rng, 1e-6, 1.0);
    const double eta2 = eta1 * uniform(rng, 1.01, 10.0);

    const Matrix shifted = g.energy() + eta1 * g.space().gram();
    CHECK(y_eigenvalues(0.5 * (shifted + shifted.transpose()), g.space())(0) >= eta1 - 1e-12);

    const TychProblem p(g, f, eta1);
    const Vector exact = solve_tychonoff(p);
    CHECK(g.space().norm(solve_tychonoff(TychProblem(g, f, eta2))) <= g.space().norm(exact) * (1.0 + 1e-12));

    const ResidualBounds b = residual_bounds(p);
    for (int k = 0; k < 10; ++k) {
      const Vector w = exact + random_vector(rng, n);
      const double err = g.space().norm(Vector(exact - w));
      const double r = residual(p, w).norm;
      CHECK(b.lower * err <= r * (1.0 + 1e-10));
      CHECK(r <= b.upper * err * (1.0 + 1e-10));
    }
  }
}
