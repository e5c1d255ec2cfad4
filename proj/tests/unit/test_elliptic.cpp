#include "generators.hpp"

#include "epsrb/elliptic.hpp"
#include "epsrb/elliptic_config.hpp"
#include "epsrb/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace epsrb;
using namespace epsrb::elliptic;
using epsrb::testing::random_vector;
using std::numbers::pi;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected epsrb::Error");
  return ErrorCode::InvalidArgument;
}

EllipticSpec constant_spec(int n) {
  EllipticSpec s;
  s.n = n;
  s.coefficient = CoefficientField::constant(1.0, 2);
  return s;
}

Matrix dense_k0(int n) {
  const double h = 1.0 / (n + 1);
  Matrix k = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    k(i, i) = 2.0 / (h * h);
    if (i + 1 < n) k(i, i + 1) = k(i + 1, i) = -1.0 / (h * h);
  }
  return k;
}

double quadratic_form_error(int n) {
  const double h = 1.0 / (n + 1);
  const Tridiagonal k = assemble_stiffness(n, [](double x) { return 1.0 + x; });
  Vector u(n);
  for (int i = 0; i < n; ++i) u(i) = std::sin(pi * (i + 1) * h);
  return std::abs(h * u.dot(k.multiply(u)) - pi * pi / 2.0 * 1.5);
}

}  // namespace

TEST_CASE("constant-coefficient stencil") {
  const Matrix k = assemble_stiffness(3, [](double) { return 1.0; }).to_dense();
  Matrix expected(3, 3);
  expected << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  CHECK(relative_frobenius(k, 16.0 * expected) <= 1e-15);
}

TEST_CASE("quadratic form converges at second order") {
  const double e64 = quadratic_form_error(64);
  const double e128 = quadratic_form_error(128);
  CHECK(e64 < 1e-2);
  CHECK(e64 / e128 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("one interior node") {
  const Spaces s = assemble_spaces(1);
  CHECK(assemble_stiffness(1, [](double) { return 1.0; }).to_dense()(0, 0) == doctest::Approx(8.0));
  CHECK(s.x.gram()(0, 0) == doctest::Approx(32.0));
  CHECK(s.y.gram()(0, 0) == doctest::Approx(1.0 / 16.0));
  CHECK(eigen_constant(1).eigenvalues(0) == doctest::Approx(8.0));
}

TEST_CASE("H^-1 embedding constant") {
  std::mt19937_64 rng(1);
  const int n = 30;
  const double h = 1.0 / (n + 1);
  const Spaces s = assemble_spaces(n);
  const double lambda1 = Eigen::SelfAdjointEigenSolver<Matrix>(dense_k0(n)).eigenvalues()(0);
  for (int k = 0; k < 100; ++k) {
    const Vector v = random_vector(rng, n);
    CHECK(s.y.norm(v) <= std::sqrt(h) * v.norm() / std::sqrt(lambda1) * (1.0 + 1e-12));
  }
}

TEST_CASE("closed-form eigenpairs") {
  for (int n : {1, 5, 33}) {
    CAPTURE(n);
    const SineEigenpairs e = eigen_constant(n);
    const Vector dense = Eigen::SelfAdjointEigenSolver<Matrix>(dense_k0(n)).eigenvalues();
    CHECK((e.eigenvalues - dense).cwiseAbs().maxCoeff() <= 1e-10 * dense.maxCoeff());
    const Spaces s = assemble_spaces(n);
    const Matrix gram = e.vectors.transpose() * s.y.gram() * e.vectors;
    CHECK((gram - Matrix::Identity(n, n)).norm() <= 1e-10);
    const Matrix k0 = dense_k0(n);
    CHECK((k0 * e.vectors - e.vectors * e.eigenvalues.asDiagonal()).norm() <=
          1e-10 * (k0 * e.vectors).norm());
  }
}

TEST_CASE("constant coefficient: Lambda is diag(1/lambda_k) in the sine basis") {
  const int n = 20;
  const EllipticFamily fam(constant_spec(n));
  const FamilyInstance inst = fam.problem_family().instance({0.5, 0.2});
  const SineEigenpairs e = eigen_constant(n);
  const Matrix rep = e.vectors.transpose() * inst.gram.energy() * e.vectors;
  const Matrix expected = e.eigenvalues.cwiseInverse().asDiagonal();
  CHECK(relative_frobenius(rep, expected) <= 1e-10);
}

TEST_CASE("analytic adjoint") {
  SUBCASE("a == 1 collapses to K0^-2") {
    const EllipticFamily fam(constant_spec(16));
    const Matrix k0i = dense_k0(16).inverse();
    CHECK(relative_frobenius(fam.analytic_adjoint({0.1, 0.1}), k0i * k0i) <= 1e-10);
  }
  SUBCASE("equals the Gram-based adjoint at n = 32") {
    EllipticSpec spec;
    spec.n = 32;
    const EllipticFamily fam(spec);
    std::mt19937_64 rng(5);
    for (const auto& nu : spec.box.sample(rng, 10)) {
      const Matrix gram_based = adjoint(fam.problem_family().instance(nu).op()).matrix();
      CHECK(relative_frobenius(gram_based, fam.analytic_adjoint(nu)) <= 1e-10);
    }
  }
  SUBCASE("adjoint identity") {
    const EllipticFamily fam(EllipticSpec{});
    std::mt19937_64 rng(6);
    const Parameter nu{0.3, 0.35};
    const Matrix k = fam.stiffness(nu).to_dense();
    const Matrix ls = fam.analytic_adjoint(nu);
    const Spaces& s = fam.spaces();
    for (int t = 0; t < 50; ++t) {
      const Vector u = random_vector(rng, 64), v = random_vector(rng, 64);
      CHECK(std::abs(s.y.inner(k * u, v) - s.x.inner(u, ls * v)) <= 1e-10 * s.x.norm(u) * s.y.norm(v));
    }
  }
}

TEST_CASE("default forcing has 1/k and 1/k^3 sine coefficients") {
  const int n = 24;
  const EllipticFamily fam(EllipticSpec{24});
  const SineEigenpairs e = eigen_constant(n);
  const Vector c0 = e.vectors.transpose() * fam.spaces().y.gram() * fam.forcing({0.0, 0.0});
  const Vector c1 = e.vectors.transpose() * fam.spaces().y.gram() * fam.forcing({0.0, 0.4});
  for (int k = 1; k <= n; ++k) {
    CHECK(c0(k - 1) == doctest::Approx(1.0 / k).epsilon(1e-10));
    CHECK(c1(k - 1) - c0(k - 1) == doctest::Approx(0.4 / (k * k * k)).epsilon(1e-8));
  }
  CHECK(fam.spaces().y.norm(fam.forcing({1.0, 0.0})) > 0.5);
}

TEST_CASE("elliptic eps-solutions") {
  SUBCASE("minimality against an exact preimage witness") {
    const EllipticFamily fam(EllipticSpec{});
    const Parameter nu{0.4, 0.2};
    const double h = fam.h();
    Vector g(64);
    for (int i = 0; i < 64; ++i) g(i) = std::sin(pi * (i + 1) * h) + 0.3 * std::sin(2 * pi * (i + 1) * h);
    const Vector f = fam.stiffness(nu).multiply(g);
    const FamilyInstance inst = fam.problem_family().instance(nu);
    const EpsSolution s = solve_dual(EpsProblem(inst.gram, f, 0.05));
    CHECK(fam.spaces().y.norm(f) > 10 * 0.05);
    CHECK(fam.spaces().x.norm(s.u_tilde) <= fam.spaces().x.norm(g));
  }
  SUBCASE("eps above ||f|| gives zero") {
    const EllipticFamily fam(EllipticSpec{});
    const EpsSolution s = fam.solve_eps({0.5, 0.1}, {}, 10.0);
    CHECK(s.zero_solution);
    CHECK(s.u_tilde.isZero(0.0));
  }
  SUBCASE("a == 1 matches the diagonal oracle") {
    const int n = 48;
    const EllipticFamily fam(constant_spec(n));
    const Parameter nu{0.2, 0.3};
    const EpsSolution s = fam.solve_eps(nu);
    const SineEigenpairs e = eigen_constant(n);
    const Vector coeff = e.vectors.transpose() * fam.spaces().y.gram() * fam.forcing(nu);
    const Vector lam = e.eigenvalues.cwiseInverse();
    const DiagonalSolution d = solve_dual_diagonal({lam.data(), static_cast<std::size_t>(n)},
                                                   {coeff.data(), static_cast<std::size_t>(n)}, 0.05);
    const Vector v = e.vectors * d.v;
    CHECK(fam.spaces().y.norm(Vector(s.v_tilde - v)) <= 1e-8 * d.s);
    CHECK(std::abs(s.misfit - 0.05) <= 1e-8 * 0.05);
  }
}

TEST_CASE("domain and coercivity checks") {
  const EllipticFamily fam(EllipticSpec{16});
  CHECK(code_of([&] { fam.stiffness({1.5, 0.0}); }) == ErrorCode::OutOfDomain);
  CHECK(code_of([&] { fam.problem_family().instance({0.0, -0.1}); }) == ErrorCode::OutOfDomain);
  EllipticSpec bad;
  bad.n = 16;
  bad.coefficient = CoefficientField({{1.0}, {}}, {{{1.0}, {}}, {{}, {1.0}}}, 1.5);
  const EllipticFamily strict(bad);
  CHECK(code_of([&] { strict.stiffness({0.0, 0.0}); }) == ErrorCode::CoercivityViolation);
  CHECK_NOTHROW(strict.stiffness({1.0, 0.0}));
}

TEST_CASE("audit of the default family") {
  const EllipticFamily fam(EllipticSpec{32});
  std::mt19937_64 rng(9);
  std::vector<Parameter> samples = fam.spec().box.sample(rng, 20);
  for (const auto& c : fam.spec().box.corners()) samples.push_back(c);
  const Audit a = audit(fam, samples);
  CHECK(a.alpha == 0.6);
  CHECK(a.a_min == doctest::Approx(1.0));
  CHECK(a.a_max == doctest::Approx(2.4));
  CHECK(a.coercive);
  CHECK(a.coercivity_margin >= -1e-10);
  CHECK(a.targets_feasible);
  CHECK(a.f_min > fam.spec().eps);
  CHECK(a.gram_lower > 0.0);
  CHECK(a.graph_lower > 0.0);
  CHECK(std::isfinite(a.graph_upper));
  CHECK(a.graph_upper >= a.graph_lower);

  // coercivity invariant directly
  const double k0_min = eigen_constant(32).eigenvalues(0);
  for (const auto& nu : samples) {
    const double kmin = Eigen::SelfAdjointEigenSolver<Matrix>(fam.stiffness(nu).to_dense()).eigenvalues()(0);
    CHECK(kmin >= 0.6 * k0_min - 1e-10);
  }
}

TEST_CASE("shifted norm bounds") {
  const EllipticFamily fam(EllipticSpec{20});
  std::mt19937_64 rng(10);
  const Parameter nu{0.6, 0.1};
  const ShiftedNormBounds b = shifted_norm_bounds(fam, nu, -50.0);
  CHECK(b.lower_bound <= b.ratio_min);
  CHECK(b.ratio_min <= b.ratio_max);
  CHECK(b.ratio_max <= b.upper_bound);
  const Matrix k = fam.stiffness(nu).to_dense();
  for (int t = 0; t < 100; ++t) {
    const Vector x = random_vector(rng, 20);
    const double r = (k * x).norm() / (-50.0 * x - k * x).norm();
    CHECK(r >= b.ratio_min * (1 - 1e-12));
    CHECK(r <= b.ratio_max * (1 + 1e-12));
  }
  CHECK(code_of([&] { shifted_norm_bounds(fam, nu, 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("config: defaults, explicit forms and strictness") {
  const EllipticConfig d = parse_elliptic_config("{}");
  CHECK(d.spec.n == 64);
  CHECK(d.spec.eps == 0.05);
  CHECK(d.offline.nu_counts == std::vector<std::size_t>{4, 4});
  CHECK(d.offline.eta_count == 16);
  CHECK(d.offline.delta == 1e-6);
  CHECK(d.offline.safety_factor == 2.0);

  const EllipticConfig file = load_elliptic_config(EPSRB_SOURCE_DIR "/configs/default.json");
  const EllipticConfig explicit_form = parse_elliptic_config(R"({
    "n": 64, "eps": 0.05, "nu_box": [[0, 1], [0, 0.4]],
    "coefficient": {"base": {"poly": [1]}, "terms": [{"poly": [1]}, {"sine": [1]}], "alpha": 0.6},
    "forcing": {"base": {"spectral": {"scale": 1, "decay": 1}},
                "terms": [{"spectral": {"scale": -0.5, "decay": 1}}, {"spectral": {"scale": 1, "decay": 3}}]}
  })");
  CHECK(EllipticFamily(file.spec).problem_family().fingerprint() ==
        EllipticFamily(explicit_form.spec).problem_family().fingerprint());
  CHECK(EllipticFamily(file.spec).problem_family().fingerprint() !=
        EllipticFamily(parse_elliptic_config(R"({"eps": 0.051})").spec).problem_family().fingerprint());

  const auto parse_error = [](const char* text) {
    return code_of([&] { parse_elliptic_config(text); }) == ErrorCode::ConfigParse;
  };
  CHECK(parse_error("{"));
  CHECK(parse_error(R"({"bogus": 1})"));
  CHECK(parse_error(R"({"n": "64"})"));
  CHECK(parse_error(R"({"n": 0})"));
  CHECK(parse_error(R"({"eps": -1})"));
  CHECK(parse_error(R"({"coefficient": "unknown"})"));
  CHECK(parse_error(R"({"nu_box": [[0, 1]]})"));
  CHECK(parse_error(R"({"grid": {"nu": [4]}})"));
  CHECK(parse_error(R"({"grid": {"eta_spacing": "cubic"}})"));
  CHECK(parse_error(R"({"tolerances": {"online": 0}})"));
  CHECK(parse_error(R"({"forcing": {"base": {"spectral": {}, "nodal": {}}}})"));
  CHECK(code_of([] { load_elliptic_config("/nonexistent/epsrb.json"); }) == ErrorCode::Io);

  const EpsSolverOptions o = solver_options(d);
  CHECK(o.psi_rtol == 1e-10);
  CHECK(o.linear.cg_rtol == 1e-12);
}
