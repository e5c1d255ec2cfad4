#include "epsrb/elliptic.hpp"

#include "epsrb/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

namespace epsrb::elliptic {

using std::numbers::pi;

double Profile::operator()(double x) const {
  double acc = 0.0;
  for (std::size_t k = poly.size(); k-- > 0;) acc = acc * x + poly[k];
  for (std::size_t k = 0; k < sine.size(); ++k) acc += sine[k] * std::sin(static_cast<double>(k + 1) * pi * x);
  return acc;
}

CoefficientField::CoefficientField(Profile base, std::vector<Profile> terms, double alpha)
    : base_(std::move(base)), terms_(std::move(terms)), alpha_(alpha) {
  if (!(alpha_ > 0.0)) raise(ErrorCode::InvalidArgument, "coefficient lower bound alpha must be positive");
}

CoefficientField CoefficientField::affine_sine() {
  return CoefficientField(Profile{{1.0}, {}}, {Profile{{1.0}, {}}, Profile{{}, {1.0}}}, 0.6);
}

CoefficientField CoefficientField::constant(double value, std::size_t param_dim) {
  return CoefficientField(Profile{{value}, {}}, std::vector<Profile>(param_dim), value);
}

double CoefficientField::operator()(const Parameter& nu, double x) const {
  if (nu.size() != terms_.size()) raise(ErrorCode::DimensionMismatch, "coefficient parameter dimension");
  double a = base_(x);
  for (std::size_t j = 0; j < terms_.size(); ++j) a += nu[j] * terms_[j](x);
  return a;
}

ForcingComponent ForcingComponent::spectral(double scale, double decay) {
  ForcingComponent c;
  c.kind = Kind::Spectral;
  c.scale = scale;
  c.decay = decay;
  return c;
}

ForcingComponent ForcingComponent::sampled(Profile p) {
  ForcingComponent c;
  c.kind = Kind::Nodal;
  c.nodal = std::move(p);
  return c;
}

Forcing::Forcing(ForcingComponent base, std::vector<ForcingComponent> terms)
    : base_(std::move(base)), terms_(std::move(terms)) {}

Forcing Forcing::rough_smooth() {
  return Forcing(ForcingComponent::spectral(1.0, 1.0),
                 {ForcingComponent::spectral(-0.5, 1.0), ForcingComponent::spectral(1.0, 3.0)});
}

namespace {

Vector evaluate_component(const ForcingComponent& c, int n) {
  const double h = 1.0 / (n + 1);
  Vector f = Vector::Zero(n);
  if (c.kind == ForcingComponent::Kind::Nodal) {
    for (int i = 0; i < n; ++i) f(i) = c.nodal((i + 1) * h);
    return f;
  }
  for (int k = 1; k <= n; ++k) {
    const double s = std::sin(k * pi * h / 2.0);
    const double lambda = 4.0 / (h * h) * s * s;
    const double coeff = c.scale * std::pow(static_cast<double>(k), -c.decay) * std::sqrt(2.0 * lambda);
    for (int i = 0; i < n; ++i) f(i) += coeff * std::sin(k * pi * (i + 1) * h);
  }
  return f;
}

Tridiagonal constant_stiffness(int n) { return assemble_stiffness(n, [](double) { return 1.0; }); }

}  // namespace

Vector Forcing::operator()(int n, const Parameter& nu) const {
  if (nu.size() != terms_.size()) raise(ErrorCode::DimensionMismatch, "forcing parameter dimension");
  Vector f = evaluate_component(base_, n);
  for (std::size_t j = 0; j < terms_.size(); ++j) {
    if (nu[j] != 0.0) f += nu[j] * evaluate_component(terms_[j], n);
  }
  return f;
}

Tridiagonal assemble_stiffness(int n, const std::function<double(double)>& a) {
  if (n < 1) raise(ErrorCode::InvalidArgument, "need at least one interior node");
  const double h = 1.0 / (n + 1);
  const double inv_h2 = 1.0 / (h * h);
  // a at the n+1 cell midpoints x_{i+1/2}, i = 0..n
  Vector mid(n + 1);
  for (int i = 0; i <= n; ++i) mid(i) = a((i + 0.5) * h);
  Vector diag(n), off(n - 1);
  for (int i = 0; i < n; ++i) diag(i) = (mid(i) + mid(i + 1)) * inv_h2;
  for (int i = 0; i + 1 < n; ++i) off(i) = -mid(i + 1) * inv_h2;
  return Tridiagonal(std::move(diag), std::move(off));
}

Spaces assemble_spaces(int n) {
  const Tridiagonal k0 = constant_stiffness(n);
  const double h = 1.0 / (n + 1);
  return {Space::tridiagonal_power(h, k0, 2), Space::tridiagonal_power(h, k0, -1)};
}

SineEigenpairs eigen_constant(int n) {
  if (n < 1) raise(ErrorCode::InvalidArgument, "need at least one interior node");
  const double h = 1.0 / (n + 1);
  SineEigenpairs out{Vector(n), Matrix(n, n)};
  for (int k = 1; k <= n; ++k) {
    const double s = std::sin(k * pi * h / 2.0);
    const double lambda = 4.0 / (h * h) * s * s;
    out.eigenvalues(k - 1) = lambda;
    // ||sin(k pi x_.)||_Y^2 = h / lambda * (n + 1) / 2 = 1 / (2 lambda)
    const double scale = std::sqrt(2.0 * lambda);
    for (int i = 0; i < n; ++i) out.vectors(i, k - 1) = scale * std::sin(k * pi * (i + 1) * h);
  }
  return out;
}

namespace {

Tridiagonal checked_stiffness(const EllipticSpec& spec, const Parameter& nu) {
  if (!spec.box.contains(nu)) raise(ErrorCode::OutOfDomain, "parameter " + to_string(nu) + " outside the box");
  const double h = 1.0 / (spec.n + 1);
  const double alpha = spec.coefficient.alpha();
  // nodes and cell midpoints, including the boundary points
  for (int i = 0; i <= 2 * (spec.n + 1); ++i) {
    const double x = 0.5 * i * h;
    const double a = spec.coefficient(nu, x);
    if (!std::isfinite(a) || a < alpha) {
      raise(ErrorCode::CoercivityViolation, "a(" + std::to_string(x) + ") = " + std::to_string(a) +
                                                " below alpha = " + std::to_string(alpha) + " at " +
                                                to_string(nu));
    }
  }
  return assemble_stiffness(spec.n, [&](double x) { return spec.coefficient(nu, x); });
}

ProblemFamily make_family(const EllipticSpec& spec, const Spaces& spaces) {
  return ProblemFamily(spaces.x, spaces.y, spec.box, spec.eps,
                       [spec](const Parameter& nu) -> ProblemFamily::Assembly {
                         return {checked_stiffness(spec, nu).to_dense(), spec.forcing(spec.n, nu)};
                       });
}

// Euclidean-orthonormal sine vectors sqrt(2h) sin(k pi x_i) and eigenvalues of K0.
std::pair<Matrix, Vector> euclidean_sines(int n) {
  const SineEigenpairs e = eigen_constant(n);
  Matrix phi = e.vectors;
  const double h = 1.0 / (n + 1);
  for (Index k = 0; k < n; ++k) phi.col(k) *= std::sqrt(h / e.eigenvalues(k));
  return {phi, e.eigenvalues};
}

double min_eig(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

EllipticFamily::EllipticFamily(EllipticSpec spec)
    : spec_(std::move(spec)),
      spaces_(assemble_spaces(spec_.n)),
      k0_(constant_stiffness(spec_.n)),
      family_(make_family(spec_, spaces_)) {
  if (spec_.coefficient.param_dim() != spec_.box.dim() || spec_.forcing.param_dim() != spec_.box.dim()) {
    raise(ErrorCode::InvalidArgument, "coefficient/forcing parameter dimension differs from the box");
  }
  if (!(spec_.eps > 0.0)) raise(ErrorCode::InvalidArgument, "eps must be positive");
}

Tridiagonal EllipticFamily::stiffness(const Parameter& nu) const { return checked_stiffness(spec_, nu); }

Vector EllipticFamily::forcing(const Parameter& nu) const {
  if (!spec_.box.contains(nu)) raise(ErrorCode::OutOfDomain, "parameter " + to_string(nu) + " outside the box");
  return spec_.forcing(spec_.n, nu);
}

Matrix EllipticFamily::analytic_adjoint(const Parameter& nu) const {
  const auto [phi, lambda] = euclidean_sines(spec_.n);
  const Matrix k0_inv = phi * lambda.cwiseInverse().asDiagonal() * phi.transpose();
  const Matrix k0_inv2 = phi * lambda.cwiseAbs2().cwiseInverse().asDiagonal() * phi.transpose();
  return k0_inv2 * stiffness(nu).multiply(k0_inv);
}

EpsSolution EllipticFamily::solve_eps(const Parameter& nu, const EpsSolverOptions& options, double eps) const {
  const double e = eps > 0.0 ? eps : spec_.eps;
  return solve_dual(EpsProblem(family_.instance(nu), e), options);
}

Audit audit(const EllipticFamily& family, const std::vector<Parameter>& samples) {
  if (samples.empty()) raise(ErrorCode::EmptyGrid, "audit needs at least one parameter");
  const EllipticSpec& spec = family.spec();
  const int n = family.n();
  const double h = family.h();
  const Matrix k0 = family.reference_stiffness().to_dense();
  const double k0_min = eigen_constant(n).eigenvalues(0);
  const Matrix k0_sq = k0 * k0;
  const Matrix ref_energy = h * family.reference_stiffness().solve(Matrix(family.reference_stiffness().solve(
                                    Matrix(Matrix::Identity(n, n)))));  // h K0^{-2}

  const FamilyAudit base = audit_family(family.problem_family(), samples);
  Audit out;
  out.alpha = spec.coefficient.alpha();
  out.f_min = base.f_min;
  out.lambda_max = base.lambda_max;
  out.targets_feasible = base.targets_feasible;
  out.a_min = std::numeric_limits<double>::infinity();
  out.a_max = -out.a_min;
  out.coercivity_margin = out.gram_lower = out.graph_lower = std::numeric_limits<double>::infinity();
  out.graph_upper = 0.0;

  for (const auto& nu : samples) {
    for (int i = 0; i <= 2 * (n + 1); ++i) {
      const double a = spec.coefficient(nu, 0.5 * i * h);
      out.a_min = std::min(out.a_min, a);
      out.a_max = std::max(out.a_max, a);
    }
    const Matrix k = family.stiffness(nu).to_dense();
    out.coercivity_margin = std::min(out.coercivity_margin, min_eig(k) - out.alpha * k0_min);

    const FamilyInstance inst = family.problem_family().instance(nu);
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> gram(inst.gram.energy(), ref_energy, Eigen::EigenvaluesOnly);
    out.gram_lower = std::min(out.gram_lower, gram.eigenvalues()(0));

    const Matrix graph = Matrix::Identity(n, n) + k * k;
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> eq(graph, k0_sq, Eigen::EigenvaluesOnly);
    out.graph_lower = std::min(out.graph_lower, eq.eigenvalues()(0));
    out.graph_upper = std::max(out.graph_upper, eq.eigenvalues()(n - 1));
  }
  out.coercive = out.a_min >= out.alpha && out.coercivity_margin >= -1e-9 * k0_min;
  return out;
}

ShiftedNormBounds shifted_norm_bounds(const EllipticFamily& family, const Parameter& nu, double beta) {
  if (!(beta < 0.0)) raise(ErrorCode::InvalidArgument, "shift beta must be negative");
  Eigen::SelfAdjointEigenSolver<Matrix> es(family.stiffness(nu).to_dense(), Eigen::EigenvaluesOnly);
  // K_nu and beta I - K_nu commute, so the ratio runs over mu / (mu + |beta|).
  ShiftedNormBounds out;
  const auto ratio = [&](double mu) { return mu / (mu - beta); };
  out.ratio_min = ratio(es.eigenvalues()(0));
  out.ratio_max = ratio(es.eigenvalues()(family.n() - 1));
  const double alpha_op = family.spec().coefficient.alpha() * eigen_constant(family.n()).eigenvalues(0);
  out.lower_bound = alpha_op / (std::abs(beta) + alpha_op);
  out.upper_bound = 1.0;
  return out;
}

}  // namespace epsrb::elliptic
