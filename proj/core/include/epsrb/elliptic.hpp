#pragma once

#include "epsrb/eps_solver.hpp"
#include "epsrb/family.hpp"
#include "epsrb/linalg.hpp"
#include "epsrb/space.hpp"

#include <functional>
#include <limits>
#include <vector>

namespace epsrb::elliptic {

/// x -> sum_k poly[k] x^k + sum_k sine[k] sin((k+1) pi x)
struct Profile {
  std::vector<double> poly;
  std::vector<double> sine;

  double operator()(double x) const;
};

/// Scalar diffusion coefficient a_nu(x) = base(x) + sum_j nu_j terms[j](x),
/// affine in nu, with a declared lower bound alpha > 0.
class CoefficientField {
 public:
  CoefficientField(Profile base, std::vector<Profile> terms, double alpha);

  /// 1 + nu_1 + nu_2 sin(pi x), alpha = 0.6.
  static CoefficientField affine_sine();
  /// a == value for every parameter (dimension `param_dim`).
  static CoefficientField constant(double value, std::size_t param_dim);

  double operator()(const Parameter& nu, double x) const;
  double alpha() const { return alpha_; }
  std::size_t param_dim() const { return terms_.size(); }

 private:
  Profile base_;
  std::vector<Profile> terms_;
  double alpha_;
};

/// One forcing component, as a Y-vector in nodal coordinates. Spectral
/// components have coefficient scale * k^(-decay) on the Y-orthonormal
/// discrete sine basis; nodal components sample an L2 function.
struct ForcingComponent {
  enum class Kind { Spectral, Nodal };
  Kind kind = Kind::Spectral;
  double scale = 1.0;
  double decay = 1.0;
  Profile nodal;

  static ForcingComponent spectral(double scale, double decay);
  static ForcingComponent sampled(Profile p);
};

/// f_nu = base + sum_j nu_j terms[j].
class Forcing {
 public:
  Forcing(ForcingComponent base, std::vector<ForcingComponent> terms);

  /// (1 - nu_1 / 2) phi_rough + nu_2 phi_smooth with phi_rough ~ 1/k and
  /// phi_smooth ~ 1/k^3 in the Y-orthonormal sine basis.
  static Forcing rough_smooth();

  Vector operator()(int n, const Parameter& nu) const;
  std::size_t param_dim() const { return terms_.size(); }

 private:
  ForcingComponent base_;
  std::vector<ForcingComponent> terms_;
};

/// Flux-form three-point stencil for -(a u')' on (0, 1) with homogeneous
/// Dirichlet conditions, n interior nodes, mesh width 1/(n+1), coefficient
/// sampled at cell midpoints.
Tridiagonal assemble_stiffness(int n, const std::function<double(double)>& a);

/// Discrete X = H^2 cap H^1_0 with G_X = h K0^2 and Y = H^{-1} with
/// G_Y = h K0^{-1}, K0 the constant-coefficient stiffness.
struct Spaces {
  Space x;
  Space y;
};
Spaces assemble_spaces(int n);

/// Closed-form eigenpairs of K0: lambda_k = (4/h^2) sin^2(k pi h / 2) with
/// eigenvectors sin(k pi x_i), normalized in the Y inner product.
struct SineEigenpairs {
  Vector eigenvalues;  ///< ascending
  Matrix vectors;      ///< column k is Y-orthonormal
};
SineEigenpairs eigen_constant(int n);

struct EllipticSpec {
  int n = 64;
  double eps = 0.05;
  ParamBox box{{0.0, 0.0}, {1.0, 0.4}};
  CoefficientField coefficient = CoefficientField::affine_sine();
  Forcing forcing = Forcing::rough_smooth();
};

/// The 1D family L_nu u = -(a_nu u')' : X -> Y with targets f_nu.
class EllipticFamily {
 public:
  explicit EllipticFamily(EllipticSpec spec);

  const EllipticSpec& spec() const { return spec_; }
  int n() const { return spec_.n; }
  double h() const { return 1.0 / (spec_.n + 1); }
  const Spaces& spaces() const { return spaces_; }
  const Tridiagonal& reference_stiffness() const { return k0_; }

  /// K_nu; throws OutOfDomain / CoercivityViolation (a < alpha at a node or
  /// cell midpoint).
  Tridiagonal stiffness(const Parameter& nu) const;
  Vector forcing(const Parameter& nu) const;

  const ProblemFamily& problem_family() const { return family_; }

  /// K0^{-2} K_nu K0^{-1}, assembled from the closed-form sine
  /// eigendecomposition of K0 (independent of the Gram-matrix route).
  Matrix analytic_adjoint(const Parameter& nu) const;

  /// Minimal-norm eps-solution at nu; `eps` <= 0 uses the family tolerance.
  EpsSolution solve_eps(const Parameter& nu, const EpsSolverOptions& options = {},
                        double eps = 0.0) const;

 private:
  EllipticSpec spec_;
  Spaces spaces_;
  Tridiagonal k0_;
  ProblemFamily family_;
};

/// Numerical checks of coercivity, target size, graph-norm equivalence and
/// the lower Gram bound Lambda_nu >= c Lambda_ref over a parameter sample.
struct Audit {
  double alpha = 0.0;             ///< declared lower bound on a
  double a_min = 0.0;             ///< observed min of a over sample x grid
  double a_max = 0.0;
  double coercivity_margin = 0.0; ///< min_nu lambda_min(K_nu) - alpha lambda_min(K0)
  double f_min = 0.0;             ///< min ||f_nu||_Y
  double lambda_max = 0.0;        ///< L_+ = max ||Lambda_nu||_{L(Y)}
  double gram_lower = 0.0;        ///< c with Lambda_nu >= c K0^{-1}
  double graph_lower = 0.0;       ///< equivalence constants of h(I + K_nu^2) vs G_X
  double graph_upper = 0.0;
  bool coercive = false;
  bool targets_feasible = false;
};

Audit audit(const EllipticFamily& family, const std::vector<Parameter>& samples);

/// Range of ||K_nu x|| / ||(beta I - K_nu) x|| over x for a shift beta < 0,
/// together with the a-priori bounds 1 and alpha_op / (|beta| + alpha_op),
/// alpha_op = alpha * lambda_min(K0) being the operator lower bound.
struct ShiftedNormBounds {
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 1.0;
};

ShiftedNormBounds shifted_norm_bounds(const EllipticFamily& family, const Parameter& nu, double beta);

}  // namespace epsrb::elliptic
