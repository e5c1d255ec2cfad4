#pragma once

#include "epsrb/linalg.hpp"
#include "epsrb/operator.hpp"
#include "epsrb/space.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace epsrb {

using Parameter = std::vector<double>;

std::string to_string(const Parameter& nu);

/// Compact box N = [lower_1, upper_1] x ... x [lower_d, upper_d].
class ParamBox {
 public:
  ParamBox(std::vector<double> lower, std::vector<double> upper);

  std::size_t dim() const { return lower_.size(); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }

  bool contains(const Parameter& nu) const;
  Parameter center() const;
  /// All 2^d vertices, lexicographic in (lower, upper) per coordinate.
  std::vector<Parameter> corners() const;
  /// Tensor grid with counts[j] equispaced points along coordinate j
  /// (a count of 1 places the point at the midpoint). Ordered
  /// lexicographically, last coordinate fastest.
  std::vector<Parameter> tensor_grid(const std::vector<std::size_t>& counts) const;

  Parameter sample(std::mt19937_64& rng) const;
  std::vector<Parameter> sample(std::mt19937_64& rng, std::size_t count) const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

/// One member (L_nu, f_nu) of a family, with its Gram operator assembled.
struct FamilyInstance {
  Parameter nu;
  GramOperator gram;
  Vector target;

  const BoundedOperator& op() const { return gram.op(); }
};

/// Parameter-dependent problem family nu -> (L_nu, f_nu) over fixed spaces
/// X and Y, a parameter box and an approximation tolerance eps.
///
/// The assembler returns the operator matrix and the target in coordinates
/// of X and Y. Instances are built on demand; the family itself is an
/// immutable value and may be shared between threads.
class ProblemFamily {
 public:
  struct Assembly {
    Matrix op;
    Vector target;
  };
  using Assembler = std::function<Assembly(const Parameter&)>;

  ProblemFamily(Space domain, Space codomain, ParamBox box, double eps, Assembler assembler);

  const Space& domain() const { return domain_; }
  const Space& codomain() const { return codomain_; }
  const ParamBox& box() const { return box_; }
  double eps() const { return eps_; }

  /// Throws OutOfDomain if nu is outside the box.
  FamilyInstance instance(const Parameter& nu) const;
  std::vector<FamilyInstance> instances(const std::vector<Parameter>& nus) const;

  ProblemFamily with_eps(double eps) const;

  /// Digest over both Gram matrices, eps, the box, and the assembled
  /// (L_nu, f_nu) at the box center and corners. Any edit of the family
  /// definition changes it.
  std::uint64_t fingerprint() const;

 private:
  Space domain_;
  Space codomain_;
  ParamBox box_;
  double eps_;
  Assembler assembler_;
};

/// Numerical audit of the standing assumptions on a finite parameter sample.
struct FamilyAudit {
  double f_min = 0.0;          ///< min ||f_nu||_Y (A3 needs f_min > eps)
  double lambda_max = 0.0;     ///< max ||Lambda_nu||_{L(Y)}
  double lambda_min = 0.0;     ///< min smallest eigenvalue of Lambda_nu (A2: > 0)
  bool targets_feasible = false;   ///< every ||f_nu||_Y > eps
  bool adjoint_injective = false;  ///< every Lambda_nu positive definite
};

FamilyAudit audit_family(const ProblemFamily& family, const std::vector<Parameter>& samples);

}  // namespace epsrb
