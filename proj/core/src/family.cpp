#include "epsrb/family.hpp"

#include "epsrb/error.hpp"
#include "epsrb/hash.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace epsrb {

std::string to_string(const Parameter& nu) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < nu.size(); ++i) os << (i ? ", " : "") << nu[i];
  os << ')';
  return os.str();
}

ParamBox::ParamBox(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size()) {
    raise(ErrorCode::InvalidArgument, "parameter box bounds must be non-empty and of equal length");
  }
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    if (!std::isfinite(lower_[j]) || !std::isfinite(upper_[j]) || lower_[j] > upper_[j]) {
      raise(ErrorCode::InvalidArgument, "parameter box coordinate " + std::to_string(j) +
                                            " has invalid bounds");
    }
  }
}

bool ParamBox::contains(const Parameter& nu) const {
  if (nu.size() != dim()) return false;
  for (std::size_t j = 0; j < dim(); ++j) {
    if (!(nu[j] >= lower_[j] && nu[j] <= upper_[j])) return false;
  }
  return true;
}

Parameter ParamBox::center() const {
  Parameter c(dim());
  for (std::size_t j = 0; j < dim(); ++j) c[j] = 0.5 * (lower_[j] + upper_[j]);
  return c;
}

std::vector<Parameter> ParamBox::corners() const {
  std::vector<Parameter> out;
  const std::size_t count = std::size_t{1} << dim();
  out.reserve(count);
  for (std::size_t mask = 0; mask < count; ++mask) {
    Parameter p(dim());
    for (std::size_t j = 0; j < dim(); ++j) {
      const bool hi = (mask >> (dim() - 1 - j)) & 1U;
      p[j] = hi ? upper_[j] : lower_[j];
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Parameter> ParamBox::tensor_grid(const std::vector<std::size_t>& counts) const {
  if (counts.size() != dim()) raise(ErrorCode::DimensionMismatch, "tensor_grid: counts per coordinate");
  std::vector<std::vector<double>> axes(dim());
  std::size_t total = 1;
  for (std::size_t j = 0; j < dim(); ++j) {
    if (counts[j] == 0) raise(ErrorCode::EmptyGrid, "tensor_grid: zero points along a coordinate");
    total *= counts[j];
    if (counts[j] == 1) {
      axes[j] = {0.5 * (lower_[j] + upper_[j])};
    } else {
      for (std::size_t k = 0; k < counts[j]; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(counts[j] - 1);
        axes[j].push_back(k + 1 == counts[j] ? upper_[j] : lower_[j] + t * (upper_[j] - lower_[j]));
      }
    }
  }
  std::vector<Parameter> out;
  out.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Parameter p(dim());
    std::size_t rem = flat;
    for (std::size_t j = dim(); j-- > 0;) {
      p[j] = axes[j][rem % counts[j]];
      rem /= counts[j];
    }
    out.push_back(std::move(p));
  }
  return out;
}

Parameter ParamBox::sample(std::mt19937_64& rng) const {
  Parameter p(dim());
  for (std::size_t j = 0; j < dim(); ++j) {
    std::uniform_real_distribution<double> u(lower_[j], upper_[j]);
    p[j] = lower_[j] == upper_[j] ? lower_[j] : u(rng);
  }
  return p;
}

std::vector<Parameter> ParamBox::sample(std::mt19937_64& rng, std::size_t count) const {
  std::vector<Parameter> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sample(rng));
  return out;
}

ProblemFamily::ProblemFamily(Space domain, Space codomain, ParamBox box, double eps,
                             Assembler assembler)
    : domain_(std::move(domain)),
      codomain_(std::move(codomain)),
      box_(std::move(box)),
      eps_(eps),
      assembler_(std::move(assembler)) {
  if (!(eps_ > 0.0) || !std::isfinite(eps_)) raise(ErrorCode::InvalidArgument, "eps must be positive");
  if (!assembler_) raise(ErrorCode::InvalidArgument, "family needs an assembler");
}

FamilyInstance ProblemFamily::instance(const Parameter& nu) const {
  if (!box_.contains(nu)) raise(ErrorCode::OutOfDomain, "parameter " + to_string(nu) + " outside the box");
  Assembly a = assembler_(nu);
  if (a.target.size() != codomain_.dim()) raise(ErrorCode::DimensionMismatch, "family target size");
  if (!a.target.allFinite()) raise(ErrorCode::NonFinite, "family target at " + to_string(nu));
  return FamilyInstance{nu, GramOperator(BoundedOperator(std::move(a.op), domain_, codomain_)),
                        std::move(a.target)};
}

std::vector<FamilyInstance> ProblemFamily::instances(const std::vector<Parameter>& nus) const {
  std::vector<FamilyInstance> out;
  out.reserve(nus.size());
  for (const auto& nu : nus) out.push_back(instance(nu));
  return out;
}

ProblemFamily ProblemFamily::with_eps(double eps) const {
  return ProblemFamily(domain_, codomain_, box_, eps, assembler_);
}

std::uint64_t ProblemFamily::fingerprint() const {
  Fnv1a h;
  h.value(domain_.gram_hash()).value(codomain_.gram_hash()).value(eps_);
  h.values(box_.lower()).values(box_.upper());
  std::vector<Parameter> probes = box_.corners();
  probes.push_back(box_.center());
  for (const auto& nu : probes) {
    const Assembly a = assembler_(nu);
    h.matrix(a.op).matrix(a.target);
  }
  return h.digest();
}

FamilyAudit audit_family(const ProblemFamily& family, const std::vector<Parameter>& samples) {
  if (samples.empty()) raise(ErrorCode::EmptyGrid, "audit_family: no samples");
  FamilyAudit audit;
  audit.f_min = std::numeric_limits<double>::infinity();
  audit.lambda_min = std::numeric_limits<double>::infinity();
  for (const auto& nu : samples) {
    const FamilyInstance inst = family.instance(nu);
    audit.f_min = std::min(audit.f_min, family.codomain().norm(inst.target));
    const auto spec = inst.gram.spectrum();
    audit.lambda_max = std::max(audit.lambda_max, spec.max);
    audit.lambda_min = std::min(audit.lambda_min, spec.min);
  }
  audit.targets_feasible = audit.f_min > family.eps();
  audit.adjoint_injective = audit.lambda_min > 0.0;
  return audit;
}

}  // namespace epsrb
