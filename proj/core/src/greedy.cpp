#include "epsrb/greedy.hpp"

#include "epsrb/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>

namespace epsrb {

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Converged: return "converged";
    case StopReason::Stagnated: return "stagnated";
    case StopReason::Saturated: return "saturated";
  }
  return "unknown";
}

std::vector<double> eta_points(const EtaInterval& interval, std::size_t count, EtaSpacing spacing) {
  if (count == 0) raise(ErrorCode::EmptyGrid, "eta grid with zero points");
  const double a = interval.eta_minus;
  const double b = interval.eta_plus;
  if (!(a > 0.0) || !(b >= a)) raise(ErrorCode::InvalidArgument, "invalid eta interval");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = spacing == EtaSpacing::Log ? std::sqrt(a * b) : 0.5 * (a + b);
    return out;
  }
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(count - 1);
    out[k] = spacing == EtaSpacing::Log ? a * std::pow(b / a, t) : a + t * (b - a);
  }
  out.front() = a;
  out.back() = b;
  return out;
}

TrainingGrid TrainingGrid::tensor(const ParamBox& box, const std::vector<std::size_t>& nu_counts,
                                  const EtaInterval& interval, std::size_t eta_count,
                                  EtaSpacing spacing) {
  return {box.tensor_grid(nu_counts), eta_points(interval, eta_count, spacing)};
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("EPSRB_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

namespace {

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count && !failed; i = next++) {
          try {
            body(i);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// Galerkin projection with Z = Lambda Q and GQ = G_Y Q precomputed.
Projection project_with(const FamilyInstance& inst, double eta, const Matrix& q, const Matrix& z,
                        const Matrix& gq) {
  const Space& y = inst.gram.space();
  Projection p;
  if (q.cols() == 0) {
    p.w = Vector::Zero(y.dim());
    p.surrogate = y.norm(inst.target);
    return p;
  }
  Matrix a = gq.transpose() * z + eta * (gq.transpose() * q);
  a = 0.5 * (a + a.transpose());
  const Vector b = gq.transpose() * inst.target;
  Eigen::LDLT<Matrix> ldlt(a);
  if (ldlt.info() != Eigen::Success) raise(ErrorCode::LinearSolveFailure, "reduced Galerkin system");
  const Vector c = ldlt.solve(b);
  p.w = q * c;
  p.surrogate = y.norm(Vector(z * c + eta * p.w - inst.target));
  return p;
}

void check_grid(const ProblemFamily& family, const TrainingGrid& grid) {
  if (grid.nus.empty() || grid.etas.empty()) raise(ErrorCode::EmptyGrid, "training grid is empty");
  for (double eta : grid.etas) {
    if (!(eta > 0.0) || !std::isfinite(eta)) raise(ErrorCode::InvalidArgument, "training eta must be positive");
  }
  for (const auto& nu : grid.nus) {
    if (!family.box().contains(nu)) raise(ErrorCode::OutOfDomain, "training parameter " + to_string(nu));
  }
}

}  // namespace

Projection project(const ReducedBasis& basis, const FamilyInstance& instance, double eta) {
  const Matrix& q = basis.ortho;
  if (q.cols() > 0 && q.rows() != instance.gram.dim()) {
    raise(ErrorCode::DimensionMismatch, "basis vectors do not match the family codomain");
  }
  const Matrix z = q.cols() > 0 ? Matrix(instance.gram.matrix() * q) : Matrix(instance.gram.dim(), 0);
  const Matrix gq = q.cols() > 0 ? Matrix(instance.gram.space().gram() * q) : Matrix(instance.gram.dim(), 0);
  return project_with(instance, eta, q, z, gq);
}

ReducedBasis train_offline(const ProblemFamily& family, const TrainingGrid& grid, double delta,
                           const GreedyOptions& options) {
  check_grid(family, grid);
  if (!(delta >= 0.0) || !std::isfinite(delta)) raise(ErrorCode::InvalidArgument, "delta must be >= 0");

  const Space& y = family.codomain();
  const Index dim = y.dim();
  const std::size_t n_nu = grid.nus.size();
  const std::size_t n_eta = grid.etas.size();
  const unsigned workers = resolve_workers(options.workers);
  const std::size_t cap = options.max_basis > 0 ? std::min<std::size_t>(options.max_basis, dim)
                                                : static_cast<std::size_t>(dim);

  const std::vector<FamilyInstance> inst = family.instances(grid.nus);
  std::vector<Matrix> z(n_nu, Matrix(dim, 0));  // Lambda_nu Q, grown column by column

  ReducedBasis basis;
  basis.delta = delta;
  basis.ortho = Matrix(dim, 0);
  Matrix gq(dim, 0);
  std::vector<double> scores(grid.size());

  for (;;) {
    parallel_for(n_nu, workers, [&](std::size_t i) {
      for (std::size_t j = 0; j < n_eta; ++j) {
        scores[i * n_eta + j] = project_with(inst[i], grid.etas[j], basis.ortho, z[i], gq).surrogate;
      }
    });
    std::size_t arg = 0;
    for (std::size_t k = 1; k < scores.size(); ++k) {
      if (scores[k] > scores[arg]) arg = k;
    }
    const double worst = scores[arg];
    basis.history.push_back(worst);
    if (worst <= delta) {
      basis.stop_reason = StopReason::Converged;
      break;
    }
    if (basis.size() >= cap) {
      basis.stop_reason = StopReason::Saturated;
      break;
    }

    const std::size_t i = arg / n_eta;
    const std::size_t j = arg % n_eta;
    const bool repeat = std::any_of(basis.selected.begin(), basis.selected.end(), [&](const SelectedPair& s) {
      return s.nu_index == i && s.eta_index == j;
    });
    if (repeat) {
      basis.stop_reason = StopReason::Stagnated;
      break;
    }

    Vector w = solve_tychonoff(TychProblem(inst[i], grid.etas[j]), options.linear);
    const double w_norm = y.norm(w);
    Vector q = w;
    for (int pass = 0; pass < 2; ++pass) {
      for (Index c = 0; c < basis.ortho.cols(); ++c) q -= gq.col(c).dot(q) * basis.ortho.col(c);
    }
    const double q_norm = y.norm(q);
    if (!(w_norm > 0.0) || q_norm <= options.dependence_rtol * w_norm) {
      basis.stop_reason = StopReason::Stagnated;
      break;
    }
    q /= q_norm;

    basis.selected.push_back({grid.nus[i], grid.etas[j], i, j});
    basis.snapshots.push_back(std::move(w));
    const Index m = basis.ortho.cols();
    basis.ortho.conservativeResize(Eigen::NoChange, m + 1);
    basis.ortho.col(m) = q;
    gq.conservativeResize(Eigen::NoChange, m + 1);
    gq.col(m) = y.apply_gram(q);
    for (std::size_t k = 0; k < n_nu; ++k) {
      z[k].conservativeResize(Eigen::NoChange, m + 1);
      z[k].col(m) = inst[k].gram.apply(q);
    }
  }
  return basis;
}

OnlineResult reconstruct_online(const ReducedBasis& basis, const ProblemFamily& family,
                                const Parameter& nu, const OnlineOptions& options) {
  if (basis.ortho.cols() == 0) raise(ErrorCode::EmptyBasis, "online reconstruction needs a trained basis");
  const Space& y = family.codomain();
  if (basis.ortho.rows() != y.dim()) raise(ErrorCode::DimensionMismatch, "basis does not match the family");
  const FamilyInstance inst = family.instance(nu);

  const Matrix z = inst.gram.matrix() * basis.ortho;  // Lambda_nu w_i
  const Matrix gz = y.gram() * z;
  Matrix gramian = z.transpose() * gz;
  gramian = 0.5 * (gramian + gramian.transpose());
  const Vector rhs = gz.transpose() * inst.target;

  Eigen::SelfAdjointEigenSolver<Matrix> es(gramian);
  if (es.info() != Eigen::Success) raise(ErrorCode::LinearSolveFailure, "online Gramian eigensolve");
  const Vector& ev = es.eigenvalues();
  const double cut = options.cutoff * ev.maxCoeff();
  OnlineResult out;
  out.m = static_cast<std::size_t>(basis.ortho.cols());
  Vector coeff = es.eigenvectors().transpose() * rhs;
  for (Index k = 0; k < ev.size(); ++k) {
    if (ev(k) > cut) {
      coeff(k) /= ev(k);
    } else {
      coeff(k) = 0.0;
      out.truncated = true;
    }
  }
  out.alphas = es.eigenvectors() * coeff;
  out.v_approx = basis.ortho * out.alphas;
  out.u_approx = inst.op().apply_adjoint(out.v_approx);
  out.misfit = y.norm(Vector(inst.op().apply(out.u_approx) - inst.target));
  return out;
}

std::vector<SurrogateRow> surrogate_report(const ReducedBasis& basis, const TrainingGrid& grid,
                                           const ProblemFamily& family, const GreedyOptions& options) {
  check_grid(family, grid);
  const std::vector<FamilyInstance> inst = family.instances(grid.nus);
  const std::size_t n_eta = grid.etas.size();
  std::vector<SurrogateRow> rows(grid.size());
  parallel_for(grid.nus.size(), resolve_workers(options.workers), [&](std::size_t i) {
    const double lambda_norm = inst[i].gram.spectrum().max;
    for (std::size_t j = 0; j < n_eta; ++j) {
      const double eta = grid.etas[j];
      const Projection p = project(basis, inst[i], eta);
      const Vector exact = solve_tychonoff(TychProblem(inst[i], eta), options.linear);
      SurrogateRow& row = rows[i * n_eta + j];
      row.nu = grid.nus[i];
      row.eta = eta;
      row.surrogate = p.surrogate;
      row.true_error = family.codomain().norm(Vector(exact - p.w));
      row.lower = eta;
      row.upper = lambda_norm + eta;
    }
  });
  return rows;
}

}  // namespace epsrb
