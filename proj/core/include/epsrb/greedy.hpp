#pragma once

#include "epsrb/family.hpp"
#include "epsrb/linalg.hpp"
#include "epsrb/shifted_solve.hpp"
#include "epsrb/tychonoff.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace epsrb {

enum class EtaSpacing { Log, Uniform };

/// Product set nus x etas. Pairs are indexed lexicographically: nu-major,
/// eta-minor; that order is also the tie-break for equal surrogates.
struct TrainingGrid {
  std::vector<Parameter> nus;
  std::vector<double> etas;

  std::size_t size() const { return nus.size() * etas.size(); }

  static TrainingGrid tensor(const ParamBox& box, const std::vector<std::size_t>& nu_counts,
                             const EtaInterval& interval, std::size_t eta_count,
                             EtaSpacing spacing = EtaSpacing::Log);
};

std::vector<double> eta_points(const EtaInterval& interval, std::size_t count,
                               EtaSpacing spacing = EtaSpacing::Log);

enum class StopReason {
  Converged,  ///< max surrogate <= delta
  Stagnated,  ///< next snapshot numerically dependent (or already selected) while above delta
  Saturated,  ///< basis reached dim(Y) or the configured cap while above delta
};

std::string_view to_string(StopReason reason);

struct SelectedPair {
  Parameter nu;
  double eta = 0.0;
  std::size_t nu_index = 0;
  std::size_t eta_index = 0;
};

struct ReducedBasis {
  std::vector<SelectedPair> selected;
  std::vector<Vector> snapshots;  ///< w_i = w~(nu_i, eta_i)
  Matrix ortho;                   ///< Y-orthonormal columns spanning the snapshots
  /// history[k] = max surrogate over the grid with k basis vectors; one entry
  /// per sweep, so size() + 1 entries after a converged run.
  std::vector<double> history;
  double delta = 0.0;
  StopReason stop_reason = StopReason::Converged;

  std::size_t size() const { return snapshots.size(); }
  bool converged() const { return stop_reason == StopReason::Converged; }
};

struct GreedyOptions {
  /// Threads for the per-sweep surrogate evaluation; 0 = hardware concurrency.
  unsigned workers = 0;
  /// Reject a snapshot that keeps less than this fraction of its Y-norm after
  /// orthogonalization against the basis.
  double dependence_rtol = 1e-12;
  /// 0 = no cap beyond dim(Y).
  std::size_t max_basis = 0;
  LinearSolverOptions linear{};
};

/// Weak greedy over the (nu, eta) training grid. Each sweep Galerkin-projects
/// every training system onto the current basis (in the energy inner
/// product of Lambda_nu + eta I), scores it with the residual surrogate
/// ||R(nu, eta) w_proj||_Y, and admits the exact solution at the maximizer.
/// Throws EmptyGrid; non-convergence is reported through stop_reason.
ReducedBasis train_offline(const ProblemFamily& family, const TrainingGrid& grid, double delta,
                           const GreedyOptions& options = {});

struct Projection {
  Vector w;          ///< Galerkin approximation in span(basis)
  double surrogate;  ///< ||(Lambda + eta) w - f||_Y
};

/// Galerkin projection of one training system onto the basis (w = 0 for an
/// empty basis).
Projection project(const ReducedBasis& basis, const FamilyInstance& instance, double eta);

struct OnlineOptions {
  /// Gramian eigenvalues below cutoff * max eigenvalue are dropped.
  double cutoff = 1e-12;
};

struct OnlineResult {
  Vector alphas;    ///< coefficients on the orthonormalized basis vectors
  Vector v_approx;  ///< sum alpha_i w_i
  Vector u_approx;  ///< sum alpha_i L*_nu w_i
  double misfit = 0.0;  ///< ||L_nu u_approx - f_nu||_Y
  std::size_t m = 0;
  bool truncated = false;  ///< Gramian was rank-deficient at the cutoff
};

/// Least-squares projection of f_nu onto span{Lambda_nu w_i} through the
/// normal equations in the Y inner product. No eta is involved.
OnlineResult reconstruct_online(const ReducedBasis& basis, const ProblemFamily& family,
                                const Parameter& nu, const OnlineOptions& options = {});

struct SurrogateRow {
  Parameter nu;
  double eta = 0.0;
  double surrogate = 0.0;
  double true_error = 0.0;  ///< ||w~ - w_proj||_Y from an exact solve
  double lower = 0.0;       ///< eta
  double upper = 0.0;       ///< ||Lambda_nu|| + eta

  double effectivity() const { return true_error > 0.0 ? surrogate / true_error : 0.0; }
};

std::vector<SurrogateRow> surrogate_report(const ReducedBasis& basis, const TrainingGrid& grid,
                                           const ProblemFamily& family,
                                           const GreedyOptions& options = {});

/// Number of workers to use: `requested` if non-zero, otherwise the
/// EPSRB_WORKERS environment variable, otherwise hardware concurrency.
unsigned resolve_workers(unsigned requested);

}  // namespace epsrb
