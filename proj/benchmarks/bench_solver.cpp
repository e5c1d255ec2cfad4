#include "epsrb/elliptic.hpp"
#include "epsrb/eps_solver.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace epsrb;

namespace {

void BM_SolveDualDiagonal(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector lam(n), f(n);
  for (Index k = 0; k < n; ++k) {
    lam[k] = std::pow(10.0, -6.0 * u(rng));
    f[k] = u(rng) - 0.5;
  }
  const double eps = 0.5 * f.norm();
  for (auto _ : state) {
    auto s = solve_dual_diagonal({lam.data(), static_cast<std::size_t>(n)}, {f.data(), static_cast<std::size_t>(n)}, eps);
    benchmark::DoNotOptimize(s.v.data());
  }
}
BENCHMARK(BM_SolveDualDiagonal)->RangeMultiplier(4)->Range(16, 4096);

// Full eps-solve on the elliptic family, Gram assembly included.
void BM_SolveDualElliptic(benchmark::State& state) {
  elliptic::EllipticSpec spec;
  spec.n = static_cast<int>(state.range(0));
  const elliptic::EllipticFamily fam(spec);
  const Parameter nu{0.5, 0.2};
  for (auto _ : state) {
    auto s = fam.solve_eps(nu);
    benchmark::DoNotOptimize(s.misfit);
  }
}
BENCHMARK(BM_SolveDualElliptic)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMillisecond);

}  // namespace
