#include "epsrb/elliptic.hpp"
#include "epsrb/greedy.hpp"
#include "epsrb/tychonoff.hpp"

#include <benchmark/benchmark.h>

using namespace epsrb;

namespace {

struct Setup {
  elliptic::EllipticFamily family{elliptic::EllipticSpec{}};
  EtaInterval interval;
  TrainingGrid grid;

  Setup() {
    const ProblemFamily& pf = family.problem_family();
    interval = estimate_eta_interval(pf, pf.box().tensor_grid({5, 5}), 2.0);
    grid = TrainingGrid::tensor(pf.box(), {4, 4}, interval, 16);
  }
};

const Setup& setup() {
  static const Setup s;
  return s;
}

void BM_TrainOffline(benchmark::State& state) {
  const Setup& s = setup();
  GreedyOptions opt;
  opt.workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    auto b = train_offline(s.family.problem_family(), s.grid, 1e-6, opt);
    benchmark::DoNotOptimize(b.history.back());
  }
}
BENCHMARK(BM_TrainOffline)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_OnlineQuery(benchmark::State& state) {
  const Setup& s = setup();
  const ReducedBasis b = train_offline(s.family.problem_family(), s.grid, 1e-6);
  const Parameter nu{0.37, 0.21};
  for (auto _ : state) {
    auto r = reconstruct_online(b, s.family.problem_family(), nu);
    benchmark::DoNotOptimize(r.misfit);
  }
  state.counters["m"] = static_cast<double>(b.size());
}
BENCHMARK(BM_OnlineQuery)->Unit(benchmark::kMicrosecond);

}  // namespace
