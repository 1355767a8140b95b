#include <benchmark/benchmark.h>

#include "effdyn/ensemble.hpp"
#include "effdyn/poisson.hpp"

using namespace effdyn;

namespace {

void BM_BrownianNormals(benchmark::State& state) {
  const NoisePlan plan{1, 1.0, static_cast<int>(state.range(0)), 0};
  std::vector<double> out(static_cast<std::size_t>(plan.steps()));
  std::uint64_t path = 0;
  for (auto _ : state) {
    brownian_normals(plan, path++, 0, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * plan.steps());
}
BENCHMARK(BM_BrownianNormals)->Arg(1000)->Arg(8000);

void BM_BrownianNormalsRefined(benchmark::State& state) {
  const NoisePlan plan = NoisePlan{1, 1.0, 1000, 0}.refined(static_cast<int>(state.range(0)));
  std::vector<double> out(static_cast<std::size_t>(plan.steps()));
  std::uint64_t path = 0;
  for (auto _ : state) {
    brownian_normals(plan, path++, 0, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * plan.steps());
}
BENCHMARK(BM_BrownianNormalsRefined)->Arg(1)->Arg(3);

void BM_CoupledEnsemble(benchmark::State& state) {
  const auto gc = PotentialModel::gaussian_coupled(1, 1, 2, 1);
  const auto table = MeanForceTable::build_default(gc);
  const auto drift = EffectiveDrift::from_model(gc, table);
  const InitialSampler init(gc, InitialLaw::equilibrium(), 1);
  const auto plan = NoisePlan::from_dt(1, 1.0, 1e-3);
  const int paths = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto ens = run_coupled_ensemble(gc, drift, init, plan, {paths, 1});
    benchmark::DoNotOptimize(ens.paths.data());
  }
  state.SetItemsProcessed(state.iterations() * paths * plan.steps());
}
BENCHMARK(BM_CoupledEnsemble)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_TableBuild(benchmark::State& state) {
  const auto dw = PotentialModel::double_well(1, 2, 1);
  for (auto _ : state) {
    auto t = MeanForceTable::build_default(dw, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(t.b().data());
  }
}
BENCHMARK(BM_TableBuild)->Arg(241)->Arg(961)->Unit(benchmark::kMillisecond);

void BM_PoissonSolve(benchmark::State& state) {
  auto U = [](double y) { return y * y / 2 + y * y * y * y / 4; };
  auto f = [](double y) { return y * y * y; };
  const PoissonGrid grid{static_cast<int>(state.range(0)), 8.0, std::nullopt};
  for (auto _ : state) {
    auto s = solve_poisson(U, f, 1.0, 0.0, 0.7, grid);
    benchmark::DoNotOptimize(s.u.data());
  }
}
BENCHMARK(BM_PoissonSolve)->Arg(2001)->Arg(8001)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
