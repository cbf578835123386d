// Serial vs OpenMP paths of the goal-estimation kernels.

#include <benchmark/benchmark.h>

#include "shctl/goal_estimator.hpp"

namespace {

using namespace shctl;

// Square room with a ring of pillars, `side` cells across.
OccupancyGrid bench_map(int side) {
  std::vector<CellState> cells(static_cast<std::size_t>(side) * side, CellState::Free);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const bool wall = x == 0 || y == 0 || x == side - 1 || y == side - 1;
      const bool pillar = x % 8 == 4 && y % 8 == 4;
      if (wall || pillar) cells[static_cast<std::size_t>(y) * side + x] = CellState::Occupied;
    }
  }
  return OccupancyGrid(side, side, 0.05, {}, std::move(cells));
}

kernels::Backend backend_of(const benchmark::State& state) {
  return state.range(1) == 0 ? kernels::Backend::Serial : kernels::Backend::OpenMP;
}

void BM_SampleFields(benchmark::State& state) {
  const OccupancyGrid grid = bench_map(static_cast<int>(state.range(0)));
  const WorldPoint x{grid.width() * 0.05 * 0.37, grid.height() * 0.05 * 0.61};
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::sample_fields(grid, x, 0.0, backend_of(state)));
  }
}

void BM_LikelihoodGrid(benchmark::State& state) {
  const OccupancyGrid grid = bench_map(static_cast<int>(state.range(0)));
  const WorldPoint x{grid.width() * 0.05 * 0.37, grid.height() * 0.05 * 0.61};
  const auto fields = kernels::sample_fields(grid, x, 0.0, kernels::Backend::Serial);
  std::vector<double> out(grid.size());
  for (auto _ : state) {
    kernels::likelihood_grid(grid, fields, {0.3, 0.0}, 0.3, 0.0, out, backend_of(state));
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_Posterior(benchmark::State& state) {
  const OccupancyGrid grid = bench_map(static_cast<int>(state.range(0)));
  std::vector<std::vector<double>> grids;
  for (int i = 0; i < 11; ++i) {
    const WorldPoint x{grid.width() * 0.05 * (0.2 + 0.05 * i), grid.height() * 0.05 * 0.5};
    grids.push_back(step_likelihood(grid, x, {0.3, 0.0}, 0.3, 0.0, kernels::Backend::Serial));
  }
  std::vector<const std::vector<double>*> ptrs;
  for (const auto& g : grids) ptrs.push_back(&g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(posterior_from_likelihoods(grid, ptrs, backend_of(state)));
  }
}

void Args(benchmark::internal::Benchmark* b) {
  for (int side : {64, 256}) {
    for (int backend : {0, 1}) b->Args({side, backend});
  }
  b->ArgNames({"side", "omp"})->Unit(benchmark::kMicrosecond);
}

BENCHMARK(BM_SampleFields)->Apply(Args);
BENCHMARK(BM_LikelihoodGrid)->Apply(Args);
BENCHMARK(BM_Posterior)->Apply(Args);

}  // namespace

BENCHMARK_MAIN();
