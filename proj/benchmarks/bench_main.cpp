#include <benchmark/benchmark.h>

#include <map>

#include "moranq/moranq.hpp"

using namespace moranq;

namespace {

const DiscretizedMeasure& cantor_atoms(std::size_t depth) {
  static const auto sys = MoranSystem::cantor(1.0 / 3.0);
  static const auto mu = CylinderMeasure::uniform(sys);
  static std::map<std::size_t, DiscretizedMeasure> cache;
  auto it = cache.find(depth);
  if (it == cache.end()) it = cache.emplace(depth, discretize(mu, sys, depth)).first;
  return it->second;
}

void BM_Discretize(benchmark::State& state) {
  const auto sys = MoranSystem::carpet4(0.25);
  const auto mu = CylinderMeasure::uniform(sys);
  for (auto _ : state) {
    benchmark::DoNotOptimize(discretize(mu, sys, static_cast<std::size_t>(state.range(0))));
  }
}
BENCHMARK(BM_Discretize)->Arg(4)->Arg(6);

void BM_BuildLambda(benchmark::State& state) {
  const auto sys = MoranSystem::alternating();
  const auto mu = CylinderMeasure::uniform(sys);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_lambda(sys, mu, static_cast<int>(state.range(0)), 2.0));
  }
}
BENCHMARK(BM_BuildLambda)->DenseRange(1, 5, 2);

void BM_Lloyd(benchmark::State& state) {
  const auto& atoms = cantor_atoms(10);
  LloydConfig cfg;
  cfg.threads = 1;
  cfg.restarts = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lloyd(atoms, static_cast<std::size_t>(state.range(0)), 2.0, cfg));
  }
}
BENCHMARK(BM_Lloyd)->Arg(4)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_LloydMedian(benchmark::State& state) {
  const auto& atoms = cantor_atoms(8);
  LloydConfig cfg;
  cfg.threads = 1;
  cfg.restarts = 1;
  for (auto _ : state) benchmark::DoNotOptimize(lloyd(atoms, 8, 1.0, cfg));
}
BENCHMARK(BM_LloydMedian)->Unit(benchmark::kMillisecond);

void BM_ErrorCurve(benchmark::State& state) {
  const auto& atoms = cantor_atoms(10);
  LloydConfig cfg;
  cfg.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(error_curve(atoms, 1, static_cast<std::size_t>(state.range(0)), 2.0, cfg));
  }
}
BENCHMARK(BM_ErrorCurve)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_VoronoiCells(benchmark::State& state) {
  const auto& atoms = cantor_atoms(10);
  LloydConfig cfg;
  cfg.threads = 1;
  const Codebook book = lloyd(atoms, 32, 2.0, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(voronoi_cells(atoms, book.points, 2.0));
}
BENCHMARK(BM_VoronoiCells);

void BM_BruteForce(benchmark::State& state) {
  const auto& atoms = cantor_atoms(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(brute_force(atoms, static_cast<std::size_t>(state.range(0)), 2.0));
  }
}
BENCHMARK(BM_BruteForce)->DenseRange(1, 3);

}  // namespace
BENCHMARK_MAIN();
