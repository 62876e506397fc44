// Serial references against the OpenMP kernels. Thread count for the parallel
// variants follows OMP_NUM_THREADS.

#include <random>

#include <benchmark/benchmark.h>
#include <omp.h>

#include "robustlab/config.hpp"
#include "robustlab/lab.hpp"
#include "robustlab/metrics.hpp"
#include "robustlab/rkhs.hpp"

using namespace robustlab;

namespace {

PointSet random_points(Eigen::Index n, Eigen::Index dim) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  PointSet x(n, dim);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index d = 0; d < dim; ++d) x(i, d) = g(rng);
  return x;
}

void BM_GramSerial(benchmark::State& state) {
  const PointSet x = random_points(state.range(0), 3);
  const KernelSpec k = KernelSpec::gaussian(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(serial::gram_matrix(k, x));
}

void BM_GramParallel(benchmark::State& state) {
  const PointSet x = random_points(state.range(0), 3);
  const KernelSpec k = KernelSpec::gaussian(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(gram_matrix(k, x));
}

Eigen::MatrixXd random_cost(Eigen::Index n) {
  const PointSet x = random_points(n, 2);
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) c(i, j) = (x.row(i) - x.row(j)).squaredNorm();
  return c;
}

void BM_ClosureSerial(benchmark::State& state) {
  const Eigen::MatrixXd c = random_cost(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(serial::shortest_path_closure(c));
}

void BM_ClosureParallel(benchmark::State& state) {
  const Eigen::MatrixXd c = random_cost(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(shortest_path_closure(c));
}

// Replication loop of the all-data experiment, one thread vs all.
void BM_Replications(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.m = static_cast<int>(state.range(0));
  cfg.m_prefixes = {cfg.m};
  const int saved = omp_get_max_threads();
  if (state.range(1) == 1) omp_set_num_threads(1);
  for (auto _ : state) benchmark::DoNotOptimize(run_all_data(cfg));
  omp_set_num_threads(saved);
  state.counters["threads"] = state.range(1) == 1 ? 1 : saved;
}

}  // namespace

BENCHMARK(BM_GramSerial)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GramParallel)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClosureSerial)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClosureParallel)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Replications)->Args({100, 1})->Args({100, 0})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
