// Serial reference kernels against the blocked / OpenMP ones.
//   ./bench/bench_kernels --benchmark_counters_tabular=true
#include <memory>
#include <vector>

#include <benchmark/benchmark.h>

#include "fbmclt/cltlab.hpp"
#include "fbmclt/quad.hpp"
#include "fbmclt/sampler.hpp"

using namespace fbmclt;

namespace {

FbmSampler make_sampler(std::size_t res) {
  return FbmSampler(std::make_shared<const TimeGrid>(TimeGrid::geometric(1e3, 1.0, res)), Hurst(0.75),
                    SamplingMethod::cholesky);
}

std::vector<std::uint64_t> seeds(std::size_t n) {
  std::vector<std::uint64_t> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = 1000 + i;
  return s;
}

void BM_SampleColumnsReference(benchmark::State& st) {
  const FbmSampler s = make_sampler(static_cast<std::size_t>(st.range(0)));
  const auto sd = seeds(64);
  Eigen::MatrixXd out;
  for (auto _ : st) {
    s.sample_columns_reference(sd, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_SampleColumnsBlocked(benchmark::State& st) {
  const FbmSampler s = make_sampler(static_cast<std::size_t>(st.range(0)));
  const auto sd = seeds(64);
  Eigen::MatrixXd out;
  for (auto _ : st) {
    s.sample_columns(sd, out);
    benchmark::DoNotOptimize(out.data());
  }
}

ExperimentConfig experiment(int threads) {
  ExperimentConfig c;
  c.q = 2;
  c.h = Hurst(0.75);
  c.k_list = {1e3};
  c.t_list = {0.5, 1.0};
  c.reps = 256;
  c.seed = 1;
  c.resolution = 1024;
  c.parallel.threads = threads;
  return c;
}

void BM_SimulateXReference(benchmark::State& st) {
  const auto c = experiment(1);
  for (auto _ : st) benchmark::DoNotOptimize(simulate_x_reference(c));
}

void BM_SimulateXParallel(benchmark::State& st) {
  const auto c = experiment(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(simulate_x(c));
}

void BM_OracleMc(benchmark::State& st) {
  McOptions mc;
  mc.n_samples = 1 << 16;
  mc.seed = 1;
  mc.parallel.threads = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(variance_oracle_mc(2, Hurst(0.75), 1e3, 0.5, 1.0, mc));
}

}  // namespace

BENCHMARK(BM_SampleColumnsReference)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleColumnsBlocked)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateXReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateXParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleMc)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
