#include <benchmark/benchmark.h>

#include "gpr/framegen.hpp"
#include "gpr/kernels.hpp"
#include "gpr/rng.hpp"
#include "gpr/settools.hpp"

namespace {

using namespace gpr;

struct FrameFixture {
  std::vector<Signal> windows;
  std::vector<int> T, F;
  Signal x;

  explicit FrameFixture(int M) {
    const Window g = random_window(M, 11);
    const IndexSet Q(M, {0, 1, 3});
    const IndexSet P(M, {0, 2});
    const auto frame = assemble_frame(g, Lattice(IndexSet::full(M), IndexSet::full(M)), Q, P);
    windows = frame.windows();
    T = frame.lattice().T().members();
    F = frame.lattice().F().members();
    Rng rng(5);
    std::vector<cplx> v(static_cast<std::size_t>(M));
    for (auto& e : v) e = rng.complex_normal();
    x = Signal(std::move(v));
  }
};

void BM_FrameCoefficientsSerial(benchmark::State& state) {
  const FrameFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::frame_coefficients_serial(f.windows, f.T, f.F, f.x));
}

void BM_FrameCoefficientsOmp(benchmark::State& state) {
  const FrameFixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::frame_coefficients_omp(f.windows, f.T, f.F, f.x));
}

void BM_BetaSearchSerial(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::min_low_bias_subset_serial(M, bias_ratio_for(4.0)));
}

void BM_BetaSearchOmp(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::min_low_bias_subset_omp(M, bias_ratio_for(4.0)));
}

std::vector<Signal> spark_vectors(int M) {
  const Window g = random_window(M, 3);
  const Lattice lat(IndexSet(M, {0, 1}), IndexSet::full(M));
  std::vector<Signal> out;
  for (const auto& lambda : lat.points()) out.push_back(tf_shift(g.values(), lambda));
  return out;
}

void BM_SparkScanSerial(benchmark::State& state) {
  const auto v = spark_vectors(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::spark_scan_serial(v, kSparkThreshold));
}

void BM_SparkScanOmp(benchmark::State& state) {
  const auto v = spark_vectors(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::spark_scan_omp(v, kSparkThreshold));
}

}  // namespace

BENCHMARK(BM_FrameCoefficientsSerial)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_FrameCoefficientsOmp)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_BetaSearchSerial)->Arg(12)->Arg(16);
BENCHMARK(BM_BetaSearchOmp)->Arg(12)->Arg(16);
BENCHMARK(BM_SparkScanSerial)->Arg(4)->Arg(6);
BENCHMARK(BM_SparkScanOmp)->Arg(4)->Arg(6);

BENCHMARK_MAIN();
