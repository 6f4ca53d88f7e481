#include <benchmark/benchmark.h>

#include "ghost/correlator.hpp"
#include "ghost/experiment.hpp"
#include "ghost/gain.hpp"
#include "ghost/lattice.hpp"
#include "ghost/wigner.hpp"

using namespace ghost;

namespace {

ExperimentConfig grid_config(std::size_t nx, std::size_t nt) {
  ExperimentConfig c = reference_config();
  c.grid.nx = nx;
  c.grid.nt = nt;
  return c;
}

}  // namespace

static void BM_FftFull(benchmark::State& state) {
  const Shape s{static_cast<std::size_t>(state.range(0)), 1, static_cast<std::size_t>(state.range(1))};
  cvec data(s.size(), cplx(1.0, 0.5));
  for (auto _ : state) {
    fft_full(data.data(), s, -1);
    fft_full(data.data(), s, +1);
    benchmark::DoNotOptimize(data.data());
  }
}
BENCHMARK(BM_FftFull)->Args({512, 32})->Args({64, 64})->Unit(benchmark::kMicrosecond);

static void BM_GainTable(benchmark::State& state) {
  const ExperimentConfig c = reference_config();
  const DerivedScales d = derive_scales(c.crystal, c.optics.focal_length);
  const Shape s{512, 1, 32};
  for (auto _ : state) {
    GainTable t(d, s, 2.0 * 3.141592653589793 / 115.0, 2.0 * 3.141592653589793 / 16.0);
    benchmark::DoNotOptimize(t.g().data());
  }
}
BENCHMARK(BM_GainTable)->Unit(benchmark::kMillisecond);

// One full crystal pass (nz steps) of a single shot.
static void BM_CrystalShot(benchmark::State& state) {
  const ExperimentConfig c = grid_config(static_cast<std::size_t>(state.range(0)),
                                         static_cast<std::size_t>(state.range(1)));
  const Experiment ex(c);
  std::size_t shot = 0;
  for (auto _ : state) {
    ShotState s = ex.crystal_exit(shot++);
    benchmark::DoNotOptimize(s.signal.data());
  }
}
BENCHMARK(BM_CrystalShot)->Args({512, 32})->Args({128, 8})->Unit(benchmark::kMillisecond);

static void BM_ConvolutionSample(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const std::size_t ny = static_cast<std::size_t>(state.range(1));
  RealMap a(n, ny, 0.1, Plane::Far), b(n, ny, 0.1, Plane::Far);
  for (std::size_t i = 0; i < a.size(); ++i) a.values[i] = std::sin(0.1 * i), b.values[i] = std::cos(0.2 * i);
  for (auto _ : state) benchmark::DoNotOptimize(convolution_sample(a, b, Padding::Periodic));
}
BENCHMARK(BM_ConvolutionSample)->Args({512, 1})->Args({64, 64})->Unit(benchmark::kMicrosecond);

static void BM_DetectFixed(benchmark::State& state) {
  const Experiment ex(reference_config());
  const Setup setup = ex.make_setup();
  const ShotState s = ex.crystal_exit(0);
  for (auto _ : state) {
    const Quadratures q = ex.detect(s, setup);
    benchmark::DoNotOptimize(ex.sample(q, setup, EstimatorKind::Fixed, Quadrature::Real));
  }
}
BENCHMARK(BM_DetectFixed)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
