#include <benchmark/benchmark.h>

#include <random>

#include "pat/kernel.hpp"
#include "pat/phantom.hpp"
#include "pat/solver.hpp"
#include "pat/wave.hpp"

namespace {

struct Setup {
  explicit Setup(std::size_t n)
      : geometry(pat::ScanGeometry::square(0.05, 1540.0, n)),
        wave(geometry),
        kernel(pat::build_kernel_matrix(pat::AttenuationLaw(pat::NswLaw{1540.0, 1623.0, 1e-7}),
                                        geometry.temporal_grid(), 1540.0)),
        image(pat::rasterize(
            pat::PhantomSpec{{pat::Primitive::disc({0.01, -0.01}, 0.01, 1.0),
                              pat::Primitive::annulus({-0.01, 0.01}, 0.008, 0.014, 1.0)}},
            geometry)),
        data(pat::forward_W_alpha(wave, kernel, image)) {}

  pat::ScanGeometry geometry;
  pat::WaveOperator wave;
  pat::KernelMatrix kernel;
  pat::SourceImage image;
  pat::Sinogram data;
};

void BM_Forward(benchmark::State& state) {
  const Setup s(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pat::forward_W_alpha(s.wave, s.kernel, s.image));
}

void BM_Adjoint(benchmark::State& state) {
  const Setup s(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pat::adjoint_W_alpha(s.wave, s.kernel, s.data));
}

void BM_LandweberStep(benchmark::State& state) {
  const Setup s(static_cast<std::size_t>(state.range(0)));
  pat::SolverConfig config;
  config.lambda = 1.0;
  config.n_max = 1;
  for (auto _ : state) benchmark::DoNotOptimize(pat::landweber(s.data, s.wave, s.kernel, config));
}

void BM_KernelBuild(benchmark::State& state) {
  const auto g = pat::ScanGeometry::square(0.05, 1540.0, static_cast<std::size_t>(state.range(0)));
  const pat::AttenuationLaw law(pat::NswLaw{1540.0, 1623.0, 1e-7});
  for (auto _ : state)
    benchmark::DoNotOptimize(pat::build_kernel_matrix(law, g.temporal_grid(), 1540.0));
}

BENCHMARK(BM_Forward)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Adjoint)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LandweberStep)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KernelBuild)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
