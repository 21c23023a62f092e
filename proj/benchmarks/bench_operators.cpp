#include <benchmark/benchmark.h>

#include "latomo/phantom.hpp"
#include "latomo/projector.hpp"
#include "latomo/sart.hpp"
#include "latomo/ssatv1.hpp"
#include "latomo/ssatv2.hpp"
#include "latomo/tv.hpp"

namespace {

using namespace latomo;

// Desk-scale scan, built once.
struct Scan {
  ImageGrid truth = rasterize(builtin_head_phantom(), 256, 256, 0.75);
  FanBeamProjector projector{FanBeamGeometry{}, truth};
  Sinogram sinogram = projector.forward_project(truth);
};

const Scan& scan() {
  static const Scan s;
  return s;
}

void BM_ProjectorSetup(benchmark::State& state) {
  const ImageGrid grid(256, 256, 0.75);
  for (auto _ : state) {
    FanBeamProjector p(FanBeamGeometry{}, grid);
    benchmark::DoNotOptimize(p.num_views());
  }
}
BENCHMARK(BM_ProjectorSetup)->Unit(benchmark::kMillisecond);

void BM_ForwardProject(benchmark::State& state) {
  const Scan& s = scan();
  for (auto _ : state) benchmark::DoNotOptimize(s.projector.forward_project(s.truth));
}
BENCHMARK(BM_ForwardProject)->Unit(benchmark::kMillisecond);

void BM_SartSweep(benchmark::State& state) {
  const Scan& s = scan();
  ImageGrid f = s.projector.make_image();
  SartWorkspace work;
  for (auto _ : state) sart_sweep(f, s.sinogram, s.projector, 0.8, work);
}
BENCHMARK(BM_SartSweep)->Unit(benchmark::kMillisecond);

void BM_WtvGradient(benchmark::State& state) {
  const ImageGrid& f = scan().truth;
  const WeightField w = update_weights(f, 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(wtv_gradient(f, w));
}
BENCHMARK(BM_WtvGradient)->Unit(benchmark::kMicrosecond);

void BM_Ssatv1Gradient(benchmark::State& state) {
  const ImageGrid& f = scan().truth;
  const DerivKernel a = derivative_kernel(static_cast<int>(state.range(0)));
  const WeightField w = anisotropic_update_weights(f, 5.0, a);
  for (auto _ : state) benchmark::DoNotOptimize(ssatv1_gradient(f, w, a));
}
BENCHMARK(BM_Ssatv1Gradient)->Arg(2)->Arg(4)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_Downsample(benchmark::State& state) {
  const ImageGrid& f = scan().truth;
  const int s = static_cast<int>(state.range(0));
  const LowPassKernel k = binomial_kernel(s);
  for (auto _ : state) benchmark::DoNotOptimize(downsample_y(f, s, k));
}
BENCHMARK(BM_Downsample)->Arg(2)->Arg(4)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_UpsampleAdjoint(benchmark::State& state) {
  const ImageGrid& f = scan().truth;
  const int s = static_cast<int>(state.range(0));
  const LowPassKernel k = binomial_kernel(s);
  const ImageGrid g = downsample_y(f, s, k);
  for (auto _ : state) benchmark::DoNotOptimize(upsample_adjoint_y(g, s, k, f.height()));
}
BENCHMARK(BM_UpsampleAdjoint)->Arg(2)->Arg(4)->Arg(16)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
