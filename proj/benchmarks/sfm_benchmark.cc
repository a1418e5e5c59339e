#include <benchmark/benchmark.h>

#include "roadrecon/sfm/bundle_adjustment.h"
#include "unit/sfm_fixture.h"

namespace roadrecon {
namespace {

void BM_BundleAdjust(benchmark::State& state) {
  testing::FixtureOptions o;
  o.frames = static_cast<int>(state.range(0));
  o.points = 40 * o.frames;
  o.pixel_sigma = 0.5;
  const auto f = testing::MakeFixture(o);
  const ReconstructionModel start = testing::Perturbed(f.truth, 0.05, 0.005, 0.05, 3);
  int iterations = 0;
  for (auto _ : state) {
    ReconstructionModel model = start;
    iterations = BundleAdjust(&model).summary.iterations;
  }
  state.counters["iterations"] = iterations;
  state.counters["observations"] = static_cast<double>(start.ObservationCount());
}
BENCHMARK(BM_BundleAdjust)->Arg(8)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_RigidBundleAdjust(benchmark::State& state) {
  testing::FixtureOptions o;
  o.frames = static_cast<int>(state.range(0));
  o.points = 40 * o.frames;
  o.camera_yaws = {0.0, M_PI / 2, M_PI, -M_PI / 2};
  o.pixel_sigma = 0.5;
  const auto f = testing::MakeFixture(o);
  const ReconstructionModel start = testing::Perturbed(f.truth, 0.05, 0.005, 0.05, 3);
  RigidBundleConfig config;
  config.remove_flagged = false;
  for (auto _ : state) {
    ReconstructionModel model = start;
    auto frames = f.frames;
    benchmark::DoNotOptimize(RigidBundleAdjust(&frames, &model, config));
  }
}
BENCHMARK(BM_RigidBundleAdjust)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace roadrecon

BENCHMARK_MAIN();
