#include <benchmark/benchmark.h>

#include "roadrecon/evaluation/sre.h"
#include "roadrecon/util/rng.h"

namespace roadrecon {
namespace {

void BM_HungarianMatch(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  Eigen::MatrixXd cost(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) cost(r, c) = rng.Uniform(0, 100);
  }
  for (auto _ : state) benchmark::DoNotOptimize(HungarianMatch(cost, 50.0));
}
BENCHMARK(BM_HungarianMatch)->RangeMultiplier(4)->Range(4, 256);

void BM_Skeletonize(benchmark::State& state) {
  const int strokes = static_cast<int>(state.range(0));
  InstanceMask mask(480, 270, 0);
  Rng rng(2);
  for (int s = 0; s < strokes; ++s) {
    const Polyline2d line = {{rng.Uniform(0, 480), rng.Uniform(0, 270)},
                             {rng.Uniform(0, 480), rng.Uniform(0, 270)}};
    DrawPolylines({line}, 3.0, 1, &mask);
  }
  for (auto _ : state) benchmark::DoNotOptimize(Skeletonize(mask, 1));
}
BENCHMARK(BM_Skeletonize)->Arg(1)->Arg(8)->Arg(32)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace roadrecon

BENCHMARK_MAIN();
