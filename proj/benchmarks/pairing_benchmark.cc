#include <benchmark/benchmark.h>

#include "roadrecon/pairing/hsp.h"
#include "roadrecon/synthetic/scene.h"

namespace roadrecon {
namespace {

// `clips` passes along one straight road with the default rig, 5 m apart.
std::vector<CameraRecord> Site(int clips, int frames) {
  SceneSpec spec;
  spec.clips = 1;
  spec.ground_landmarks = 10;
  spec.structure_landmarks = 5;
  spec.render_masks = false;
  const RigCalibration rig = GenerateScene(spec).rig;
  std::vector<CameraRecord> records;
  for (int c = 0; c < clips; ++c) {
    const bool reverse = c % 2 == 1;
    for (int k = 0; k < frames; ++k) {
      const double x = reverse ? 5.0 * (frames - k) + 1.3 : 5.0 * k;
      const Pose body = Pose::FromYaw(reverse ? M_PI : 0.0, {x, reverse ? 1.8 : -1.8, 0.0});
      for (const auto& cam : rig.cameras) {
        records.push_back({"c" + std::to_string(c) + "_" + cam.name + "_" + std::to_string(k), c,
                           body * cam.camera_to_body, cam.intrinsics});
      }
    }
  }
  return records;
}

void BM_SelectPairs(benchmark::State& state) {
  const auto records = Site(8, static_cast<int>(state.range(0)));
  HspConfig config;
  config.k_neighbors = static_cast<int>(state.range(1));
  size_t pairs = 0;
  for (auto _ : state) pairs = SelectPairs(records, config).size();
  state.counters["images"] = static_cast<double>(records.size());
  state.counters["pairs"] = static_cast<double>(pairs);
}
BENCHMARK(BM_SelectPairs)->Args({16, 30})->Args({63, 30})->Args({63, 100})->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace roadrecon

BENCHMARK_MAIN();
