#include <benchmark/benchmark.h>

#include "roadrecon/surface/bev.h"
#include "roadrecon/surface/mesh.h"
#include "roadrecon/synthetic/scene.h"
#include "roadrecon/vectormap/vector_map.h"
#include "unit/field_fixture.h"

namespace roadrecon {
namespace {

void BM_PaintMesh(benchmark::State& state) {
  const ElevationField field = testing::PlaneField(0.0, 0.0, 0.0, -10, 50, -8, 8);
  const RoadMesh empty = BuildMesh(field, 0.1);
  SceneSpec spec;
  spec.clips = 1;
  spec.ground_landmarks = 10;
  spec.structure_landmarks = 5;
  spec.render_masks = false;
  const RigCalibration rig = GenerateScene(spec).rig;
  std::map<std::string, CameraState> cameras;
  SemanticMasks masks;
  for (int k = 0; k < state.range(0); ++k) {
    const Pose body = Pose::FromYaw(0.0, {2.5 * k, -1.8, 0.0});
    for (const auto& cam : rig.cameras) {
      CameraState c;
      c.image_id = cam.name + std::to_string(k);
      c.pose = body * cam.camera_to_body;
      c.intrinsics = cam.intrinsics;
      cameras[c.image_id] = c;
      masks[c.image_id] = GrayImage(c.intrinsics.width, c.intrinsics.height, kRoadSurface);
    }
  }
  for (auto _ : state) {
    RoadMesh mesh = empty;
    PaintMesh(cameras, masks, {}, &mesh);
    benchmark::DoNotOptimize(mesh.observations.data());
  }
  state.counters["vertices"] = static_cast<double>(empty.size());
  state.counters["cameras"] = static_cast<double>(cameras.size());
}
BENCHMARK(BM_PaintMesh)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_ExtractPolylines(benchmark::State& state) {
  BevRaster<uint8_t> bev;
  bev.cells = Raster<uint8_t>(static_cast<int>(state.range(0)), 200, kRoadSurface);
  for (int c = 5; c < bev.cells.width() - 5; ++c) {
    for (int r : {48, 49, 50, 98, 99, 100, 148, 149, 150}) bev.cells.at(c, r) = kLaneMarking;
  }
  for (auto _ : state) benchmark::DoNotOptimize(ExtractPolylines(bev, kLaneMarking, 0.05));
}
BENCHMARK(BM_ExtractPolylines)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace roadrecon

BENCHMARK_MAIN();
