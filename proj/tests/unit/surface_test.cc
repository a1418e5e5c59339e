#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "roadrecon/errors.h"
#include "roadrecon/geometry/camera.h"
#include "roadrecon/surface/bev.h"
#include "roadrecon/surface/elevation.h"
#include "roadrecon/surface/mesh.h"
#include "roadrecon/surface/semantics.h"
#include "roadrecon/util/rng.h"
#include "unit/field_fixture.h"

namespace roadrecon {
namespace {

std::vector<Eigen::Vector3d> Sample(int n, double x0, double x1, double y0, double y1,
                                    const std::function<double(double, double)>& z,
                                    uint64_t seed) {
  Rng rng(seed);
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < n; ++i) {
    const double x = rng.Uniform(x0, x1), y = rng.Uniform(y0, y1);
    pts.emplace_back(x, y, z(x, y));
  }
  return pts;
}

// Held-out regular grid strictly inside the sampled area.
double GridRmse(const ElevationField& f, double x0, double x1, double y0, double y1,
                const std::function<double(double, double)>& z) {
  double sum = 0.0;
  int n = 0;
  for (int i = 0; i <= 40; ++i) {
    for (int j = 0; j <= 10; ++j) {
      const double x = x0 + (x1 - x0) * (0.02 + 0.96 * i / 40.0);
      const double y = y0 + (y1 - y0) * (0.02 + 0.96 * j / 10.0);
      sum += std::pow(f.Evaluate(x, y) - z(x, y), 2);
      ++n;
    }
  }
  return std::sqrt(sum / n);
}

using testing::PlaneField;

CameraIntrinsics SmallIntrinsics() {
  CameraIntrinsics k;
  k.fx = k.fy = 100.0;
  k.cx = 80.0;
  k.cy = 60.0;
  k.width = 160;
  k.height = 120;
  return k;
}

CameraState Cam(const std::string& id, const Eigen::Vector3d& center, const Eigen::Vector3d& fwd) {
  CameraState c;
  c.image_id = id;
  c.pose = LookAtPose(center, fwd);
  c.intrinsics = SmallIntrinsics();
  return c;
}

TEST(FitElevation, FlatRoadIsRecovered) {
  auto z = [](double, double) { return 0.0; };
  const auto pts = Sample(300, 0, 50, -5, 5, z, 1);
  const ElevationField f = FitElevation(pts);
  EXPECT_LT(GridRmse(f, 0, 50, -5, 5, z), 1e-3);
}

TEST(FitElevation, SinusoidalRoadWithinFiveCentimeters) {
  auto z = [](double x, double) { return 0.5 * std::sin(x / 10.0); };
  const auto pts = Sample(500, 0, 100, -10, 10, z, 2);
  const ElevationField f = FitElevation(pts);
  EXPECT_LT(GridRmse(f, 0, 100, -10, 10, z), 0.05);
}

TEST(FitElevation, DegenerateInputsThrow) {
  std::vector<Eigen::Vector3d> collinear = {{0, 0, 0}, {1, 1, 0}, {2, 2, 0}};
  ElevationConfig cfg;
  cfg.min_points = 3;
  EXPECT_THROW(FitElevation(collinear, cfg), DegenerateExtentError);
  for (int i = 3; i < 20; ++i) collinear.emplace_back(i, i, 0.1 * i);
  EXPECT_THROW(FitElevation(collinear), DegenerateExtentError);
  EXPECT_THROW(FitElevation(Sample(9, 0, 10, 0, 10, [](double, double) { return 0.0; }, 3)),
               DegenerateExtentError);
}

TEST(FitElevation, LossHalvesAndTrainingRmseMatchesReportedLoss) {
  auto z = [](double x, double y) { return 0.3 * std::sin(x / 4.0) + 0.05 * y; };
  const auto pts = Sample(400, 0, 40, -5, 5, z, 4);
  const ElevationField f = FitElevation(pts);
  EXPECT_LE(f.final_loss, 0.5 * f.initial_loss);
  EXPECT_LE(FieldRmse(f, pts), 2.0 * std::sqrt(f.final_loss) + 1e-12);
}

TEST(FitElevation, HigherEncodingFitsHighFrequencyBetter) {
  auto z = [](double x, double) { return 0.05 * std::sin(2.0 * x); };
  const auto pts = Sample(400, 0, 20, -3, 3, z, 5);
  ElevationConfig cfg;
  cfg.iterations = 1500;
  cfg.frequencies = 0;
  const double loss0 = FitElevation(pts, cfg).final_loss;
  cfg.frequencies = 8;
  const double loss8 = FitElevation(pts, cfg).final_loss;
  EXPECT_LT(loss8, loss0);
}

TEST(FitElevation, DeterministicPerSeedAndFiniteInsideBounds) {
  auto z = [](double x, double y) { return 0.01 * x * y; };
  const auto pts = Sample(100, -5, 5, -5, 5, z, 6);
  ElevationConfig cfg;
  cfg.iterations = 200;
  const ElevationField a = FitElevation(pts, cfg);
  const ElevationField b = FitElevation(pts, cfg);
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const double x = rng.Uniform(a.min_x, a.max_x), y = rng.Uniform(a.min_y, a.max_y);
    ASSERT_EQ(a.Evaluate(x, y), b.Evaluate(x, y));
    ASSERT_TRUE(std::isfinite(a.Evaluate(x, y)));
  }
}

// Independent visibility oracle: homogeneous K [R^T | -R^T C] X.
int OracleCount(const Eigen::Vector3d& X, const std::vector<CameraState>& cams) {
  int count = 0;
  for (const auto& c : cams) {
    const Eigen::Matrix3d R = c.pose.rotation().toRotationMatrix();
    Eigen::Matrix<double, 3, 4> P;
    P.leftCols<3>() = R.transpose();
    P.col(3) = -R.transpose() * c.pose.translation();
    const Eigen::Vector3d h = c.intrinsics.K() * P * X.homogeneous();
    if (h.z() <= 0) continue;
    const double u = h.x() / h.z(), v = h.y() / h.z();
    if (u >= 0 && v >= 0 && u < c.intrinsics.width && v < c.intrinsics.height) ++count;
  }
  return count;
}

TEST(PaintMesh, CountsMatchBruteForceOracle) {
  const ElevationField f = PlaneField(0.02, -0.01, 0.0, -10, 10, -6, 6);
  RoadMesh mesh = BuildMesh(f, 0.25);
  std::map<std::string, CameraState> cams;
  std::vector<CameraState> list;
  SemanticMasks masks;
  Rng rng(11);
  for (int i = 0; i < 8; ++i) {
    const std::string id = "c" + std::to_string(i);
    const double yaw = rng.Uniform(-M_PI, M_PI);
    const Eigen::Vector3d center(rng.Uniform(-8, 8), rng.Uniform(-4, 4), 1.5);
    const Eigen::Vector3d fwd(std::cos(yaw), std::sin(yaw), -0.3);
    cams[id] = Cam(id, center, fwd);
    list.push_back(cams[id]);
    masks[id] = GrayImage(160, 120, static_cast<uint8_t>(i % kSemanticClassCount));
  }
  PaintMesh(cams, masks, {}, &mesh);
  int observed = 0;
  for (size_t i = 0; i < mesh.size(); ++i) {
    ASSERT_EQ(mesh.observations[i], OracleCount(mesh.vertices[i], list)) << i;
    int votes = 0;
    for (int v : mesh.votes[i]) votes += v;
    ASSERT_EQ(votes, mesh.observations[i]);
    observed += mesh.observations[i] > 0;
  }
  EXPECT_GT(observed, 100);
}

TEST(PaintMesh, VertexBehindEveryCameraIsUnobserved) {
  const ElevationField f = PlaneField(0, 0, 0, -1, 1, -1, 1);
  RoadMesh mesh = BuildMesh(f, 0.5);
  std::map<std::string, CameraState> cams = {{"a", Cam("a", {3, 0, 1.5}, {1, 0, -0.2})}};
  SemanticMasks masks = {{"a", GrayImage(160, 120, kLaneMarking)}};
  PaintMesh(cams, masks, {}, &mesh);
  for (size_t i = 0; i < mesh.size(); ++i) {
    EXPECT_EQ(mesh.observations[i], 0);
    EXPECT_EQ(mesh.VertexClass(static_cast<int>(i)), kUnknown);
  }
}

TEST(PaintMesh, VertexFacedByThreeOfSixCameras) {
  const ElevationField f = PlaneField(0, 0, 0, -0.5, 0.5, -0.5, 0.5);
  RoadMesh mesh = BuildMesh(f, 0.5);
  std::map<std::string, CameraState> cams;
  std::vector<CameraState> list;
  SemanticMasks masks;
  for (int i = 0; i < 6; ++i) {
    const double a = i * M_PI / 3.0;
    const Eigen::Vector3d center(6 * std::cos(a), 6 * std::sin(a), 1.5);
    // Even cameras look at the origin, odd ones look away from it.
    Eigen::Vector3d fwd = Eigen::Vector3d(0, 0, 0) - center;
    if (i % 2 == 1) fwd = -fwd;
    const std::string id = "c" + std::to_string(i);
    cams[id] = Cam(id, center, fwd);
    list.push_back(cams[id]);
    masks[id] = GrayImage(160, 120, kRoadSurface);
  }
  PaintMesh(cams, masks, {}, &mesh);
  int center = -1;
  for (size_t i = 0; i < mesh.size(); ++i) {
    if (mesh.vertices[i].head<2>().norm() < 1e-9) center = static_cast<int>(i);
  }
  ASSERT_GE(center, 0);
  EXPECT_EQ(OracleCount(mesh.vertices[center], list), 3);
  EXPECT_EQ(mesh.observations[center], 3);
}

TEST(PaintMesh, UniformLaneMarkingMasksAndColors) {
  const ElevationField f = PlaneField(0, 0, 0, 0, 10, -2, 2);
  RoadMesh mesh = BuildMesh(f, 0.5);
  std::map<std::string, CameraState> cams = {{"a", Cam("a", {-2, 0, 2}, {1, 0, -0.4})},
                                              {"b", Cam("b", {12, 0, 2}, {-1, 0, -0.4})}};
  SemanticMasks masks = {{"a", GrayImage(160, 120, kLaneMarking)},
                         {"b", GrayImage(160, 120, kLaneMarking)}};
  PhotometricImages images = {{"a", RgbImage(160, 120, {10, 20, 30})},
                              {"b", RgbImage(160, 120, {30, 40, 50})}};
  PaintMesh(cams, masks, images, &mesh);
  int observed = 0;
  for (size_t i = 0; i < mesh.size(); ++i) {
    if (mesh.observations[i] == 0) continue;
    ++observed;
    EXPECT_EQ(mesh.VertexClass(static_cast<int>(i)), kLaneMarking);
    if (mesh.observations[i] == 2) {
      EXPECT_EQ(mesh.VertexColor(static_cast<int>(i)), (std::array<uint8_t, 3>{20, 30, 40}));
    }
  }
  EXPECT_GT(observed, 0);
}

TEST(PaintMesh, TiesGoToRoadSurfaceAndMissingMasksThrow) {
  RoadMesh mesh = BuildMesh(PlaneField(0, 0, 0, 0, 1, 0, 1), 1.0);
  mesh.observations[0] = 2;
  mesh.votes[0][kLaneMarking] = 1;
  mesh.votes[0][kRoadSurface] = 1;
  EXPECT_EQ(mesh.VertexClass(0), kRoadSurface);
  mesh.votes[0] = {};
  mesh.votes[0][kLaneMarking] = 1;
  mesh.votes[0][kRoadTeeth] = 1;
  EXPECT_EQ(mesh.VertexClass(0), kLaneMarking);
  std::map<std::string, CameraState> cams = {{"a", Cam("a", {0, 0, 2}, {1, 0, -1})}};
  EXPECT_THROW(PaintMesh(cams, {}, {}, &mesh), NoCameraError);
}

TEST(BuildAndPaintMesh, RefinedHeightsFollowTheRefinedField) {
  auto z = [](double x, double) { return 0.02 * x; };
  const auto pts = Sample(200, 0, 10, -2, 2, z, 12);
  ElevationConfig ecfg;
  ecfg.iterations = 300;
  ElevationField field = FitElevation(pts, ecfg);
  const ElevationField before = field;
  std::map<std::string, CameraState> cams = {{"a", Cam("a", {-2, 0, 2}, {1, 0, -0.4})}};
  SemanticMasks masks = {{"a", GrayImage(160, 120, kRoadSurface)}};
  MeshConfig mcfg;
  mcfg.resolution = 0.5;
  mcfg.refine_iterations = 50;
  const RoadMesh mesh = BuildAndPaintMesh(&field, cams, masks, {}, pts, mcfg, ecfg);
  EXPECT_NE(field.Evaluate(5.0, 0.0), before.Evaluate(5.0, 0.0));
  for (const auto& v : mesh.vertices) ASSERT_NEAR(v.z(), field.Evaluate(v.x(), v.y()), 1e-6);
  EXPECT_LT(FieldRmse(field, pts), 0.05);
}

TEST(BuildMesh, GridSnappedToResolution) {
  const RoadMesh mesh = BuildMesh(PlaneField(0, 0, 1.0, -1.03, 2.04, 0.26, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(mesh.origin_x, -1.0);
  EXPECT_DOUBLE_EQ(mesh.origin_y, 0.5);
  EXPECT_EQ(mesh.cols, 7);
  EXPECT_EQ(mesh.rows, 2);
  EXPECT_EQ(mesh.faces.size(), 12u);
  for (const auto& v : mesh.vertices) EXPECT_DOUBLE_EQ(v.z(), 1.0);
}

// Mesh whose every vertex is observed once with the given class and color.
RoadMesh PaintedMesh(const ElevationField& f, double res, uint8_t cls) {
  RoadMesh mesh = BuildMesh(f, res);
  for (size_t i = 0; i < mesh.size(); ++i) {
    mesh.observations[i] = 1;
    mesh.votes[i][cls] = 1;
    mesh.color_sum[i] = Eigen::Vector3d(100, 110, 120);
    mesh.color_count[i] = 1;
  }
  return mesh;
}

TEST(ExportBev, FlatPaintedMeshGivesUniformRasters) {
  const RoadMesh mesh = PaintedMesh(PlaneField(0, 0, 0.25, 0, 5, 0, 2), 0.1, kRoadSurface);
  const BevSet bev = ExportBev(mesh, 0.1);
  EXPECT_EQ(bev.semantic.cells.width(), 51);
  EXPECT_EQ(bev.semantic.cells.height(), 21);
  for (uint8_t v : bev.semantic.cells.data()) EXPECT_EQ(v, kRoadSurface);
  for (const auto& c : bev.color.cells.data()) EXPECT_EQ(c, (std::array<uint8_t, 3>{100, 110, 120}));
  for (double z : bev.elevation.cells.data()) EXPECT_DOUBLE_EQ(z, 0.25);
}

TEST(ExportBev, SlopedMeshIsLinearWithinOneQuantizationStep) {
  const RoadMesh mesh = PaintedMesh(PlaneField(0.1, 0, 0, 0, 20, 0, 3), 0.1, kRoadSurface);
  const BevSet bev = ExportBev(mesh, 0.2);
  const QuantizedElevation q = QuantizeElevation(bev.elevation, bev.coverage);
  EXPECT_NEAR(q.z_min, 0.0, 1e-12);
  for (int r = 0; r < q.image.height(); ++r) {
    for (int c = 0; c < q.image.width(); ++c) {
      const double x = bev.elevation.CellCenter(c, r).x();
      ASSERT_NEAR(bev.elevation.cells.at(c, r), 0.1 * x, 1e-9);
      ASSERT_GE(q.image.at(c, r), 1);
      const double decoded = q.z_min + (q.image.at(c, r) - 1) * q.z_scale;
      ASSERT_LE(std::abs(decoded - 0.1 * x), q.z_scale);
    }
  }
}

TEST(ExportBev, UnobservedCellsAreBackgroundAndExportIsIdempotent) {
  RoadMesh mesh = PaintedMesh(PlaneField(0, 0, 0.5, 0, 4, 0, 4), 0.5, kLaneMarking);
  // A 5x5 hole: the nearest observed vertex to cell (3, 3) is 1 m away.
  for (int r = 1; r <= 5; ++r) {
    for (int c = 1; c <= 5; ++c) {
      mesh.observations[mesh.Index(c, r)] = 0;
      mesh.votes[mesh.Index(c, r)] = {};
    }
  }
  const BevSet a = ExportBev(mesh, 0.5);
  const BevSet b = ExportBev(mesh, 0.5);
  EXPECT_EQ(a.semantic.cells.at(3, 3), 0);
  EXPECT_EQ(a.elevation.cells.at(3, 3), 0.0);
  EXPECT_EQ(a.coverage.cells.at(3, 3), 0);
  EXPECT_EQ(a.semantic.cells.at(2, 3), 0);
  EXPECT_EQ(a.semantic.cells.at(0, 3), kLaneMarking);
  EXPECT_EQ(a.semantic.cells.at(1, 3), kLaneMarking);
  EXPECT_EQ(a.semantic.cells, b.semantic.cells);
  EXPECT_EQ(a.color.cells, b.color.cells);
  EXPECT_EQ(a.elevation.cells, b.elevation.cells);
}

TEST(ExportBev, FilesRoundTripSemanticRaster) {
  const RoadMesh mesh = PaintedMesh(PlaneField(0, 0, 0, -2, 2, 1, 3), 0.5, kRoadTeeth);
  const BevSet bev = ExportBev(mesh, 0.5);
  const auto dir = std::filesystem::temp_directory_path() / "roadrecon_bev_test";
  std::filesystem::create_directories(dir);
  const std::string prefix = (dir / "bev").string();
  WriteBev(prefix, bev);
  const BevRaster<uint8_t> back = ReadBevSemantic(prefix);
  EXPECT_EQ(back.cells, bev.semantic.cells);
  EXPECT_DOUBLE_EQ(back.origin_x, bev.semantic.origin_x);
  EXPECT_DOUBLE_EQ(back.origin_y, bev.semantic.origin_y);
  EXPECT_DOUBLE_EQ(back.resolution, 0.5);
  std::filesystem::remove_all(dir);
}

// Model with one landmark per entry, each seen at pixel (5, 5) of two images
// whose masks carry the given classes.
ReconstructionModel LabeledModel(const std::vector<std::pair<Eigen::Vector3d, uint8_t>>& pts,
                                 SemanticMasks* masks) {
  ReconstructionModel model;
  for (size_t i = 0; i < pts.size(); ++i) {
    const int64_t id = static_cast<int64_t>(i);
    Track t{id, {}};
    for (int k = 0; k < 2; ++k) {
      const std::string img = "i" + std::to_string(i) + "_" + std::to_string(k);
      model.cameras[img].image_id = img;
      (*masks)[img] = GrayImage(10, 10, pts[i].second);
      t.observations.push_back({img, id, {5.2, 5.7}});
    }
    model.tracks[id] = t;
    model.landmarks[id] = {id, pts[i].first, {0, 1}};
  }
  return model;
}

std::vector<Pose> StraightTrajectory(double length, double step) {
  std::vector<Pose> poses;
  for (double x = 0; x <= length + 1e-9; x += step) poses.push_back(Pose::FromTranslation({x, 0, 0}));
  return poses;
}

TEST(InitSurfacePoints, DenseRoadLandmarksPassThrough) {
  std::vector<std::pair<Eigen::Vector3d, uint8_t>> pts;
  for (int i = 0; i < 100; ++i) pts.push_back({{(i % 10) * 1.0 + 0.5, (i / 10) - 4.5, 0.0}, kRoadSurface});
  SemanticMasks masks;
  const ReconstructionModel model = LabeledModel(pts, &masks);
  const SurfaceInit init = InitSurfacePoints(model, masks, StraightTrajectory(10, 1));
  EXPECT_FALSE(init.augmented);
  EXPECT_EQ(init.points.size(), 100u);
}

TEST(InitSurfacePoints, EmptyModelFallsBackToCorridorGrid) {
  SurfaceInitConfig cfg;
  cfg.corridor_half_width = 2.0;
  std::vector<Pose> traj = StraightTrajectory(50, 5);
  for (auto& p : traj) p = Pose::FromTranslation(p.translation() + Eigen::Vector3d(0, 0, 0.3));
  const SurfaceInit init = InitSurfacePoints({}, {}, traj, cfg);
  EXPECT_TRUE(init.augmented);
  EXPECT_EQ(init.points.size(), 101u * 9u);  // rows every 0.5 m, 9 points across 4 m
  for (const auto& p : init.points) {
    EXPECT_EQ(p.class_id, kRoadSurface);
    EXPECT_DOUBLE_EQ(p.position.z(), 0.3);
    EXPECT_LE(std::abs(p.position.y()), 2.0 + 1e-12);
    EXPECT_GE(p.position.x(), -1e-12);
    EXPECT_LE(p.position.x(), 50 + 1e-9);
  }
}

TEST(InitSurfacePoints, NonRoadClassesExcludedAndEmptyInputsThrow) {
  SemanticMasks masks;
  const ReconstructionModel model = LabeledModel({{{0, 0, 0}, kRoadSurface},
                                                  {{1, 0, 0}, kLaneMarking},
                                                  {{2, 0, 0}, kRoadTeeth},
                                                  {{3, 0, 0}, kOther},
                                                  {{4, 0, 0}, kUnknown}},
                                                 &masks);
  const SurfaceInit init = InitSurfacePoints(model, masks, {});
  ASSERT_EQ(init.points.size(), 3u);
  EXPECT_EQ(init.points[0].class_id, kRoadSurface);
  EXPECT_EQ(init.points[1].class_id, kLaneMarking);
  EXPECT_EQ(init.points[2].class_id, kRoadTeeth);
  EXPECT_THROW(InitSurfacePoints({}, {}, {}), EmptySurfaceError);
}

}  // namespace
}  // namespace roadrecon
