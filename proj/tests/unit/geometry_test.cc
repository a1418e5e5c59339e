#include <cmath>

#include <gtest/gtest.h>

#include "roadrecon/errors.h"
#include "roadrecon/geometry/camera.h"
#include "roadrecon/geometry/polygon.h"
#include "roadrecon/geometry/pose.h"
#include "roadrecon/util/rng.h"

namespace roadrecon {
namespace {

CameraIntrinsics Vga() {
  CameraIntrinsics cam;
  cam.fx = cam.fy = 500.0;
  cam.cx = 320.0;
  cam.cy = 240.0;
  cam.width = 640;
  cam.height = 480;
  return cam;
}

Pose RandomPose(Rng& rng) {
  const Eigen::Quaterniond q(rng.Normal(), rng.Normal(), rng.Normal(), rng.Normal());
  return Pose(q, Eigen::Vector3d(rng.Uniform(-50, 50), rng.Uniform(-50, 50),
                                 rng.Uniform(-5, 5)));
}

TEST(Pose, QuaternionIsNormalizedOnConstruction) {
  const Pose p(Eigen::Quaterniond(2.0, 0.0, 0.0, 0.0), Eigen::Vector3d::Zero());
  EXPECT_NEAR(p.rotation().norm(), 1.0, 1e-12);
  EXPECT_THROW(Pose(Eigen::Quaterniond(0, 0, 0, 0), Eigen::Vector3d::Zero()),
               InvalidArgumentError);
}

TEST(Pose, FromXyzwUsesScalarLast) {
  const double h = std::sqrt(0.5);
  const Pose p = Pose::FromXyzw(0, 0, 0, 0, 0, h, h);
  EXPECT_NEAR(p.rotation().w(), h, 1e-12);
  EXPECT_NEAR(p.rotation().z(), h, 1e-12);
}

TEST(Se3Apply, Examples) {
  const Eigen::Vector3d p(1, 2, 3);
  EXPECT_TRUE(Se3Apply(Pose::Identity(), p).isApprox(p));
  EXPECT_TRUE(Se3Apply(Pose::FromTranslation({1, 0, 0}), Eigen::Vector3d::Zero())
                  .isApprox(Eigen::Vector3d(1, 0, 0)));
  // Rotation matrix of a +90 deg yaw maps x to y.
  const Eigen::Vector3d rotated = Se3Apply(Pose::FromYaw(M_PI / 2), {1, 0, 0});
  EXPECT_NEAR(rotated.x(), 0.0, 1e-9);
  EXPECT_NEAR(rotated.y(), 1.0, 1e-9);
  EXPECT_NEAR(rotated.z(), 0.0, 1e-9);
}

TEST(Pose, RandomInverseRoundTrip) {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const Pose pose = RandomPose(rng);
    const Eigen::Vector3d x(rng.Uniform(-100, 100), rng.Uniform(-100, 100),
                            rng.Uniform(-100, 100));
    EXPECT_LT((pose.Inverse().Apply(pose.Apply(x)) - x).norm(), 1e-9);
    const Pose id = pose * pose.Inverse();
    EXPECT_LT(id.translation().norm(), 1e-9);
    EXPECT_LT(RotationAngle(id.rotation(), Eigen::Quaterniond::Identity()), 1e-9);
  }
}

TEST(So3, ExpLogRoundTrip) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector3d w(rng.Uniform(-1, 1), rng.Uniform(-1, 1), rng.Uniform(-1, 1));
    EXPECT_LT((LogSO3(ExpSO3(w)) - w).norm(), 1e-12);
  }
}

TEST(Project, Examples) {
  const CameraIntrinsics cam = Vga();
  EXPECT_TRUE(Project(cam, {0, 0, 1}).isApprox(Eigen::Vector2d(320, 240)));
  // 500 * 0.1 / 1 + 320 = 370
  EXPECT_TRUE(Project(cam, {0.1, 0, 1}).isApprox(Eigen::Vector2d(370, 240)));
  EXPECT_THROW(Project(cam, {0, 0, -1}), CheiralityError);
  EXPECT_THROW(Project(cam, {0, 0, 0}), CheiralityError);
}

TEST(Project, BackprojectReproducesDirection) {
  const CameraIntrinsics cam = Vga();
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const Eigen::Vector3d p(rng.Uniform(-5, 5), rng.Uniform(-5, 5), rng.Uniform(0.1, 50));
    const Eigen::Vector3d ray = Backproject(cam, Project(cam, p));
    EXPECT_LT((ray - p.normalized()).norm(), 1e-9);
  }
}

TEST(Intrinsics, Validate) {
  CameraIntrinsics cam = Vga();
  EXPECT_NO_THROW(cam.Validate());
  cam.fx = 0;
  EXPECT_THROW(cam.Validate(), InvalidArgumentError);
  cam = Vga();
  cam.cx = 640;
  EXPECT_THROW(cam.Validate(), InvalidArgumentError);
}

TEST(GroundFootprint, NadirCameraRectangle) {
  const CameraIntrinsics cam = Vga();
  const Pose nadir = LookAtPose({3, 4, 10}, {0, 0, -1}, {1, 0, 0});
  const GroundPolygon poly = GroundFootprint(nadir, cam, 0.0);
  ASSERT_EQ(poly.vertices.size(), 4u);
  // Similar triangles: half-extents 320/500*10 = 6.4 and 240/500*10 = 4.8.
  double min_x = 1e9, max_x = -1e9, min_y = 1e9, max_y = -1e9;
  for (const auto& v : poly.vertices) {
    min_x = std::min(min_x, v.x());
    max_x = std::max(max_x, v.x());
    min_y = std::min(min_y, v.y());
    max_y = std::max(max_y, v.y());
  }
  // Image rows run along world x for this orientation.
  EXPECT_NEAR(max_x - min_x, 9.6, 1e-9);
  EXPECT_NEAR(max_y - min_y, 12.8, 1e-9);
  EXPECT_NEAR(0.5 * (max_x + min_x), 3.0, 1e-9);
  EXPECT_NEAR(0.5 * (max_y + min_y), 4.0, 1e-9);
  EXPECT_NEAR(poly.Area(), 12.8 * 9.6, 1e-9);
  EXPECT_GT(SignedArea(poly.vertices), 0.0);
}

TEST(GroundFootprint, SkywardCameraHasNoFootprint) {
  const Pose skyward = LookAtPose({0, 0, 1.5}, {0, 0, 1}, {1, 0, 0});
  EXPECT_THROW(GroundFootprint(skyward, Vga(), 0.0), NoFootprintError);
}

TEST(GroundFootprint, ForwardCameraClampsFarCorners) {
  const CameraIntrinsics cam = Vga();
  const double height = 1.5;
  const double max_range = 100.0;
  const Pose forward = LookAtPose({0, 0, height}, {1, 0, 0});
  const GroundPolygon poly = GroundFootprint(forward, cam, 0.0, max_range);
  ASSERT_EQ(poly.vertices.size(), 4u);

  // Oracle: top corners look above the horizon and are clamped at max_range
  // along their horizontal direction; bottom corners hit the plane at
  // distance 1.5 / (240 / 500) = 3.125 m ahead, lateral +-320/500 * 3.125.
  const double top_dir_norm = std::hypot(1.0, 320.0 / 500.0);
  std::vector<Eigen::Vector2d> expected = {
      {max_range / top_dir_norm, max_range * (320.0 / 500.0) / top_dir_norm},
      {max_range / top_dir_norm, -max_range * (320.0 / 500.0) / top_dir_norm},
      {3.125, 2.0},
      {3.125, -2.0}};
  for (const auto& e : expected) {
    double best = 1e9;
    for (const auto& v : poly.vertices) best = std::min(best, (v - e).norm());
    EXPECT_LT(best, 1e-9) << e.transpose();
  }
}

TEST(GroundFootprint, AreaNonDecreasingWithHeight) {
  const CameraIntrinsics cam = Vga();
  double previous = 0.0;
  for (double h = 0.5; h < 60.0; h += 0.5) {
    const double area =
        GroundFootprint(LookAtPose({0, 0, h}, {0, 0, -1}, {1, 0, 0}), cam, 0.0).Area();
    EXPECT_GE(area, previous);
    previous = area;
  }
}

TEST(GroundFootprint, CameraBelowGroundIsRejected) {
  EXPECT_THROW(GroundFootprint(LookAtPose({0, 0, -1}, {0, 0, -1}, {1, 0, 0}), Vga(), 0.0),
               InvalidArgumentError);
}

TEST(Polygon, IouOfSquares) {
  const GroundPolygon a{{{0, 0}, {2, 0}, {2, 2}, {0, 2}}};
  const GroundPolygon b{{{1, 0}, {3, 0}, {3, 2}, {1, 2}}};
  EXPECT_NEAR(ClipConvex(a, b).Area(), 2.0, 1e-12);
  EXPECT_NEAR(PolygonIou(a, b), 2.0 / 6.0, 1e-12);
  EXPECT_NEAR(PolygonIou(a, a), 1.0, 1e-12);
  const GroundPolygon far{{{10, 10}, {11, 10}, {11, 11}, {10, 11}}};
  EXPECT_EQ(PolygonIou(a, far), 0.0);
}

TEST(Interpolate, SlerpHalfway) {
  const Pose a = Pose::Identity();
  const Pose b = Pose::FromYaw(M_PI / 2, {2, 0, 0});
  const Pose mid = Interpolate(a, b, 0.5);
  EXPECT_LT((mid.translation() - Eigen::Vector3d(1, 0, 0)).norm(), 1e-12);
  EXPECT_LT(RotationAngle(mid.rotation(), Pose::FromYaw(M_PI / 4).rotation()), 1e-9);
}

}  // namespace
}  // namespace roadrecon
