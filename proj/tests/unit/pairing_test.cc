#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "roadrecon/errors.h"
#include "roadrecon/pairing/hsp.h"
#include "roadrecon/util/rng.h"

namespace roadrecon {
namespace {

CameraIntrinsics SmallCam() {
  CameraIntrinsics cam;
  cam.fx = cam.fy = 230.0;
  cam.cx = 240.0;
  cam.cy = 135.0;
  cam.width = 480;
  cam.height = 270;
  return cam;
}

// Camera at `center`, yawed by `yaw_deg`, pitched down by 10 degrees.
CameraRecord Record(const std::string& id, const Eigen::Vector3d& center, double yaw_deg) {
  const double yaw = yaw_deg * M_PI / 180.0;
  const double pitch = 10.0 * M_PI / 180.0;
  const Eigen::Vector3d forward(std::cos(yaw) * std::cos(pitch),
                                std::sin(yaw) * std::cos(pitch), -std::sin(pitch));
  return {id, 0, LookAtPose(center, forward), SmallCam()};
}

TEST(ConeOverlap, CoLocatedIdenticalCameras) {
  const auto a = Record("a", {0, 0, 1.5}, 0);
  const PairGeometry g = ConeOverlap(a, a);
  EXPECT_DOUBLE_EQ(g.cos_theta1, 1.0);
  EXPECT_DOUBLE_EQ(g.cos_theta2, 1.0);
  EXPECT_TRUE(g.coincident_centers);
  EXPECT_NEAR(g.footprint_iou, 1.0, 1e-9);
}

TEST(ConeOverlap, FacingEachOther) {
  CameraRecord a{"a", 0, LookAtPose({0, 0, 1.5}, {1, 0, 0}), SmallCam()};
  CameraRecord b{"b", 0, LookAtPose({1, 0, 1.5}, {-1, 0, 0}), SmallCam()};
  const PairGeometry g = ConeOverlap(a, b);
  EXPECT_NEAR(g.cos_theta1, -1.0, 1e-12);
  EXPECT_NEAR(g.cos_theta2, 1.0, 1e-12);
  EXPECT_NEAR(g.center_distance, 1.0, 1e-12);
  EXPECT_FALSE(g.coincident_centers);
}

TEST(ConeOverlap, BackToBack) {
  CameraRecord a{"a", 0, LookAtPose({0, 0, 1.5}, {1, 0, 0}), SmallCam()};
  CameraRecord b{"b", 0, LookAtPose({-1, 0, 1.5}, {-1, 0, 0}), SmallCam()};
  const PairGeometry g = ConeOverlap(a, b);
  EXPECT_NEAR(g.cos_theta1, -1.0, 1e-12);
  EXPECT_NEAR(g.cos_theta2, -1.0, 1e-12);
}

TEST(SelectPairs, Examples) {
  HspConfig config;
  // Co-located identical cameras are kept.
  EXPECT_EQ(SelectPairs({Record("a", {0, 0, 1.5}, 0), Record("b", {0, 0, 1.5}, 0)}, config)
                .size(),
            1u);
  // |dz| = 5 m exceeds the 3 m gate.
  EXPECT_TRUE(
      SelectPairs({Record("a", {0, 0, 1.5}, 0), Record("b", {2, 0, 6.5}, 0)}, config).empty());
  // Back to back.
  EXPECT_TRUE(
      SelectPairs({Record("a", {0, 0, 1.5}, 0), Record("b", {-1, 0, 1.5}, 180)}, config).empty());
  // Face to face and close.
  EXPECT_TRUE(
      SelectPairs({Record("a", {0, 0, 1.5}, 0), Record("b", {5, 0, 1.5}, 180)}, config).empty());
  // Same heading, 5 m apart along the road: overlapping footprints.
  const auto kept =
      SelectPairs({Record("b", {5, 0, 1.5}, 0), Record("a", {0, 0, 1.5}, 0)}, config);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0], ImagePair("a", "b"));
}

TEST(SelectPairs, RejectsBadConfigAndDuplicateIds) {
  HspConfig config;
  config.k_neighbors = 0;
  EXPECT_THROW(SelectPairs({Record("a", {0, 0, 1.5}, 0), Record("b", {1, 0, 1.5}, 0)}, config),
               InvalidArgumentError);
  EXPECT_THROW(SelectPairs({Record("a", {0, 0, 1.5}, 0), Record("a", {1, 0, 1.5}, 0)}),
               InvalidArgumentError);
}

std::vector<CameraRecord> RandomSite(uint64_t seed, int n) {
  Rng rng(seed);
  std::vector<CameraRecord> records;
  for (int i = 0; i < n; ++i) {
    records.push_back(Record("img" + std::to_string(i),
                             {rng.Uniform(-40, 40), rng.Uniform(-40, 40), rng.Uniform(1, 6)},
                             rng.Uniform(-180, 180)));
  }
  return records;
}

TEST(SelectPairs, OutputIsOrderIndependentAndInsideKnnCandidates) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    auto records = RandomSite(seed, 80);
    HspConfig config;
    config.k_neighbors = 6;
    const auto pairs = SelectPairs(records, config);

    std::set<ImagePair> candidates;
    for (int i = 0; i < static_cast<int>(records.size()); ++i) {
      for (int j : NearestNeighbors(records, i, config.k_neighbors)) {
        const auto& a = records[i].image_id;
        const auto& b = records[j].image_id;
        candidates.emplace(std::min(a, b), std::max(a, b));
      }
    }
    EXPECT_LE(pairs.size(), records.size() * config.k_neighbors);
    for (const auto& p : pairs) {
      EXPECT_LT(p.first, p.second);
      EXPECT_TRUE(candidates.count(p));
    }
    // Symmetry: the result does not depend on which record is visited first.
    std::reverse(records.begin(), records.end());
    EXPECT_EQ(SelectPairs(records, config), pairs);
  }
}

TEST(SelectPairs, KeptPairsPassEveryFilterInSomeOrientation) {
  auto records = RandomSite(11, 60);
  HspConfig config;
  config.k_neighbors = 8;
  std::map<std::string, CameraRecord> by_id;
  for (const auto& r : records) by_id[r.image_id] = r;
  for (const auto& [a, b] : SelectPairs(records, config)) {
    const PairGeometry ab = ConeOverlap(by_id[a], by_id[b], config);
    const PairGeometry ba = ConeOverlap(by_id[b], by_id[a], config);
    EXPECT_TRUE(KeepPair(by_id[a], by_id[b], ab, config) || KeepPair(by_id[b], by_id[a], ba, config));
    EXPECT_LT(std::abs(by_id[a].pose.translation().z() - by_id[b].pose.translation().z()),
              config.delta_z);
    EXPECT_GE(ab.footprint_iou, config.min_footprint_iou);
  }
}

}  // namespace
}  // namespace roadrecon
