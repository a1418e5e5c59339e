#include "roadrecon/pairing/hsp.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>

#include "roadrecon/errors.h"
#include "roadrecon/geometry/polygon.h"

namespace roadrecon {

void HspConfig::Validate() const {
  if (k_neighbors < 1) throw InvalidArgumentError("HspConfig: k_neighbors must be >= 1");
  if (!(delta_z > 0.0)) throw InvalidArgumentError("HspConfig: delta_z must be > 0");
  if (min_footprint_iou < 0.0 || min_footprint_iou > 1.0) {
    throw InvalidArgumentError("HspConfig: min_footprint_iou must lie in [0, 1]");
  }
}

namespace {

std::optional<GroundPolygon> Footprint(const CameraRecord& r, const HspConfig& config) {
  try {
    return GroundFootprint(r.pose, r.intrinsics, config.ground_z, config.max_range);
  } catch (const NoFootprintError&) {
    return std::nullopt;
  } catch (const InvalidArgumentError&) {
    return std::nullopt;
  }
}

double FootprintIou(const std::optional<GroundPolygon>& a,
                    const std::optional<GroundPolygon>& b) {
  if (!a || !b) return 0.0;
  return PolygonIou(*a, *b);
}

PairGeometry Cone(const CameraRecord& a, const CameraRecord& b) {
  PairGeometry g;
  const Eigen::Vector3d axis_a = OpticalAxis(a.pose);
  const Eigen::Vector3d axis_b = OpticalAxis(b.pose);
  g.cos_theta1 = std::clamp(axis_a.dot(axis_b), -1.0, 1.0);
  const Eigen::Vector3d ab = b.pose.translation() - a.pose.translation();
  g.center_distance = ab.norm();
  if (g.center_distance < 1e-12) {
    g.coincident_centers = true;
    g.cos_theta2 = 1.0;
  } else {
    g.cos_theta2 = std::clamp(ab.dot(axis_a) / g.center_distance, -1.0, 1.0);
  }
  return g;
}

}  // namespace

PairGeometry ConeOverlap(const CameraRecord& a, const CameraRecord& b,
                         const HspConfig& config) {
  PairGeometry g = Cone(a, b);
  g.footprint_iou = FootprintIou(Footprint(a, config), Footprint(b, config));
  return g;
}

namespace {

bool PassesCheapFilters(const CameraRecord& a, const CameraRecord& b, const PairGeometry& g,
                        const HspConfig& config) {
  if (std::abs(a.pose.translation().z() - b.pose.translation().z()) >= config.delta_z) {
    return false;
  }
  // Both angles beyond 90 degrees: the view cones cannot overlap.
  if (g.cos_theta1 < 0.0 && g.cos_theta2 < 0.0) return false;
  const double face_cos = std::cos(config.face_to_face_angle_deg * M_PI / 180.0);
  if (g.cos_theta1 < -face_cos && g.center_distance < config.face_to_face_distance) {
    return false;
  }
  return true;
}

}  // namespace

bool KeepPair(const CameraRecord& a, const CameraRecord& b, const PairGeometry& g,
              const HspConfig& config) {
  return PassesCheapFilters(a, b, g, config) && g.footprint_iou >= config.min_footprint_iou;
}

std::vector<int> NearestNeighbors(const std::vector<CameraRecord>& records, int index, int k) {
  const Eigen::Vector3d& c = records[index].pose.translation();
  std::vector<std::pair<double, int>> dist;
  dist.reserve(records.size());
  for (int j = 0; j < static_cast<int>(records.size()); ++j) {
    if (j == index) continue;
    dist.emplace_back((records[j].pose.translation() - c).squaredNorm(), j);
  }
  const size_t take = std::min<size_t>(static_cast<size_t>(k), dist.size());
  std::partial_sort(dist.begin(), dist.begin() + take, dist.end());
  std::vector<int> out;
  out.reserve(take);
  for (size_t i = 0; i < take; ++i) out.push_back(dist[i].second);
  return out;
}

std::vector<ImagePair> SelectPairs(const std::vector<CameraRecord>& records,
                                   const HspConfig& config) {
  config.Validate();
  const int n = static_cast<int>(records.size());
  {
    std::set<std::string> ids;
    for (const auto& r : records) {
      if (!ids.insert(r.image_id).second) {
        throw InvalidArgumentError("SelectPairs: duplicate image_id " + r.image_id);
      }
    }
  }
  // Footprints are computed once per record; the filters are symmetric
  // except for cos_theta2, so each unordered candidate is tested both ways
  // and kept when either orientation passes.
  std::vector<std::optional<GroundPolygon>> footprints(n);
  std::vector<bool> have_footprint(n, false);
  auto footprint = [&](int i) -> const std::optional<GroundPolygon>& {
    if (!have_footprint[i]) {
      footprints[i] = Footprint(records[i], config);
      have_footprint[i] = true;
    }
    return footprints[i];
  };

  std::set<std::pair<int, int>> candidates;
  for (int i = 0; i < n; ++i) {
    for (int j : NearestNeighbors(records, i, config.k_neighbors)) {
      candidates.emplace(std::min(i, j), std::max(i, j));
    }
  }
  std::set<ImagePair> kept;
  for (const auto& [i, j] : candidates) {
    const CameraRecord& a = records[i];
    const CameraRecord& b = records[j];
    const PairGeometry ab = Cone(a, b);
    const PairGeometry ba = Cone(b, a);
    if (!PassesCheapFilters(a, b, ab, config) && !PassesCheapFilters(b, a, ba, config)) {
      continue;
    }
    if (FootprintIou(footprint(i), footprint(j)) < config.min_footprint_iou) continue;
    kept.emplace(std::min(a.image_id, b.image_id), std::max(a.image_id, b.image_id));
  }
  return {kept.begin(), kept.end()};
}

}  // namespace roadrecon
