#include "roadrecon/surface/semantics.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roadrecon/errors.h"

namespace roadrecon {

const char* SemanticClassName(int class_id) {
  switch (class_id) {
    case kRoadSurface:
      return "road_surface";
    case kLaneMarking:
      return "lane_marking";
    case kRoadTeeth:
      return "road_teeth";
    case kOther:
      return "other";
    default:
      return "unknown";
  }
}

uint8_t LabelLandmark(const ReconstructionModel& model, int64_t track_id,
                      const SemanticMasks& masks) {
  const Landmark& lm = model.landmarks.at(track_id);
  const Track& track = model.tracks.at(track_id);
  std::array<int, 256> votes{};
  for (int k : lm.inliers) {
    const Observation& obs = track.observations[k];
    auto it = masks.find(obs.image_id);
    if (it == masks.end()) continue;
    const int col = static_cast<int>(std::floor(obs.pixel.x()));
    const int row = static_cast<int>(std::floor(obs.pixel.y()));
    if (!it->second.Contains(col, row)) continue;
    ++votes[it->second.at(col, row)];
  }
  int best = kUnknown;
  for (int c = 1; c < 256; ++c) {
    if (votes[c] > votes[best]) best = c;
  }
  return static_cast<uint8_t>(best);
}

namespace {

// Horizontal distance from p to the polyline through the pose origins.
double CorridorDistance(const std::vector<Pose>& poses, const Eigen::Vector2d& p) {
  double best = std::numeric_limits<double>::infinity();
  if (poses.size() == 1) return (poses[0].translation().head<2>() - p).norm();
  for (size_t i = 0; i + 1 < poses.size(); ++i) {
    const Eigen::Vector2d a = poses[i].translation().head<2>();
    const Eigen::Vector2d b = poses[i + 1].translation().head<2>();
    const Eigen::Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, (a + t * ab - p).norm());
  }
  return best;
}

}  // namespace

SurfaceInit InitSurfacePoints(const ReconstructionModel& model, const SemanticMasks& masks,
                              const std::vector<Pose>& ground_poses,
                              const SurfaceInitConfig& config) {
  SurfaceInit out;
  for (const auto& [id, lm] : model.landmarks) {
    const uint8_t label = LabelLandmark(model, id, masks);
    if (label == kRoadSurface || label == kLaneMarking || label == kRoadTeeth) {
      out.points.push_back({lm.position, label});
    }
  }
  if (ground_poses.empty()) {
    if (out.points.empty()) throw EmptySurfaceError("no road landmarks and no trajectory");
    return out;
  }

  double length = 0.0;
  for (size_t i = 0; i + 1 < ground_poses.size(); ++i) {
    length += (ground_poses[i + 1].translation() - ground_poses[i].translation()).head<2>().norm();
  }
  const double area = std::max(length, config.augment_spacing) * 2.0 * config.corridor_half_width;
  int inside = 0;
  for (const auto& p : out.points) {
    inside += CorridorDistance(ground_poses, p.position.head<2>()) <= config.corridor_half_width;
  }
  out.corridor_density = inside / area;
  if (out.corridor_density >= config.min_density) return out;

  // Sample the trajectory every `augment_spacing` meters and lay a row of
  // points across the corridor at each sample.
  out.augmented = true;
  const double step = config.augment_spacing;
  const int lateral = static_cast<int>(std::floor(config.corridor_half_width / step + 1e-9));
  auto emit_row = [&](const Pose& pose) {
    const Eigen::Vector3d left = pose.rotation() * Eigen::Vector3d::UnitY();
    for (int j = -lateral; j <= lateral; ++j) {
      out.points.push_back({pose.translation() + (j * step) * left, kRoadSurface});
    }
  };
  double carried = 0.0;
  emit_row(ground_poses.front());
  for (size_t i = 0; i + 1 < ground_poses.size(); ++i) {
    const Pose& a = ground_poses[i];
    const Pose& b = ground_poses[i + 1];
    const double seg = (b.translation() - a.translation()).head<2>().norm();
    if (seg <= 0.0) continue;
    double s = step - carried;
    while (s <= seg + 1e-9) {
      emit_row(Interpolate(a, b, s / seg));
      s += step;
    }
    carried = seg - (s - step);
  }
  if (out.points.empty()) throw EmptySurfaceError("no road landmarks and no trajectory");
  return out;
}

}  // namespace roadrecon
