#include "roadrecon/sfm/iterative_ba.h"

#include <algorithm>
#include <set>
#include <utility>

#include "roadrecon/errors.h"

namespace roadrecon {

FailureCounts RetriangulateAll(ReconstructionModel* model, const TriangulationConfig& config) {
  FailureCounts failures;
  model->landmarks.clear();
  for (const auto& [id, track] : model->tracks) {
    int known = 0;
    for (const auto& obs : track.observations) known += model->cameras.count(obs.image_id) > 0;
    if (known < 2) continue;
    try {
      model->landmarks.emplace(id, TriangulateRobust(track, model->cameras, config));
    } catch (const Error& e) {
      ++failures[e.name()];
    }
  }
  return failures;
}

size_t FilterLandmarks(ReconstructionModel* model, double gate_px, double min_angle_deg) {
  size_t removed = 0;
  for (auto it = model->landmarks.begin(); it != model->landmarks.end();) {
    Landmark& lm = it->second;
    const Track& track = model->tracks.at(it->first);
    std::vector<int> kept;
    std::vector<Eigen::Vector3d> centers;
    for (int k : lm.inliers) {
      const Observation& obs = track.observations[k];
      const CameraState& cam = model->cameras.at(obs.image_id);
      const bool in_front = WorldToCamera(cam.pose, lm.position).z() > 0.0;
      if (in_front && ReprojectionResidual(cam, lm.position, obs.pixel).norm() <= gate_px) {
        kept.push_back(k);
        centers.push_back(cam.pose.translation());
      }
    }
    if (kept.size() < 2 || MaxTriangulationAngleDeg(centers, lm.position) < min_angle_deg) {
      removed += lm.inliers.size();
      it = model->landmarks.erase(it);
      continue;
    }
    removed += lm.inliers.size() - kept.size();
    lm.inliers = std::move(kept);
    ++it;
  }
  return removed;
}

std::vector<std::string> FilterImagesWithReprojError(ReconstructionModel* model, double gate_px) {
  std::map<std::string, std::pair<double, int>> per_image;
  for (const auto& r : ReprojectionErrors(*model)) {
    auto& acc = per_image[r.image_id];
    acc.first += r.error_px;
    ++acc.second;
  }
  std::vector<std::string> bad;
  for (const auto& [id, acc] : per_image) {
    if (acc.first / acc.second > gate_px) bad.push_back(id);
  }
  if (!bad.empty()) RemoveImages(model, bad);
  return bad;
}

namespace {

using ObservationKey = std::pair<int64_t, int>;

std::set<ObservationKey> ActiveObservations(const ReconstructionModel& model) {
  std::set<ObservationKey> keys;
  for (const auto& [id, lm] : model.landmarks) {
    for (int k : lm.inliers) keys.emplace(id, k);
  }
  return keys;
}

void DropFrameMembers(std::vector<RigFrame>* frames, const std::vector<std::string>& ids) {
  if (!frames || ids.empty()) return;
  const std::set<std::string> drop(ids.begin(), ids.end());
  for (auto& frame : *frames) {
    auto& m = frame.members;
    m.erase(std::remove_if(m.begin(), m.end(),
                           [&](const RigMember& x) { return drop.count(x.image_id) > 0; }),
            m.end());
  }
}

}  // namespace

IterativeBaStats IterativeBundleAdjust(ReconstructionModel* model, std::vector<RigFrame>* frames,
                                       const IterativeBaConfig& config) {
  IterativeBaStats stats;
  TriangulationConfig tri;
  tri.min_angle_deg = config.min_angle_deg;
  const bool rigid = config.rigid && frames != nullptr;

  for (int i = 0; i < config.max_iterations; ++i) {
    tri.max_reprojection_px = i == 0 ? config.initial_gate_px : config.reprojection_gate_px;
    RetriangulateAll(model, tri);
    if (model->landmarks.empty()) throw EmptyModelError("no landmark could be triangulated");
    const std::set<ObservationKey> before = ActiveObservations(*model);

    IterationStats it;
    it.observations = before.size();
    if (rigid) {
      RigidBundleResult r = RigidBundleAdjust(frames, model, config.ba);
      it.ba = r.summary;
      stats.flagged_images.insert(stats.flagged_images.end(), r.flagged.begin(),
                                  r.flagged.end());
    } else {
      it.ba = BundleAdjust(model, config.ba).summary;
    }

    tri.max_reprojection_px = config.reprojection_gate_px;
    RetriangulateAll(model, tri);
    FilterLandmarks(model, config.reprojection_gate_px, config.min_angle_deg);
    if (model->landmarks.empty()) throw EmptyModelError("filtering removed every landmark");

    const std::set<ObservationKey> after = ActiveObservations(*model);
    for (const auto& key : before) it.filtered += after.count(key) == 0;
    it.ratio = it.observations ? static_cast<double>(it.filtered) / it.observations : 0.0;
    it.mean_error_px = MeanReprojectionError(*model);
    it.landmarks = model->landmarks.size();
    stats.iterations.push_back(it);
    if (it.ratio <= config.max_refinement_change) break;
  }

  stats.removed_images = FilterImagesWithReprojError(model, config.image_error_gate_px);
  DropFrameMembers(frames, stats.removed_images);
  if (model->landmarks.empty()) throw EmptyModelError("image filtering removed every landmark");
  return stats;
}

}  // namespace roadrecon
