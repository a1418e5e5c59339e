#include "roadrecon/sfm/model.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "roadrecon/errors.h"

namespace roadrecon {

size_t ReconstructionModel::ObservationCount() const {
  size_t n = 0;
  for (const auto& [id, lm] : landmarks) n += lm.inliers.size();
  return n;
}

void ReconstructionModel::Validate() const {
  for (const auto& [id, lm] : landmarks) {
    auto it = tracks.find(id);
    if (it == tracks.end()) {
      throw InvalidArgumentError("landmark " + std::to_string(id) + " has no track");
    }
    if (!lm.position.allFinite()) {
      throw InvalidArgumentError("landmark " + std::to_string(id) + " is not finite");
    }
    for (int k : lm.inliers) {
      if (k < 0 || k >= static_cast<int>(it->second.observations.size())) {
        throw InvalidArgumentError("landmark " + std::to_string(id) +
                                   " references a missing observation");
      }
      const auto& image = it->second.observations[k].image_id;
      if (!cameras.count(image)) {
        throw InvalidArgumentError("observation of track " + std::to_string(id) +
                                   " references missing camera " + image);
      }
    }
  }
}

Eigen::Vector2d ReprojectionResidual(const CameraState& camera, const Eigen::Vector3d& point,
                                     const Eigen::Vector2d& pixel) {
  return pixel - ProjectUnchecked(camera.intrinsics, WorldToCamera(camera.pose, point));
}

std::vector<ResidualRecord> ReprojectionErrors(const ReconstructionModel& model) {
  std::vector<ResidualRecord> out;
  for (const auto& [id, lm] : model.landmarks) {
    const Track& track = model.tracks.at(id);
    for (int k : lm.inliers) {
      const Observation& obs = track.observations[k];
      const CameraState& cam = model.cameras.at(obs.image_id);
      out.push_back({id, obs.image_id, ReprojectionResidual(cam, lm.position, obs.pixel).norm()});
    }
  }
  return out;
}

double MeanReprojectionError(const ReconstructionModel& model) {
  const auto errors = ReprojectionErrors(model);
  if (errors.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& e : errors) sum += e.error_px;
  return sum / static_cast<double>(errors.size());
}

double MaxTriangulationAngleDeg(const std::vector<Eigen::Vector3d>& centers,
                                const Eigen::Vector3d& point) {
  double best = 0.0;
  for (size_t i = 0; i < centers.size(); ++i) {
    const Eigen::Vector3d a = point - centers[i];
    for (size_t j = i + 1; j < centers.size(); ++j) {
      const Eigen::Vector3d b = point - centers[j];
      const double denom = a.norm() * b.norm();
      if (denom <= 0.0) continue;
      // atan2 form stays accurate for tiny angles.
      const double angle = std::atan2(a.cross(b).norm(), a.dot(b));
      best = std::max(best, angle);
    }
  }
  return best * 180.0 / M_PI;
}

void RemoveImages(ReconstructionModel* model, const std::vector<std::string>& image_ids) {
  const std::set<std::string> drop(image_ids.begin(), image_ids.end());
  for (const auto& id : drop) model->cameras.erase(id);
  for (auto it = model->landmarks.begin(); it != model->landmarks.end();) {
    const Track& track = model->tracks.at(it->first);
    auto& inliers = it->second.inliers;
    inliers.erase(std::remove_if(inliers.begin(), inliers.end(),
                                 [&](int k) { return drop.count(track.observations[k].image_id); }),
                  inliers.end());
    if (inliers.size() < 2) {
      it = model->landmarks.erase(it);
    } else {
      ++it;
    }
  }
}

}  // namespace roadrecon
