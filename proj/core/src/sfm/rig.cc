#include "roadrecon/sfm/rig.h"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "roadrecon/errors.h"

namespace roadrecon {

void RigCalibration::Validate() const {
  if (cameras.empty()) throw InvalidArgumentError("rig has no cameras");
  if (reference < 0 || reference >= static_cast<int>(cameras.size())) {
    throw InvalidArgumentError("rig reference camera index out of range");
  }
  for (const auto& cam : cameras) cam.intrinsics.Validate();
}

Pose RigCalibration::RelativeToReference(int camera) const {
  if (camera == reference) return Pose::Identity();
  return ReferenceToBody().Inverse() * cameras.at(camera).camera_to_body;
}

Pose BodyPoseAt(const FusedTrajectory& trajectory, double timestamp, const OgiConfig& config,
                const std::string& what) {
  const auto& nodes = trajectory.nodes;
  if (nodes.empty()) throw OutOfRangeError("empty trajectory");
  const double first = nodes.front().timestamp;
  const double last = nodes.back().timestamp;
  if (timestamp < first - config.max_time_offset || timestamp > last + config.max_time_offset) {
    std::ostringstream msg;
    msg << what << " timestamp " << timestamp << " is more than " << config.max_time_offset
        << " s outside the trajectory [" << first << ", " << last << "]";
    throw OutOfRangeError(msg.str());
  }
  return InterpolatePose(trajectory, std::clamp(timestamp, first, last));
}

std::map<std::string, CameraState> InitCamerasFromOdometry(
    const FusedTrajectory& trajectory, const RigCalibration& rig,
    const std::vector<ImageRecord>& images, const OgiConfig& config) {
  rig.Validate();
  std::map<std::string, CameraState> cameras;
  for (const auto& image : images) {
    if (image.rig_camera < 0 || image.rig_camera >= static_cast<int>(rig.cameras.size())) {
      throw MissingRigError("image " + image.image_id + " references an unknown rig camera");
    }
    const Pose body = BodyPoseAt(trajectory, image.timestamp, config, "image " + image.image_id);
    const RigCamera& rc = rig.cameras[image.rig_camera];
    CameraState state;
    state.image_id = image.image_id;
    state.pose = body * rig.ReferenceToBody() * rig.RelativeToReference(image.rig_camera);
    state.intrinsics = rc.intrinsics;
    state.timestamp = image.timestamp;
    state.clip_id = image.clip_id;
    state.rig_camera = image.rig_camera;
    if (!cameras.emplace(image.image_id, state).second) {
      throw InvalidArgumentError("duplicate image id " + image.image_id);
    }
  }
  return cameras;
}

std::vector<RigFrame> BuildRigFrames(const FusedTrajectory& trajectory, const RigCalibration& rig,
                                     const std::vector<ImageRecord>& images,
                                     const OgiConfig& config) {
  rig.Validate();
  std::map<std::tuple<int, double>, RigFrame> grouped;
  for (const auto& image : images) {
    if (image.rig_camera < 0 || image.rig_camera >= static_cast<int>(rig.cameras.size())) {
      throw MissingRigError("image " + image.image_id + " references an unknown rig camera");
    }
    auto [it, inserted] = grouped.try_emplace({image.clip_id, image.timestamp});
    RigFrame& frame = it->second;
    if (inserted) {
      frame.timestamp = image.timestamp;
      frame.clip_id = image.clip_id;
      frame.body = BodyPoseAt(trajectory, image.timestamp, config, "image " + image.image_id);
    }
    frame.members.push_back(
        {image.image_id, rig.ReferenceToBody() * rig.RelativeToReference(image.rig_camera)});
  }
  std::vector<RigFrame> frames;
  frames.reserve(grouped.size());
  for (auto& [key, frame] : grouped) frames.push_back(std::move(frame));
  return frames;
}

}  // namespace roadrecon
