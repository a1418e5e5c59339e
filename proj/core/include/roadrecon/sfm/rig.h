#pragma once

#include <map>
#include <string>
#include <vector>

#include "roadrecon/geometry/camera.h"
#include "roadrecon/geometry/pose.h"
#include "roadrecon/sfm/model.h"
#include "roadrecon/wigo/pose_graph.h"

namespace roadrecon {

struct RigCamera {
  std::string name;
  Pose camera_to_body;
  CameraIntrinsics intrinsics;
};

// Multi-camera rig. A camera's pose is T * P_ref * R_i where T is the body
// pose, P_ref the reference camera's camera-to-body transform and R_i the
// camera's transform relative to the reference camera.
struct RigCalibration {
  std::vector<RigCamera> cameras;
  int reference = 0;

  void Validate() const;
  const Pose& ReferenceToBody() const { return cameras.at(reference).camera_to_body; }
  Pose RelativeToReference(int camera) const;
};

struct ImageRecord {
  std::string image_id;
  int clip_id = 0;
  int rig_camera = 0;
  double timestamp = 0.0;
};

struct RigMember {
  std::string image_id;
  Pose camera_to_body;
};

// All images captured at one timestamp by one rig.
struct RigFrame {
  double timestamp = 0.0;
  int clip_id = 0;
  Pose body;  // body-to-world
  std::vector<RigMember> members;
};

struct OgiConfig {
  double max_time_offset = 0.040;  // seconds
};

// Camera pose = interpolated body pose composed with the camera extrinsic.
// Images up to `max_time_offset` outside the trajectory span use the nearest
// end node; beyond that OutOfRangeError is thrown naming the image.
std::map<std::string, CameraState> InitCamerasFromOdometry(
    const FusedTrajectory& trajectory, const RigCalibration& rig,
    const std::vector<ImageRecord>& images, const OgiConfig& config = {});

// Body pose at an image timestamp under the same tolerance rule.
Pose BodyPoseAt(const FusedTrajectory& trajectory, double timestamp, const OgiConfig& config,
                const std::string& what);

// Groups images by (clip, timestamp) into rig frames ordered by clip then time.
std::vector<RigFrame> BuildRigFrames(const FusedTrajectory& trajectory, const RigCalibration& rig,
                                     const std::vector<ImageRecord>& images,
                                     const OgiConfig& config = {});

}  // namespace roadrecon
