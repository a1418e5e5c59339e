#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "roadrecon/geometry/camera.h"
#include "roadrecon/geometry/pose.h"

namespace roadrecon {

struct Observation {
  std::string image_id;
  int64_t track_id = 0;
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();
};

// All raw observations of one physical point, at most one per image.
struct Track {
  int64_t track_id = 0;
  std::vector<Observation> observations;
};

// Triangulated track. `inliers` indexes the track's observations that are
// currently used by the landmark; filtering removes entries from it.
struct Landmark {
  int64_t track_id = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  std::vector<int> inliers;
};

struct CameraState {
  std::string image_id;
  Pose pose;  // camera-to-world
  CameraIntrinsics intrinsics;
  double timestamp = 0.0;
  int clip_id = 0;
  int rig_camera = -1;  // index into the rig, -1 when not part of a rig
};

struct ReconstructionModel {
  std::map<std::string, CameraState> cameras;
  std::map<int64_t, Track> tracks;
  std::map<int64_t, Landmark> landmarks;

  size_t ObservationCount() const;  // active landmark observations
  // Throws InvalidArgumentError when a landmark lacks its track or an active
  // observation references a missing camera.
  void Validate() const;
};

// Pixel residual u - pi(P, X) of one observation.
Eigen::Vector2d ReprojectionResidual(const CameraState& camera, const Eigen::Vector3d& point,
                                     const Eigen::Vector2d& pixel);

// Per active observation residual norms, in landmark then inlier order.
struct ResidualRecord {
  int64_t track_id = 0;
  std::string image_id;
  double error_px = 0.0;
};
std::vector<ResidualRecord> ReprojectionErrors(const ReconstructionModel& model);
double MeanReprojectionError(const ReconstructionModel& model);

// Largest angle, in degrees, between rays from the given camera centers to X.
double MaxTriangulationAngleDeg(const std::vector<Eigen::Vector3d>& centers,
                                const Eigen::Vector3d& point);

// Removes cameras and every landmark observation that refers to them;
// landmarks left with fewer than two observations are dropped.
void RemoveImages(ReconstructionModel* model, const std::vector<std::string>& image_ids);

}  // namespace roadrecon
