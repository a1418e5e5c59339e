#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "roadrecon/evaluation/sre.h"
#include "roadrecon/sfm/model.h"
#include "roadrecon/sfm/rig.h"
#include "roadrecon/surface/semantics.h"
#include "roadrecon/vectormap/vector_map.h"
#include "roadrecon/wigo/pose_graph.h"

namespace roadrecon {

enum class ElevationKind { kFlat, kSlope, kSinusoid };

// Ground height h(x, y) of a synthetic scene.
struct ElevationSpec {
  ElevationKind kind = ElevationKind::kFlat;
  double offset = 0.0;      // meters
  double slope = 0.0;       // dh/dx for kSlope
  double amplitude = 0.0;   // meters, kSinusoid: amplitude * sin(x / wavelength)
  double wavelength = 10.0;

  double Height(double x, double y) const;
  Eigen::Vector2d Gradient(double x, double y) const;
};

struct RigCameraSpec {
  std::string name;
  double yaw_deg = 0.0;    // about body z, 0 looks forward, positive to the left
  double pitch_deg = -10;  // negative looks down
  Eigen::Vector3d mount = Eigen::Vector3d(0, 0, 1.5);  // body frame, meters
};

struct SceneSpec {
  // Road along world x. Markings run over [0, road_length].
  double road_length = 40.0;
  double road_half_width = 5.0;
  ElevationSpec elevation;
  std::vector<double> divider_offsets = {0.0};
  std::vector<double> boundary_offsets = {-5.0, 5.0};
  std::vector<double> crossing_positions;  // x of transverse crossings
  double marking_width = 0.3;
  double crossing_half_length = 4.0;

  // Clip k drives +x when k is even and -x when odd, in lane
  // lane_offsets[k % size] (y of the body origin).
  int clips = 2;
  std::vector<double> lane_offsets = {-1.8, 1.8};
  double approach = 8.0;  // meters driven before and after the marked road
  double speed = 5.0;     // m/s
  double node_rate = 10.0;   // Hz
  double image_rate = 2.0;   // Hz
  double image_time_offset = 0.013;  // seconds after the first node

  std::vector<RigCameraSpec> rig = DefaultRig();
  CameraIntrinsics intrinsics = DefaultIntrinsics();

  int ground_landmarks = 600;
  int structure_landmarks = 200;
  double landmark_margin = 12.0;     // meters beyond the driven x range
  double landmark_half_width = 12.0;
  double max_view_depth = 25.0;      // meters; farther points are not tracked
  double min_view_depth = 0.5;

  double odometry_drift = 0.0;      // fractional translation scale error per step
  double odometry_rot_sigma = 0.0;  // radians per step
  double gnss_sigma = 0.0;          // meters
  int gnss_every = 1;               // nodes between fixes
  double pixel_sigma = 0.0;
  double outlier_fraction = 0.0;
  double outlier_min_offset = 20.0;  // pixels
  double outlier_max_offset = 60.0;

  bool render_masks = true;
  double mask_stroke_px = 3.0;
  CropBox crop;
  uint64_t seed = 0;

  // Throws InvalidSpecError.
  void Validate() const;

  static std::vector<RigCameraSpec> DefaultRig();
  static CameraIntrinsics DefaultIntrinsics();
};

struct SyntheticClip {
  int clip_id = 0;
  std::vector<StateNode> truth;  // body-to-world ground truth
  std::vector<OdometryFactor> odometry;
  std::vector<GnssFactor> gnss;
  std::vector<ImageRecord> images;
  std::vector<Track> tracks;
  // (track_id, image_id) of every injected outlier observation.
  std::set<std::pair<int64_t, std::string>> outliers;
};

struct SceneBundle {
  SceneSpec spec;
  RigCalibration rig;
  std::vector<SyntheticClip> clips;
  // Observations of landmarks seen by two or more clips, id kCrossTrackBase + landmark.
  std::vector<Track> cross_tracks;
  std::map<int64_t, Eigen::Vector3d> landmarks;  // ground truth by landmark index
  std::map<std::string, CameraState> cameras;    // ground-truth camera poses
  VectorMap map;                                 // ground-truth map, 3D
  SemanticMasks semantic_masks;
  std::map<std::string, std::map<ElementClass, InstanceMask>> instance_masks;

  size_t ObservationCount() const;
  size_t OutlierCount() const;
};

inline constexpr int64_t kClipTrackStride = 1000000;
inline constexpr int64_t kCrossTrackBase = 1000000000;

// Deterministic in (spec, seed). Throws InvalidSpecError.
SceneBundle GenerateScene(const SceneSpec& spec);

// Semantic class of the ground at (x, y).
uint8_t GroundClass(const SceneSpec& spec, double x, double y);

// Ground intersection of the ray from `origin` along `direction`, or false
// when it misses within `max_range` meters.
bool IntersectGround(const ElevationSpec& ground, const Eigen::Vector3d& origin,
                     const Eigen::Vector3d& direction, double max_range, Eigen::Vector3d* hit);

// Per-pixel ground class seen by a camera (0 where the ray misses).
GrayImage RenderSemanticMask(const SceneSpec& spec, const CameraState& camera);

// The map projected with `crop` and drawn with `stroke` pixels, one instance
// id per projected element in map order, per class.
std::map<ElementClass, InstanceMask> RenderInstanceMasks(const VectorMap& map,
                                                         const CameraState& camera,
                                                         const CropBox& crop, double stroke);

// Body-to-world ground-truth pose of clip `clip` at time t.
Pose TrueBodyPose(const SceneSpec& spec, int clip, double t);
double ClipDuration(const SceneSpec& spec);

SceneSpec SceneSpecFromJson(const std::string& text);
std::string SceneSpecToJson(const SceneSpec& spec);

}  // namespace roadrecon
