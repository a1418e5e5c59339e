#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "roadrecon/geometry/camera.h"
#include "roadrecon/geometry/pose.h"
#include "roadrecon/util/raster.h"
#include "roadrecon/vectormap/vector_map.h"

namespace roadrecon {

// Crop in the camera frame: x is the camera's lateral axis and y its forward
// (optical) axis.
struct CropBox {
  double x_min = -15.0;
  double x_max = 15.0;
  double y_min = 0.0;
  double y_max = 60.0;

  void Validate() const;
};

using Polyline2d = std::vector<Eigen::Vector2d>;

// One map element in one image; clipping may cut it into several pieces.
struct ProjectedElement {
  int64_t id = 0;
  ElementClass cls = ElementClass::kLaneDivider;
  std::vector<Polyline2d> pieces;
};

struct ProjectionOptions {
  double densify_spacing = 0.5;  // meters, applied before projection
  double near_plane = 0.1;       // meters of camera depth
};

// Densifies, moves vertices into the camera frame, clips segments to the crop
// box and the near plane, projects what remains and clips it to the image.
// Elements left with no piece of at least two vertices are omitted.
std::vector<ProjectedElement> ProjectMapToFrame(const VectorMap& map, const Pose& camera_to_world,
                                                const CameraIntrinsics& intrinsics,
                                                const CropBox& crop,
                                                const ProjectionOptions& options = {});

// Instance-id raster (0 = background), one per class per frame.
using InstanceMask = GrayImage;

// Zhang-Suen skeleton of one instance as pixel indices. Throws
// MissingInstanceError when the id does not occur.
PixelSet Skeletonize(const InstanceMask& mask, int instance_id);

// Instance ids present in a mask, ascending.
std::vector<int> InstanceIds(const InstanceMask& mask);

// Minimum distance from p to any segment of the polyline. Needs >= 2 vertices.
double PointToCurveDistance(const Eigen::Vector2d& p, const Polyline2d& polyline);
double PointToPiecesDistance(const Eigen::Vector2d& p, const std::vector<Polyline2d>& pieces);

struct MatchPair {
  int row = 0;
  int col = 0;
  double cost = 0.0;
};

struct MatchResult {
  std::vector<MatchPair> pairs;  // ascending row
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
  double total_cost = 0.0;  // over kept pairs
};

// Minimum-cost one-to-one assignment of a rectangular matrix (rows x cols),
// then pairs with cost > gate are dropped and both sides left unmatched.
MatchResult HungarianMatch(const Eigen::MatrixXd& cost, double gate);

// Sets `pixels` to `value` where the pixel center lies within stroke / 2 of
// any piece.
void DrawPolylines(const std::vector<Polyline2d>& pieces, double stroke, uint8_t value,
                   GrayImage* image);

struct EvalFrame {
  std::string image_id;
  Pose pose;  // camera-to-world
  CameraIntrinsics intrinsics;
  std::map<ElementClass, InstanceMask> masks;
};

struct FrameReport {
  std::string image_id;
  double error_px = 0.0;  // mean over pairs; 0 when the frame has none
  int pairs = 0;
  int projected = 0;
  int instances = 0;
};

struct SreReport {
  std::vector<FrameReport> frames;
  double sre_px = 0.0;  // mean over frames with at least one pair
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
  int frames_with_pairs = 0;

  std::string ToJson() const;
};

struct SreConfig {
  CropBox crop;
  double gate_px = 20.0;
  ProjectionOptions projection;
};

// Per frame and class: project, skeletonize every instance, cost = mean
// distance of skeleton pixel centers to the projection, Hungarian match
// with the gate. Precision and recall count over the whole run, with 0/0
// taken as 1. Throws NoFramesError for an empty frame list.
SreReport ComputeSre(const VectorMap& map, const std::vector<EvalFrame>& frames,
                     const SreConfig& config = {});

}  // namespace roadrecon
