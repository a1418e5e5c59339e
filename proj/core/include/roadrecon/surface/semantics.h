#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "roadrecon/geometry/pose.h"
#include "roadrecon/sfm/model.h"
#include "roadrecon/util/raster.h"

namespace roadrecon {

// Pixel values of semantic masks and BEV semantic rasters.
enum SemanticClass : uint8_t {
  kUnknown = 0,
  kRoadSurface = 1,
  kLaneMarking = 2,
  kRoadTeeth = 3,
  kOther = 4,
};
inline constexpr int kSemanticClassCount = 5;

const char* SemanticClassName(int class_id);

struct SemanticPoint {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  uint8_t class_id = kRoadSurface;
};

// Per-image class masks keyed by image id.
using SemanticMasks = std::map<std::string, GrayImage>;

// Majority class of a landmark over its active observations; ties go to the
// lower class id, no votes give kUnknown.
uint8_t LabelLandmark(const ReconstructionModel& model, int64_t track_id,
                      const SemanticMasks& masks);

struct SurfaceInitConfig {
  double corridor_half_width = 5.0;  // meters
  double min_density = 1.0;          // points per square meter in the corridor
  double augment_spacing = 0.5;      // meters between synthetic corridor points
};

struct SurfaceInit {
  std::vector<SemanticPoint> points;
  bool augmented = false;
  double corridor_density = 0.0;
};

// Road-class landmarks (road surface, lane marking, road teeth), plus a grid
// of road_surface points at ego ground height along the trajectory when the
// corridor holds fewer than `min_density` landmarks per square meter.
// `ground_poses` are body poses whose origin lies on the road. Throws
// EmptySurfaceError when both sources are empty.
SurfaceInit InitSurfacePoints(const ReconstructionModel& model, const SemanticMasks& masks,
                              const std::vector<Pose>& ground_poses,
                              const SurfaceInitConfig& config = {});

}  // namespace roadrecon
