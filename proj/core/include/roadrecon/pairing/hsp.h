#pragma once

#include <string>
#include <utility>
#include <vector>

#include "roadrecon/geometry/camera.h"
#include "roadrecon/geometry/pose.h"

namespace roadrecon {

struct CameraRecord {
  std::string image_id;
  int clip_id = 0;
  Pose pose;  // camera-to-world
  CameraIntrinsics intrinsics;
};

struct PairGeometry {
  double cos_theta1 = 1.0;  // between optical axes
  double cos_theta2 = 1.0;  // between a's axis and the a -> b baseline
  double footprint_iou = 0.0;
  double center_distance = 0.0;
  // Set when the centers coincide; cos_theta2 then holds the convention 1.
  bool coincident_centers = false;
};

struct HspConfig {
  int k_neighbors = 30;
  double delta_z = 3.0;
  double face_to_face_distance = 8.0;
  double face_to_face_angle_deg = 30.0;
  double min_footprint_iou = 0.05;
  double ground_z = 0.0;
  double max_range = 100.0;

  void Validate() const;
};

using ImagePair = std::pair<std::string, std::string>;

PairGeometry ConeOverlap(const CameraRecord& a, const CameraRecord& b,
                         const HspConfig& config = {});

// Whether a candidate pair passes the z-gate, cone, face-to-face and
// footprint filters.
bool KeepPair(const CameraRecord& a, const CameraRecord& b, const PairGeometry& geometry,
              const HspConfig& config);

// Homography-guided spatial pairs. Pairs are unordered (first < second),
// deduplicated and sorted.
std::vector<ImagePair> SelectPairs(const std::vector<CameraRecord>& records,
                                   const HspConfig& config = {});

// Indices of the k nearest records to records[index] by center distance,
// excluding itself. Ties break by index.
std::vector<int> NearestNeighbors(const std::vector<CameraRecord>& records, int index, int k);

}  // namespace roadrecon
