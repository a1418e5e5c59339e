#pragma once

#include <vector>

#include <Eigen/Core>

#include "roadrecon/geometry/pose.h"

namespace roadrecon {

// Rectified pinhole camera. Pixel (col, row) covers [col, col + 1) x
// [row, row + 1), so its center sits at (col + 0.5, row + 0.5) and the image
// spans [0, width) x [0, height).
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  // Throws InvalidArgumentError when the invariants do not hold.
  void Validate() const;

  Eigen::Matrix3d K() const;
  bool operator==(const CameraIntrinsics&) const = default;
};

// Pinhole projection of a camera-frame point; throws CheiralityError for z <= 0.
Eigen::Vector2d Project(const CameraIntrinsics& cam, const Eigen::Vector3d& p_cam);

// Same as Project but without the depth check.
inline Eigen::Vector2d ProjectUnchecked(const CameraIntrinsics& cam,
                                        const Eigen::Vector3d& p_cam) {
  return {cam.fx * p_cam.x() / p_cam.z() + cam.cx,
          cam.fy * p_cam.y() / p_cam.z() + cam.cy};
}

// Unit-norm viewing ray of a pixel in the camera frame.
Eigen::Vector3d Backproject(const CameraIntrinsics& cam, const Eigen::Vector2d& pixel);

// Index of the pixel containing a continuous coordinate, or false when outside.
bool PixelIndex(const CameraIntrinsics& cam, const Eigen::Vector2d& uv, int* col,
                int* row);

inline Eigen::Vector2d PixelCenter(int col, int row) {
  return {col + 0.5, row + 0.5};
}

// World point in the frame of a camera whose camera-to-world pose is given.
inline Eigen::Vector3d WorldToCamera(const Pose& cam_to_world, const Eigen::Vector3d& p) {
  return cam_to_world.rotation().conjugate() * (p - cam_to_world.translation());
}

// Optical axis (camera +z) expressed in the world frame.
inline Eigen::Vector3d OpticalAxis(const Pose& cam_to_world) {
  return cam_to_world.rotation() * Eigen::Vector3d::UnitZ();
}

// Camera-to-world pose of a camera at `center` looking along `forward`, with
// image rows pointing opposite to `up` (x right, y down, z forward).
Pose LookAtPose(const Eigen::Vector3d& center, const Eigen::Vector3d& forward,
                const Eigen::Vector3d& up = Eigen::Vector3d::UnitZ());

}  // namespace roadrecon
