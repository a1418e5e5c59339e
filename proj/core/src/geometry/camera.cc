#include "roadrecon/geometry/camera.h"

#include <cmath>
#include <sstream>

#include "roadrecon/errors.h"

namespace roadrecon {

void CameraIntrinsics::Validate() const {
  std::ostringstream msg;
  if (!(fx > 0.0) || !(fy > 0.0)) {
    msg << "focal lengths must be positive (fx=" << fx << ", fy=" << fy << ")";
  } else if (width <= 0 || height <= 0) {
    msg << "image size must be positive (" << width << "x" << height << ")";
  } else if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    msg << "principal point (" << cx << ", " << cy << ") outside the image";
  } else {
    return;
  }
  throw InvalidArgumentError("CameraIntrinsics: " + msg.str());
}

Eigen::Matrix3d CameraIntrinsics::K() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

Eigen::Vector2d Project(const CameraIntrinsics& cam, const Eigen::Vector3d& p_cam) {
  if (!(p_cam.z() > 0.0)) {
    std::ostringstream msg;
    msg << "point has non-positive depth " << p_cam.z();
    throw CheiralityError(msg.str());
  }
  return ProjectUnchecked(cam, p_cam);
}

Eigen::Vector3d Backproject(const CameraIntrinsics& cam, const Eigen::Vector2d& pixel) {
  return Eigen::Vector3d((pixel.x() - cam.cx) / cam.fx, (pixel.y() - cam.cy) / cam.fy, 1.0)
      .normalized();
}

bool PixelIndex(const CameraIntrinsics& cam, const Eigen::Vector2d& uv, int* col,
                int* row) {
  if (!std::isfinite(uv.x()) || !std::isfinite(uv.y())) return false;
  const double c = std::floor(uv.x());
  const double r = std::floor(uv.y());
  if (c < 0.0 || r < 0.0 || c >= cam.width || r >= cam.height) return false;
  *col = static_cast<int>(c);
  *row = static_cast<int>(r);
  return true;
}

Pose LookAtPose(const Eigen::Vector3d& center, const Eigen::Vector3d& forward,
                const Eigen::Vector3d& up) {
  const Eigen::Vector3d z = forward.normalized();
  Eigen::Vector3d x = z.cross(up);
  if (x.norm() < 1e-12) {
    throw InvalidArgumentError("LookAtPose: forward and up are parallel");
  }
  x.normalize();
  const Eigen::Vector3d y = z.cross(x);
  Eigen::Matrix3d R;
  R.col(0) = x;
  R.col(1) = y;
  R.col(2) = z;
  return Pose::FromRotation(R, center);
}

}  // namespace roadrecon
