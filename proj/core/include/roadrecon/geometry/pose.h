#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace roadrecon {

// Rigid transform x -> R(q) x + t. The quaternion is normalized on
// construction; its serialized order is (x, y, z, w).
//
// Camera and body poses are stored as sensor-to-world transforms, so
// `t` is the sensor position in the world frame.
class Pose {
 public:
  Pose() : q_(Eigen::Quaterniond::Identity()), t_(Eigen::Vector3d::Zero()) {}
  Pose(const Eigen::Quaterniond& q, const Eigen::Vector3d& t);

  static Pose Identity() { return Pose(); }
  static Pose FromTranslation(const Eigen::Vector3d& t);
  static Pose FromRotation(const Eigen::Matrix3d& R, const Eigen::Vector3d& t);
  // Rotation about world z by `yaw` radians.
  static Pose FromYaw(double yaw, const Eigen::Vector3d& t = Eigen::Vector3d::Zero());
  // Quaternion given in (x, y, z, w) order.
  static Pose FromXyzw(double tx, double ty, double tz, double qx, double qy,
                       double qz, double qw);

  const Eigen::Quaterniond& rotation() const { return q_; }
  const Eigen::Vector3d& translation() const { return t_; }
  Eigen::Matrix3d RotationMatrix() const { return q_.toRotationMatrix(); }

  Eigen::Vector3d Apply(const Eigen::Vector3d& p) const { return q_ * p + t_; }
  Pose Inverse() const;
  Pose operator*(const Pose& other) const;

  // Right-multiplied tangent update: R <- R Exp(dtheta), t <- t + dt.
  Pose Retract(const Eigen::Vector3d& dt, const Eigen::Vector3d& dtheta) const;

 private:
  Eigen::Quaterniond q_;
  Eigen::Vector3d t_;
};

// Free-function aliases used throughout the pipeline.
inline Eigen::Vector3d Se3Apply(const Pose& pose, const Eigen::Vector3d& p) {
  return pose.Apply(p);
}
inline Pose Compose(const Pose& a, const Pose& b) { return a * b; }

// SO(3) exponential / logarithm on axis-angle vectors.
Eigen::Quaterniond ExpSO3(const Eigen::Vector3d& omega);
Eigen::Vector3d LogSO3(const Eigen::Quaterniond& q);
Eigen::Matrix3d Skew(const Eigen::Vector3d& v);
// Inverse of the right Jacobian of SO(3).
Eigen::Matrix3d RightJacobianInverseSO3(const Eigen::Vector3d& omega);

// Angle of the relative rotation between two orientations, radians.
double RotationAngle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b);

// Linear position / spherical-linear orientation interpolation, alpha in [0,1].
Pose Interpolate(const Pose& a, const Pose& b, double alpha);

}  // namespace roadrecon
