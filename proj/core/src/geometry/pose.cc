#include "roadrecon/geometry/pose.h"

#include <cmath>

#include "roadrecon/errors.h"

namespace roadrecon {

Pose::Pose(const Eigen::Quaterniond& q, const Eigen::Vector3d& t) : q_(q), t_(t) {
  const double norm = q_.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InvalidArgumentError("Pose: quaternion must have non-zero finite norm");
  }
  q_.coeffs() /= norm;
  // Canonical hemisphere keeps serialization stable.
  if (q_.w() < 0.0) {
    q_.coeffs() = -q_.coeffs();
  }
}

Pose Pose::FromTranslation(const Eigen::Vector3d& t) {
  return Pose(Eigen::Quaterniond::Identity(), t);
}

Pose Pose::FromRotation(const Eigen::Matrix3d& R, const Eigen::Vector3d& t) {
  return Pose(Eigen::Quaterniond(R), t);
}

Pose Pose::FromYaw(double yaw, const Eigen::Vector3d& t) {
  return Pose(Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ())), t);
}

Pose Pose::FromXyzw(double tx, double ty, double tz, double qx, double qy,
                    double qz, double qw) {
  return Pose(Eigen::Quaterniond(qw, qx, qy, qz), Eigen::Vector3d(tx, ty, tz));
}

Pose Pose::Inverse() const {
  const Eigen::Quaterniond qi = q_.conjugate();
  return Pose(qi, -(qi * t_));
}

Pose Pose::operator*(const Pose& other) const {
  return Pose(q_ * other.q_, q_ * other.t_ + t_);
}

Pose Pose::Retract(const Eigen::Vector3d& dt, const Eigen::Vector3d& dtheta) const {
  return Pose(q_ * ExpSO3(dtheta), t_ + dt);
}

Eigen::Quaterniond ExpSO3(const Eigen::Vector3d& omega) {
  const double theta = omega.norm();
  if (theta < 1e-12) {
    Eigen::Quaterniond q(1.0, 0.5 * omega.x(), 0.5 * omega.y(), 0.5 * omega.z());
    return q.normalized();
  }
  return Eigen::Quaterniond(Eigen::AngleAxisd(theta, omega / theta));
}

Eigen::Vector3d LogSO3(const Eigen::Quaterniond& q_in) {
  Eigen::Quaterniond q = q_in.normalized();
  if (q.w() < 0.0) {
    q.coeffs() = -q.coeffs();
  }
  const Eigen::Vector3d v = q.vec();
  const double s = v.norm();
  if (s < 1e-12) {
    return 2.0 * v / q.w();
  }
  const double theta = 2.0 * std::atan2(s, q.w());
  return theta * v / s;
}

Eigen::Matrix3d Skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Eigen::Matrix3d RightJacobianInverseSO3(const Eigen::Vector3d& omega) {
  const double theta = omega.norm();
  const Eigen::Matrix3d W = Skew(omega);
  if (theta < 1e-6) {
    return Eigen::Matrix3d::Identity() + 0.5 * W + W * W / 12.0;
  }
  const double coeff =
      1.0 / (theta * theta) - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  return Eigen::Matrix3d::Identity() + 0.5 * W + coeff * W * W;
}

double RotationAngle(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
  return LogSO3(a.conjugate() * b).norm();
}

Pose Interpolate(const Pose& a, const Pose& b, double alpha) {
  const Eigen::Vector3d t =
      (1.0 - alpha) * a.translation() + alpha * b.translation();
  const Eigen::Quaterniond q = a.rotation().slerp(alpha, b.rotation());
  return Pose(q, t);
}

}  // namespace roadrecon
