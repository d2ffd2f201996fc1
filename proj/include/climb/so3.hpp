#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace climb {

// Exact exponential map: rotation vector -> unit quaternion.
inline Eigen::Quaterniond quat_exp(const Eigen::Vector3d& w) {
  const double th = w.norm();
  if (th < 1e-12) {
    Eigen::Quaterniond q(1.0, 0.5 * w.x(), 0.5 * w.y(), 0.5 * w.z());
    q.normalize();
    return q;
  }
  const double half = 0.5 * th;
  const Eigen::Vector3d axis = w / th;
  const double s = std::sin(half);
  return Eigen::Quaterniond(std::cos(half), s * axis.x(), s * axis.y(), s * axis.z());
}

// Exact logarithm: unit quaternion -> rotation vector in (-pi, pi].
inline Eigen::Vector3d quat_log(const Eigen::Quaterniond& q_in) {
  Eigen::Quaterniond q = q_in.normalized();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const double vn = q.vec().norm();
  if (vn < 1e-12) return 2.0 * q.vec();
  const double th = 2.0 * std::atan2(vn, q.w());
  return th * (q.vec() / vn);
}

// Right-multiplicative retraction used for the local error state.
inline Eigen::Quaterniond quat_retract(const Eigen::Quaterniond& q, const Eigen::Vector3d& dth) {
  return (q * quat_exp(dth)).normalized();
}

inline Eigen::Vector3d quat_error(const Eigen::Quaterniond& ref, const Eigen::Quaterniond& q) {
  return quat_log(ref.conjugate() * q);
}

inline Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

}  // namespace climb
