#include "radloc/geometry.hpp"

#include <cmath>

namespace radloc {

RigidTransform RigidTransform::operator*(const RigidTransform& other) const {
  if (!(other.target == source)) {
    throw std::invalid_argument("RigidTransform: composing transforms with mismatched frames");
  }
  RigidTransform out;
  out.rotation = (rotation * other.rotation).normalized();
  out.translation = rotation * other.translation + translation;
  out.target = target;
  out.source = other.source;
  return out;
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform out;
  out.rotation = rotation.conjugate();
  out.translation = -(out.rotation * translation);
  out.target = source;
  out.source = target;
  return out;
}

Eigen::Matrix4d RigidTransform::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation.toRotationMatrix();
  m.topRightCorner<3, 1>() = translation;
  return m;
}

Quat yaw_quat(double yaw) { return Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ())); }

double yaw_of(const Quat& q) {
  const Vec3 x = q * Vec3::UnitX();
  return std::atan2(x.y(), x.x());
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Quat so3_exp(const Vec3& theta) {
  const double angle = theta.norm();
  if (angle < 1e-12) {
    Quat q(1.0, 0.5 * theta.x(), 0.5 * theta.y(), 0.5 * theta.z());
    return q.normalized();
  }
  return Quat(Eigen::AngleAxisd(angle, theta / angle));
}

Vec3 so3_log(const Quat& q_in) {
  const Quat q = canonical(q_in.normalized());
  const double n = q.vec().norm();
  if (n < 1e-12) return 2.0 * q.vec() / q.w();
  const double angle = 2.0 * std::atan2(n, q.w());
  return angle * q.vec() / n;
}

Mat3 so3_right_jacobian(const Vec3& theta) {
  const double a = theta.norm();
  const Mat3 K = skew(theta);
  if (a < 1e-6) return Mat3::Identity() - 0.5 * K + K * K / 6.0;
  const double a2 = a * a;
  return Mat3::Identity() - (1.0 - std::cos(a)) / a2 * K + (a - std::sin(a)) / (a2 * a) * K * K;
}

Mat3 so3_right_jacobian_inv(const Vec3& theta) {
  const double a = theta.norm();
  const Mat3 K = skew(theta);
  if (a < 1e-6) return Mat3::Identity() + 0.5 * K + K * K / 12.0;
  const double a2 = a * a;
  return Mat3::Identity() + 0.5 * K +
         (1.0 / a2 - (1.0 + std::cos(a)) / (2.0 * a * std::sin(a))) * K * K;
}

Quat canonical(const Quat& q) {
  if (q.w() < 0.0) return Quat(-q.w(), -q.x(), -q.y(), -q.z());
  return q;
}

Vec3 quat_error_vec(const Quat& q_est, const Quat& q_ref) {
  const Quat e = canonical(q_est * q_ref.conjugate());
  return 2.0 * e.vec();
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

bool has_bearing(const Vec3& p) { return p.x() != 0.0 || p.y() != 0.0; }

double atan2_bearing(const Vec3& p) {
  if (!has_bearing(p)) throw InvalidBearing();
  const double b = std::atan2(p.y(), p.x());
  return b == -kPi ? kPi : b;
}

}  // namespace radloc
