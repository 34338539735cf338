#pragma once

// Frame and rotation conventions used throughout radloc.
//
//  * Quaternions follow the Hamilton convention (Eigen::Quaterniond).
//  * Frames: O is the global (odometry/map) frame with z up, I is the IMU
//    frame, R_s is radar sensor s.
//  * A rotation named `x_from_y` (or R_XY) maps vectors expressed in frame Y
//    into frame X. The estimator's orientation state is q_OI, i.e. the
//    rotation of the IMU frame relative to the global frame; it maps I-frame
//    vectors into O.
//  * Orientation increments are applied on the right: R <- R * Exp(dtheta),
//    so dtheta lives in the body (I) frame.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <stdexcept>

namespace radloc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

constexpr double kPi = 3.14159265358979323846;
constexpr double kGravity = 9.81;

/// Global-frame gravity; the global frame is z up.
inline Vec3 gravity_vector() { return Vec3(0.0, 0.0, -kGravity); }

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

enum class FrameKind { Global, Imu, Radar };

struct FrameId {
  FrameKind kind = FrameKind::Global;
  int sensor = -1;  // only meaningful for Radar

  static FrameId global() { return {FrameKind::Global, -1}; }
  static FrameId imu() { return {FrameKind::Imu, -1}; }
  static FrameId radar(int s) { return {FrameKind::Radar, s}; }

  bool operator==(const FrameId&) const = default;
};

class InvalidBearing : public std::domain_error {
 public:
  InvalidBearing() : std::domain_error("bearing undefined for a point on the z axis") {}
};

/// Rigid transform target <- source. Frames are tracked so that composing
/// transforms across unrelated frames fails loudly.
struct RigidTransform {
  Quat rotation = Quat::Identity();
  Vec3 translation = Vec3::Zero();
  FrameId target = FrameId::global();
  FrameId source = FrameId::global();

  RigidTransform() = default;
  RigidTransform(const Quat& q, const Vec3& t) : rotation(q.normalized()), translation(t) {}
  RigidTransform(const Quat& q, const Vec3& t, FrameId tgt, FrameId src)
      : rotation(q.normalized()), translation(t), target(tgt), source(src) {}

  static RigidTransform identity() { return {}; }

  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }

  /// this * other; requires other.target == this->source.
  RigidTransform operator*(const RigidTransform& other) const;
  RigidTransform inverse() const;
  Eigen::Matrix4d matrix() const;
};

/// Yaw-only rotation about +z.
Quat yaw_quat(double yaw);
/// Yaw of the rotation, i.e. heading of the rotated x axis in the xy-plane.
double yaw_of(const Quat& q);

Mat3 skew(const Vec3& v);

/// SO(3) exponential and logarithm.
Quat so3_exp(const Vec3& theta);
Vec3 so3_log(const Quat& q);
/// Right Jacobian of SO(3) and its inverse.
Mat3 so3_right_jacobian(const Vec3& theta);
Mat3 so3_right_jacobian_inv(const Vec3& theta);

/// Returns q with w >= 0 (same rotation).
Quat canonical(const Quat& q);

/// 2 * vec(q_est (x) q_ref^-1), sign canonicalized so that identical
/// rotations map to zero regardless of representation.
Vec3 quat_error_vec(const Quat& q_est, const Quat& q_ref);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

bool has_bearing(const Vec3& p);
/// atan2(p.y, p.x); throws InvalidBearing when (p.x, p.y) == (0, 0).
double atan2_bearing(const Vec3& p);

}  // namespace radloc
