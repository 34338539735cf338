#pragma once

#include "radloc/geometry.hpp"

#include <variant>
#include <vector>

namespace radloc::sim {

/// Ground-truth kinematic state at one instant. Orientation is q_OI,
/// velocity and acceleration are global-frame, angular rate is body (I) frame.
struct TrajectorySample {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
  Quat q = Quat::Identity();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
};

using GroundTruth = std::vector<TrajectorySample>;

struct Stationary {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
};

struct Line {
  Vec3 start = Vec3::Zero();
  double heading = 0.0;  // rad
  double speed = 1.0;    // m/s
};

struct Circle {
  Vec3 center = Vec3::Zero();
  double radius = 10.0;
  double speed = 2.0;
  bool counter_clockwise = true;
};

/// Lemniscate-like figure eight: x = A sin(wt), y = (A/2) sin(2wt).
struct FigureEight {
  Vec3 center = Vec3::Zero();
  double half_width = 20.0;
  double period = 60.0;
};

/// Closed periodic cubic B-spline. The waypoint polygon is resampled at
/// `control_spacing` and the samples act as control points, so corners are
/// rounded and speed is approximately `speed`.
struct WaypointLoop {
  std::vector<Vec3> waypoints;
  double speed = 2.0;
  double control_spacing = 4.0;
};

using TrajectorySpec = std::variant<Stationary, Line, Circle, FigureEight, WaypointLoop>;

/// Analytic ground-vehicle trajectory. The vehicle stays level and faces its
/// direction of travel, so orientation is C1 whenever position is C2.
class Trajectory {
 public:
  /// Throws std::invalid_argument for specs that are not smooth or
  /// degenerate (non-positive speed/radius, repeated waypoints, ...).
  explicit Trajectory(TrajectorySpec spec);

  TrajectorySample at(double t) const;

  /// Samples [0, duration] at `rate` Hz (inclusive of t = 0).
  GroundTruth sample(double duration, double rate) const;

  /// Time for one full traversal for periodic specs, 0 otherwise.
  double period() const;

  const TrajectorySpec& spec() const { return spec_; }

 private:
  struct Kinematics {
    Vec3 p, v, a;
  };
  Kinematics planar(double t) const;

  TrajectorySpec spec_;
  std::vector<Vec3> control_;  // WaypointLoop control points
  double segment_time_ = 0.0;
};

/// gen_trajectory: validates the spec and samples it at the IMU rate.
GroundTruth gen_trajectory(const TrajectorySpec& spec, double duration, double imu_rate);

/// Linear interpolation of position/velocity and slerp of orientation.
TrajectorySample interpolate(const GroundTruth& gt, double t);

}  // namespace radloc::sim
