#pragma once

#include "radloc/geometry.hpp"

#include <cstdint>
#include <vector>

namespace radloc {

/// Specific force and angular rate, both in the IMU frame.
struct ImuMeasurement {
  double t = 0.0;
  Vec3 a = Vec3::Zero();
  Vec3 w = Vec3::Zero();
};

/// One radar return: position in the sensor frame and Doppler range rate.
/// Range rate is the projection of the sensor's velocity (relative to the
/// target) onto the target ray, i.e. positive when closing on a static target.
struct Detection {
  Vec3 p = Vec3::Zero();
  double rr = 0.0;
};

/// Provenance of a simulated detection. Never serialized; only tests and
/// the evaluation harness look at it.
enum class DetectionSource : std::uint8_t { Static, Dynamic, Clutter, Unknown };

struct RadarScan {
  double t = 0.0;
  int sensor = 0;
  std::vector<Detection> detections;
  std::vector<DetectionSource> truth;  // empty for recorded data
};

/// Ground-truth pose record as read from a log.
struct PoseStamped {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
  Quat q = Quat::Identity();
  Vec3 v = Vec3::Zero();
};

}  // namespace radloc
