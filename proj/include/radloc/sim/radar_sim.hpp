#pragma once

#include "radloc/sim/trajectory.hpp"
#include "radloc/types.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace radloc::sim {

struct StaticTarget {
  Vec3 position = Vec3::Zero();
  double reflectivity = 1.0;  // (0, 1], detection probability at short range
};

/// Point scatterer moving at constant velocity while t in [t_begin, t_end].
struct DynamicObject {
  Vec3 position0 = Vec3::Zero();  // position at t = 0
  Vec3 velocity = Vec3::Zero();
  double reflectivity = 1.0;
  double t_begin = -std::numeric_limits<double>::infinity();
  double t_end = std::numeric_limits<double>::infinity();

  Vec3 position(double t) const { return position0 + t * velocity; }
};

struct Scene {
  std::vector<StaticTarget> static_targets;
  std::vector<DynamicObject> dynamic_objects;
  double clutter_density = 0.0;  // Poisson mean of spurious detections per scan
};

/// Radar characteristics. Defaults are the automotive sensor of the
/// reference platform.
struct RadarModel {
  double max_range = 80.0;
  double azimuth_fov = deg2rad(75.0);    // half angle
  double elevation_fov = deg2rad(15.0);  // half angle
  double doppler_min = -30.0;
  double doppler_max = 30.0;
  double range_sigma = 0.03;
  double azimuth_sigma = deg2rad(0.2);
  double elevation_sigma = deg2rad(0.25);
  double doppler_sigma = 0.04;
  /// Detection probability is reflectivity * min(1, (ref_range / r)^2).
  double detection_ref_range = 25.0;
};

struct SensorRig {
  std::vector<RigidTransform> imu_from_radar;  // one per sensor
  double imu_rate = 200.0;
  double radar_rate = 20.0;
  double radar_time_offset = 0.0023;  // first radar stamp, s
  RadarModel radar;

  /// Three-sensor ground-vehicle rig: front-left, front-right, rear.
  static SensorRig default_rig();
};

struct RadarSimOptions {
  bool noise = true;
  bool dropout = true;  // range-dependent detection probability
};

/// Sensor-frame visibility test against range and FOV limits.
bool in_field_of_view(const Vec3& p_radar, const RadarModel& model);

/// Velocity of sensor `imu_from_radar` expressed in its own frame, given the
/// vehicle state: R_RI (R_IO v_O + w x t_IR).
Vec3 sensor_velocity(const TrajectorySample& state, const RigidTransform& imu_from_radar);

/// sim_radar_scan: one scan from sensor `sensor_id` at state.t.
RadarScan sim_radar_scan(const TrajectorySample& state, const Scene& scene, const SensorRig& rig,
                         int sensor_id, std::uint64_t seed, const RadarSimOptions& opts = {});

/// Stateless seed mixer so scans can be generated in any order.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace radloc::sim
