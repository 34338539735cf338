#pragma once

#include "radloc/sim/imu_sim.hpp"
#include "radloc/sim/radar_sim.hpp"
#include "radloc/sim/trajectory.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace radloc::sim {

/// Everything a simulated mission produces. Scans are ordered by time and,
/// within a timestamp, by sensor id.
struct SensorLog {
  std::vector<ImuMeasurement> imu;
  std::vector<RadarScan> scans;
  GroundTruth gt;
  std::vector<ImuBias> imu_bias;  // truth only, not serialized
};

/// Knobs for the bundled scenarios. Defaults describe the suburban loop.
struct ScenarioConfig {
  std::string name = "suburban_loop";  // suburban_loop | corridor | stationary | line | circle | figure8
  double duration = 0.0;               // s; 0 means one full loop (or 30 s)
  double speed = 2.0;                  // m/s
  std::uint64_t seed = 1;        // noise, traffic and clutter
  std::uint64_t world_seed = 1;  // static scene
  double clutter_density = 5.0;
  double dynamic_fraction = 0.2;       // target share of dynamic detections
  double landmark_density = 1.0;       // scales the number of scattered static targets
  bool radar_noise = true;
  bool radar_dropout = true;
  ImuNoise imu_noise = default_imu_noise();
  std::vector<int> sensors;  // subset of the rig to simulate; empty = all

  static ImuNoise default_imu_noise();
};

struct Scenario {
  Trajectory trajectory;
  Scene scene;
  SensorRig rig;
  double duration = 0.0;
};

/// Builds the trajectory, scene and rig for a named scenario.
Scenario make_scenario(const ScenarioConfig& cfg);

/// Runs the IMU and radar simulators over the scenario.
SensorLog simulate(const Scenario& sc, const ScenarioConfig& cfg);

/// Radar timestamps used by `simulate`.
std::vector<double> radar_timestamps(const SensorRig& rig, double duration);

}  // namespace radloc::sim
