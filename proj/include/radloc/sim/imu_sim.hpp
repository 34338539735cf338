#pragma once

#include "radloc/sim/trajectory.hpp"
#include "radloc/types.hpp"

#include <cstdint>
#include <vector>

namespace radloc::sim {

/// Continuous-time noise densities. White noise is sampled as sigma/sqrt(dt),
/// bias random walk as sigma*sqrt(dt) per step.
struct ImuNoise {
  double accel_white = 0.0;     // m/s^2/sqrt(Hz)
  double gyro_white = 0.0;      // rad/s/sqrt(Hz)
  double accel_bias_walk = 0.0; // m/s^3/sqrt(Hz)
  double gyro_bias_walk = 0.0;  // rad/s^2/sqrt(Hz)
  Vec3 accel_bias0 = Vec3::Zero();
  Vec3 gyro_bias0 = Vec3::Zero();

  static ImuNoise none() { return {}; }
};

struct ImuBias {
  double t = 0.0;
  Vec3 accel = Vec3::Zero();
  Vec3 gyro = Vec3::Zero();
};

/// sim_imu: a = R_IO (a_O - g_O) + b_a + n_a, w = w_true + b_g + n_g.
/// Deterministic for a given seed. `bias_out`, when given, receives the
/// true bias at every sample.
std::vector<ImuMeasurement> sim_imu(const GroundTruth& gt, const ImuNoise& noise, std::uint64_t seed,
                                    std::vector<ImuBias>* bias_out = nullptr);

}  // namespace radloc::sim
