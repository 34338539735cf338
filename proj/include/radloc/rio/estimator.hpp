#pragma once

#include "radloc/rio/landmark_tracker.hpp"
#include "radloc/rio/ransac.hpp"
#include "radloc/rio/sliding_window.hpp"
#include "radloc/types.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace radloc::rio {

struct RioParams {
  RansacParams ransac;
  LandmarkParams landmarks;
  WindowParams window;
  OptimizeParams optimize;
  ImuNoiseParams imu;
  int window_size = 10;
  bool heading_constraint = true;
  int max_doppler_per_step = 80;
  int max_landmark_factors_per_step = 40;
  double bias_relin_threshold = 0.01;  // |delta b| (rad/s or m/s^2) before re-integration
  double max_accel_bias = 1.0;         // m/s^2
  double max_gyro_bias = 0.2;          // rad/s
  int max_consecutive_failures = 20;
  std::uint64_t seed = 7;
  // Initial prior standard deviations.
  double init_sigma_vel = 0.1;
  double init_sigma_tilt = deg2rad(1.0);
  double init_sigma_yaw = deg2rad(0.1);
  double init_sigma_accel_bias = 0.1;
  double init_sigma_gyro_bias = 0.01;
};

struct StepDiagnostics {
  RansacStatus ransac = RansacStatus::Ok;
  int detections = 0;
  int inliers = 0;
  int doppler_factors = 0;
  int landmark_factors = 0;
  int landmarks_tracked = 0;
  int iterations = 0;
  bool rolled_back = false;
  bool prior_regularized = false;
  std::size_t window_factors = 0;
};

/// Odometry emitted once per radar timestep.
struct OdometryOutput {
  double t = 0.0;
  Quat q = Quat::Identity();  // q_OI
  Vec3 v = Vec3::Zero();      // global-frame velocity
  Vec3 p = Vec3::Zero();      // dead-reckoned t_OI
  Vec3 ba = Vec3::Zero();
  Vec3 bg = Vec3::Zero();
  bool degraded = false;
  StepDiagnostics diag;
};

class EstimatorDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Radar-inertial odometry over a fixed-lag window. Single owner: calls to
/// step() must be serialized by the caller.
class RioEstimator {
 public:
  RioEstimator(RioParams params, std::vector<RigidTransform> imu_from_radar);

  /// Starts the window at state x0 (time x0.t) with position p0.
  void initialize(const State& x0, const Vec3& p0 = Vec3::Zero());
  bool initialized() const { return initialized_; }

  /// rio_step: consumes the scans stamped t (all sensors) and an IMU stream
  /// covering [previous t, t]. The first call after initialize() must have
  /// t > x0.t.
  OdometryOutput step(double t, std::span<const RadarScan> scans, std::span<const ImuMeasurement> imu);

  /// Estimated state of the newest slot.
  const State& current() const { return window_.back().x; }
  const Vec3& position() const { return window_.back().t_OI; }
  const SlidingWindow& window() const { return window_; }
  const LandmarkTracker& tracker() const { return tracker_; }
  const RioParams& params() const { return params_; }

  /// Pools and compensates the detections of all scans at one timestep.
  std::vector<CompensatedDetection> compensate(std::span<const RadarScan> scans, const Vec3& omega,
                                               const Vec3& gyro_bias) const;

 private:
  RioParams params_;
  std::vector<RigidTransform> extrinsics_;
  SlidingWindow window_;
  LandmarkTracker tracker_;
  bool initialized_ = false;
  std::uint64_t step_count_ = 0;
  int consecutive_failures_ = 0;
};

/// Velocity from the first pooled RANSAC and roll/pitch from the mean
/// specific force; yaw is set to zero.
State bootstrap_state(double t, std::span<const ImuMeasurement> imu, const Vec3& velocity_imu);

}  // namespace radloc::rio
