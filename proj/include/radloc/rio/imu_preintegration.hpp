#pragma once

#include "radloc/geometry.hpp"
#include "radloc/types.hpp"

#include <Eigen/Core>
#include <span>
#include <vector>

namespace radloc::rio {

using Mat12 = Eigen::Matrix<double, 12, 12>;
using Vec12 = Eigen::Matrix<double, 12, 1>;

struct ImuNoiseParams {
  double accel_white = 0.01;      // m/s^2/sqrt(Hz)
  double gyro_white = 0.00035;    // rad/s/sqrt(Hz)
  double accel_bias_walk = 1e-3;  // m/s^3/sqrt(Hz)
  double gyro_bias_walk = 1e-4;   // rad/s^2/sqrt(Hz)
};

/// interpolate_imu: componentwise linear interpolation. Throws
/// std::invalid_argument when t lies outside [z0.t, z1.t] or z0.t >= z1.t.
ImuMeasurement interpolate_imu(const ImuMeasurement& z0, const ImuMeasurement& z1, double t);

/// Extracts the samples covering [t0, t1] from a time-ordered stream, with
/// both endpoints replaced by interpolated measurements.
std::vector<ImuMeasurement> imu_window(std::span<const ImuMeasurement> stream, double t0, double t1);

/// Velocity/orientation preintegration between two radar timesteps
/// (position is not integrated). Midpoint rule on the gyro, trapezoid on the
/// rotated specific force. Gravity is not included in delta_v.
class PreintegratedImu {
 public:
  PreintegratedImu() = default;
  /// Throws std::invalid_argument on fewer than two samples or non-increasing timestamps.
  PreintegratedImu(std::span<const ImuMeasurement> samples, const Vec3& accel_bias,
                   const Vec3& gyro_bias, const ImuNoiseParams& noise);

  /// Re-integrates the stored samples around new linearization biases.
  void repropagate(const Vec3& accel_bias, const Vec3& gyro_bias);

  /// Bias-corrected increments (first-order in the bias change).
  Quat delta_q(const Vec3& gyro_bias) const;
  Vec3 delta_v(const Vec3& accel_bias, const Vec3& gyro_bias) const;

  /// Predicts (q_OI, v_O) at the end of the interval from the start state.
  void predict(const Quat& q_i, const Vec3& v_i, const Vec3& accel_bias, const Vec3& gyro_bias,
               Quat& q_j, Vec3& v_j) const;

  double dt() const { return dt_; }
  const Quat& dq() const { return dq_; }
  const Vec3& dv() const { return dv_; }
  const Mat3& dq_dbg() const { return dq_dbg_; }
  const Mat3& dv_dba() const { return dv_dba_; }
  const Mat3& dv_dbg() const { return dv_dbg_; }
  const Vec3& lin_accel_bias() const { return ba0_; }
  const Vec3& lin_gyro_bias() const { return bg0_; }
  /// Covariance in residual order: rotation, velocity, gyro bias, accel bias.
  const Mat12& covariance() const { return cov_; }
  const std::vector<ImuMeasurement>& samples() const { return samples_; }

 private:
  void integrate();

  std::vector<ImuMeasurement> samples_;
  ImuNoiseParams noise_;
  Vec3 ba0_ = Vec3::Zero();
  Vec3 bg0_ = Vec3::Zero();
  double dt_ = 0.0;
  Quat dq_ = Quat::Identity();
  Vec3 dv_ = Vec3::Zero();
  Mat3 dq_dbg_ = Mat3::Zero();
  Mat3 dv_dba_ = Mat3::Zero();
  Mat3 dv_dbg_ = Mat3::Zero();
  Mat12 cov_ = Mat12::Zero();
};

}  // namespace radloc::rio
