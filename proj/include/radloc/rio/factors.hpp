#pragma once

// Residuals of the radar-inertial factor graph and their analytic Jacobians
// with respect to the tangent layout of State (v, theta, b_a, b_g).

#include "radloc/rio/imu_preintegration.hpp"
#include "radloc/rio/state.hpp"
#include "radloc/types.hpp"

#include <optional>

namespace radloc::rio {

using Row3 = Eigen::Matrix<double, 1, 3>;
using Mat12 = Eigen::Matrix<double, 12, 12>;

/// Detection moved into the IMU frame with the lever-arm velocity removed.
/// For a static target rr_imu == v_I . ray_imu.
struct CompensatedDetection {
  Vec3 p_imu = Vec3::Zero();    // R_IR p + t_IR
  Vec3 ray_imu = Vec3::Zero();  // R_IR p / |p|
  double rr_imu = 0.0;
  int sensor = 0;
  int index = 0;  // position in the originating scan
};

/// Compensates for the velocity the IMU rotation induces at the sensor:
/// rr_I = rr - (R_RI ((w - b_g) x t_IR)) . p_hat.
CompensatedDetection lever_arm_compensated_rr(const Detection& d, const RigidTransform& imu_from_radar,
                                              const Vec3& omega, const Vec3& gyro_bias);

struct DopplerJacobian {
  Row3 d_v = Row3::Zero();
  Row3 d_theta = Row3::Zero();
  Row3 d_bg = Row3::Zero();
};

/// e_d = rr - (R_RO v_O + R_RI((w - b_g) x t_IR)) . p_hat
double doppler_residual(const State& x, const Detection& d, const RigidTransform& imu_from_radar,
                        const Vec3& omega, DopplerJacobian* jac = nullptr);

struct ImuJacobian {
  Mat12 d_i = Mat12::Zero();
  Mat12 d_j = Mat12::Zero();
};

/// Rows: rotation error 2 vec(q_j (x) q_pred^-1), v_j - v_pred,
/// b_g,j - b_g,i, b_a,j - b_a,i. Zero on a propagation-consistent pair.
Vec12 imu_residual(const State& xi, const State& xj, const PreintegratedImu& pre,
                   ImuJacobian* jac = nullptr);

/// Weighted polar distance sqrt(L^2 dphi^2 + drange^2). Throws InvalidBearing
/// when either point has no bearing.
double polar_distance(const Vec3& p_d, const Vec3& p_l, double bearing_weight);

/// e_l = phi(p_det_imu) - phi(R_IO (p_landmark - t_OI)), wrapped to (-pi, pi].
/// p_landmark and t_OI are constants. Returns nullopt when either bearing is
/// undefined.
std::optional<double> landmark_residual(const State& x, const Vec3& p_det_imu, const Vec3& p_landmark,
                                        const Vec3& t_OI, Row3* d_theta = nullptr);

/// Same, starting from the raw sensor-frame detection.
std::optional<double> landmark_residual(const State& x, const Detection& d,
                                        const RigidTransform& imu_from_radar, const Vec3& p_landmark,
                                        const Vec3& t_OI, Row3* d_theta = nullptr);

}  // namespace radloc::rio
