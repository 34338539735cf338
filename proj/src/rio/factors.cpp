#include "radloc/rio/factors.hpp"

#include <cmath>

namespace radloc::rio {

CompensatedDetection lever_arm_compensated_rr(const Detection& d, const RigidTransform& imu_from_radar,
                                              const Vec3& omega, const Vec3& gyro_bias) {
  const double r = d.p.norm();
  const Vec3 ray = d.p / r;
  const Vec3 lever_vel = imu_from_radar.rotation.conjugate() *
                         (omega - gyro_bias).cross(imu_from_radar.translation);
  CompensatedDetection c;
  c.p_imu = imu_from_radar * d.p;
  c.ray_imu = imu_from_radar.rotation * ray;
  c.rr_imu = d.rr - lever_vel.dot(ray);
  return c;
}

double doppler_residual(const State& x, const Detection& d, const RigidTransform& imu_from_radar,
                        const Vec3& omega, DopplerJacobian* jac) {
  const Vec3 ray = d.p.normalized();
  const Mat3 R_RI = imu_from_radar.rotation.conjugate().toRotationMatrix();
  const Mat3 R_IO = x.q.conjugate().toRotationMatrix();
  const Vec3& t_IR = imu_from_radar.translation;
  const Vec3 v_imu = R_IO * x.v;
  const Vec3 w = omega - x.bg;
  const Vec3 v_sensor = R_RI * (v_imu + w.cross(t_IR));
  const double e = d.rr - v_sensor.dot(ray);
  if (jac) {
    const Row3 rayT_RRI = ray.transpose() * R_RI;
    jac->d_v = -rayT_RRI * R_IO;
    jac->d_theta = -rayT_RRI * skew(v_imu);
    jac->d_bg = -rayT_RRI * skew(t_IR);
  }
  return e;
}

Vec12 imu_residual(const State& xi, const State& xj, const PreintegratedImu& pre, ImuJacobian* jac) {
  const Vec3 dbg = xi.bg - pre.lin_gyro_bias();
  const Quat dq = pre.delta_q(xi.bg);
  const Vec3 dv = pre.delta_v(xi.ba, xi.bg);
  const Quat q_pred = (xi.q * dq).normalized();
  const Vec3 v_pred = xi.v + gravity_vector() * pre.dt() + xi.q * dv;

  const Quat qe = canonical(xj.q * q_pred.conjugate());
  Vec12 r;
  r.segment<3>(0) = 2.0 * qe.vec();
  r.segment<3>(3) = xj.v - v_pred;
  r.segment<3>(6) = xj.bg - xi.bg;
  r.segment<3>(9) = xj.ba - xi.ba;

  if (jac) {
    const Mat3 M = qe.w() * Mat3::Identity() + skew(qe.vec());
    const Mat3 R_pred = q_pred.toRotationMatrix();
    const Mat3 R_i = xi.q.toRotationMatrix();
    const Mat3 Jr = so3_right_jacobian(pre.dq_dbg() * dbg);
    jac->d_i.setZero();
    jac->d_j.setZero();

    // rotation row
    jac->d_j.block<3, 3>(0, kRot) = M * R_pred;
    jac->d_i.block<3, 3>(0, kRot) = -M * R_i;
    jac->d_i.block<3, 3>(0, kGyroBias) = -M * R_pred * Jr * pre.dq_dbg();

    // velocity row
    jac->d_j.block<3, 3>(3, kVel) = Mat3::Identity();
    jac->d_i.block<3, 3>(3, kVel) = -Mat3::Identity();
    jac->d_i.block<3, 3>(3, kRot) = R_i * skew(dv);
    jac->d_i.block<3, 3>(3, kAccBias) = -R_i * pre.dv_dba();
    jac->d_i.block<3, 3>(3, kGyroBias) = -R_i * pre.dv_dbg();

    // bias rows
    jac->d_j.block<3, 3>(6, kGyroBias) = Mat3::Identity();
    jac->d_i.block<3, 3>(6, kGyroBias) = -Mat3::Identity();
    jac->d_j.block<3, 3>(9, kAccBias) = Mat3::Identity();
    jac->d_i.block<3, 3>(9, kAccBias) = -Mat3::Identity();
  }
  return r;
}

double polar_distance(const Vec3& p_d, const Vec3& p_l, double bearing_weight) {
  const double dphi = wrap_angle(atan2_bearing(p_d) - atan2_bearing(p_l));
  const double drange = p_d.norm() - p_l.norm();
  return std::sqrt(bearing_weight * bearing_weight * dphi * dphi + drange * drange);
}

std::optional<double> landmark_residual(const State& x, const Vec3& p_det_imu, const Vec3& p_landmark,
                                        const Vec3& t_OI, Row3* d_theta) {
  const Vec3 p = x.q.conjugate() * (p_landmark - t_OI);
  if (!has_bearing(p_det_imu) || !has_bearing(p)) return std::nullopt;
  const double e = wrap_angle(atan2_bearing(p_det_imu) - atan2_bearing(p));
  if (d_theta) {
    const double r2 = p.x() * p.x() + p.y() * p.y();
    const Row3 dphi_dp(-p.y() / r2, p.x() / r2, 0.0);
    *d_theta = -dphi_dp * skew(p);
  }
  return e;
}

std::optional<double> landmark_residual(const State& x, const Detection& d,
                                        const RigidTransform& imu_from_radar, const Vec3& p_landmark,
                                        const Vec3& t_OI, Row3* d_theta) {
  return landmark_residual(x, imu_from_radar * d.p, p_landmark, t_OI, d_theta);
}

}  // namespace radloc::rio
