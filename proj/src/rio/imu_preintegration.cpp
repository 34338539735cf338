#include "radloc/rio/imu_preintegration.hpp"

#include <algorithm>
#include <stdexcept>

namespace radloc::rio {

ImuMeasurement interpolate_imu(const ImuMeasurement& z0, const ImuMeasurement& z1, double t) {
  if (!(z0.t < z1.t)) throw std::invalid_argument("interpolate_imu: z0.t must precede z1.t");
  if (t < z0.t || t > z1.t) throw std::invalid_argument("interpolate_imu: t outside [z0.t, z1.t]");
  if (t == z0.t) return z0;
  if (t == z1.t) return z1;
  const double u = (t - z0.t) / (z1.t - z0.t);
  ImuMeasurement z;
  z.t = t;
  z.a = z0.a + u * (z1.a - z0.a);
  z.w = z0.w + u * (z1.w - z0.w);
  return z;
}

std::vector<ImuMeasurement> imu_window(std::span<const ImuMeasurement> stream, double t0, double t1) {
  if (!(t0 < t1)) throw std::invalid_argument("imu_window: empty interval");
  if (stream.size() < 2 || stream.front().t > t0 || stream.back().t < t1)
    throw std::invalid_argument("imu_window: stream does not cover the interval");
  auto by_time = [](const ImuMeasurement& m, double t) { return m.t < t; };
  // first sample with t >= t0
  auto lo = std::lower_bound(stream.begin(), stream.end(), t0, by_time);
  std::vector<ImuMeasurement> out;
  if (lo->t == t0) {
    out.push_back(*lo);
  } else {
    out.push_back(interpolate_imu(*(lo - 1), *lo, t0));
  }
  auto it = lo;
  while (it != stream.end() && it->t < t1) {
    if (it->t > t0) out.push_back(*it);
    ++it;
  }
  if (it != stream.end() && it->t == t1) {
    out.push_back(*it);
  } else {
    out.push_back(interpolate_imu(*(it - 1), *it, t1));
  }
  return out;
}

PreintegratedImu::PreintegratedImu(std::span<const ImuMeasurement> samples, const Vec3& accel_bias,
                                   const Vec3& gyro_bias, const ImuNoiseParams& noise)
    : samples_(samples.begin(), samples.end()), noise_(noise), ba0_(accel_bias), bg0_(gyro_bias) {
  if (samples_.size() < 2) throw std::invalid_argument("preintegrate: need at least one interval");
  for (size_t i = 1; i < samples_.size(); ++i) {
    if (!(samples_[i].t > samples_[i - 1].t))
      throw std::invalid_argument("preintegrate: timestamps must be strictly increasing");
  }
  integrate();
}

void PreintegratedImu::repropagate(const Vec3& accel_bias, const Vec3& gyro_bias) {
  ba0_ = accel_bias;
  bg0_ = gyro_bias;
  integrate();
}

void PreintegratedImu::integrate() {
  dt_ = 0.0;
  Mat3 R = Mat3::Identity();
  dv_.setZero();
  dq_dbg_.setZero();
  dv_dba_.setZero();
  dv_dbg_.setZero();
  Eigen::Matrix<double, 6, 6> P = Eigen::Matrix<double, 6, 6>::Zero();
  const double sg2 = noise_.gyro_white * noise_.gyro_white;
  const double sa2 = noise_.accel_white * noise_.accel_white;

  for (size_t k = 0; k + 1 < samples_.size(); ++k) {
    const ImuMeasurement& z0 = samples_[k];
    const ImuMeasurement& z1 = samples_[k + 1];
    const double h = z1.t - z0.t;
    const Vec3 w = 0.5 * (z0.w + z1.w) - bg0_;
    const Vec3 a0 = z0.a - ba0_;
    const Vec3 a1 = z1.a - ba0_;
    const Mat3 dR = so3_exp(w * h).toRotationMatrix();
    const Mat3 Jr = so3_right_jacobian(w * h);
    const Mat3 R1 = R * dR;

    dv_ += 0.5 * h * (R * a0 + R1 * a1);

    const Mat3 J_R1 = dR.transpose() * dq_dbg_ - Jr * h;
    dv_dba_ -= 0.5 * h * (R + R1);
    dv_dbg_ -= 0.5 * h * (R * skew(a0) * dq_dbg_ + R1 * skew(a1) * J_R1);
    dq_dbg_ = J_R1;

    Eigen::Matrix<double, 6, 6> A = Eigen::Matrix<double, 6, 6>::Identity();
    A.block<3, 3>(0, 0) = dR.transpose();
    A.block<3, 3>(3, 0) = -0.5 * h * (R * skew(a0) + R1 * skew(a1) * dR.transpose());
    Eigen::Matrix<double, 6, 3> Bg = Eigen::Matrix<double, 6, 3>::Zero();
    Bg.block<3, 3>(0, 0) = Jr * h;
    Bg.block<3, 3>(3, 0) = -0.5 * h * R1 * skew(a1) * Jr * h;
    Eigen::Matrix<double, 6, 3> Ba = Eigen::Matrix<double, 6, 3>::Zero();
    Ba.block<3, 3>(3, 0) = 0.5 * h * (R + R1);
    P = A * P * A.transpose() + Bg * (sg2 / h) * Bg.transpose() + Ba * (sa2 / h) * Ba.transpose();

    R = R1;
    dt_ += h;
  }
  dq_ = Quat(R).normalized();

  cov_.setZero();
  cov_.block<6, 6>(0, 0) = P;
  cov_.block<3, 3>(6, 6) = Mat3::Identity() * noise_.gyro_bias_walk * noise_.gyro_bias_walk * dt_;
  cov_.block<3, 3>(9, 9) = Mat3::Identity() * noise_.accel_bias_walk * noise_.accel_bias_walk * dt_;
}

Quat PreintegratedImu::delta_q(const Vec3& gyro_bias) const {
  return (dq_ * so3_exp(dq_dbg_ * (gyro_bias - bg0_))).normalized();
}

Vec3 PreintegratedImu::delta_v(const Vec3& accel_bias, const Vec3& gyro_bias) const {
  return dv_ + dv_dba_ * (accel_bias - ba0_) + dv_dbg_ * (gyro_bias - bg0_);
}

void PreintegratedImu::predict(const Quat& q_i, const Vec3& v_i, const Vec3& accel_bias,
                               const Vec3& gyro_bias, Quat& q_j, Vec3& v_j) const {
  q_j = (q_i * delta_q(gyro_bias)).normalized();
  v_j = v_i + gravity_vector() * dt_ + q_i * delta_v(accel_bias, gyro_bias);
}

}  // namespace radloc::rio
