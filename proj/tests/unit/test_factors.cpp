#include "radloc/rio/factors.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

using namespace radloc;
using namespace radloc::rio;
namespace rt = radloc::testing;

namespace {

RigidTransform mount(const Quat& q, const Vec3& t) { return {q, t, FrameId::imu(), FrameId::radar(0)}; }

Detection random_detection(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Detection d;
  d.p = Vec3(5 + 30 * std::abs(u(rng)), 20 * u(rng), 2 * u(rng));
  d.rr = 3 * u(rng);
  return d;
}

}  // namespace

TEST(LeverArm, NoRotationLeavesRangeRate) {
  const Detection d{Vec3(10, 2, 1), 1.3};
  const auto c = lever_arm_compensated_rr(d, mount(yaw_quat(0.4), Vec3(0.5, 0.2, 0.3)), Vec3::Zero(), Vec3::Zero());
  EXPECT_DOUBLE_EQ(c.rr_imu, 1.3);
  const Vec3 bg(0.01, -0.02, 0.3);
  EXPECT_NEAR(lever_arm_compensated_rr(d, mount(yaw_quat(0.4), Vec3(0.5, 0.2, 0.3)), bg, bg).rr_imu, 1.3, 1e-15);
}

TEST(LeverArm, ColocatedSensorUnaffected) {
  const Detection d{Vec3(10, 2, 1), -0.7};
  const auto c = lever_arm_compensated_rr(d, mount(yaw_quat(1.0), Vec3::Zero()), Vec3(0.3, -0.2, 1.0), Vec3::Zero());
  EXPECT_NEAR(c.rr_imu, -0.7, 1e-15);
}

TEST(LeverArm, MatchesRigidBodyPointVelocity) {
  // Sensor 0.5 m ahead, yawing at 1 rad/s, target on the sensor's +y axis.
  const Vec3 t(0.5, 0, 0);
  const Vec3 w(0, 0, 1);
  const Detection d{Vec3(0, 10, 0), 0.0};
  const auto c = lever_arm_compensated_rr(d, mount(Quat::Identity(), t), w, Vec3::Zero());
  const Vec3 v_point = w.cross(t);  // (0, 0.5, 0)
  EXPECT_NEAR(std::abs(c.rr_imu - d.rr), 0.5, 1e-12);
  EXPECT_NEAR(c.rr_imu, d.rr - v_point.dot(d.p.normalized()), 1e-12);
  EXPECT_LT((c.p_imu - (d.p + t)).norm(), 1e-12);
}

TEST(LeverArm, CompensatedRateIsImuVelocityProjection) {
  // For a static target rr = v_R . p_hat; after compensation rr_I = v_I . ray_I.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const RigidTransform T = mount(so3_exp(Vec3(0.1 * u(rng), 0.1 * u(rng), 3 * u(rng))), Vec3(u(rng), u(rng), u(rng)));
    const Vec3 v_I(5 * u(rng), u(rng), 0.2 * u(rng));
    const Vec3 w(0.3 * u(rng), 0.3 * u(rng), u(rng));
    Detection d = random_detection(rng);
    const Vec3 v_R = T.rotation.conjugate() * (v_I + w.cross(T.translation));
    d.rr = v_R.dot(d.p.normalized());
    const auto c = lever_arm_compensated_rr(d, T, w, Vec3::Zero());
    EXPECT_NEAR(c.rr_imu, v_I.dot(c.ray_imu), 1e-12);
  }
}

TEST(DopplerResidual, Examples) {
  const RigidTransform T = mount(Quat::Identity(), Vec3::Zero());
  State x;
  EXPECT_DOUBLE_EQ(doppler_residual(x, {Vec3(10, 3, 0), 0.0}, T, Vec3::Zero()), 0.0);
  x.bg = Vec3(0.1, 0.2, 0.3);
  EXPECT_NEAR(doppler_residual(x, {Vec3(10, 3, 0), 0.0}, mount(Quat::Identity(), Vec3(1, 1, 0)), x.bg), 0.0, 1e-15);
  x = State{};
  x.v = Vec3(1, 0, 0);
  EXPECT_NEAR(doppler_residual(x, {Vec3(10, 0, 0), 1.0}, T, Vec3::Zero()), 0.0, 1e-15);
  EXPECT_NEAR(doppler_residual(x, {Vec3(10, 0, 0), 0.9}, T, Vec3::Zero()), -0.1, 1e-12);
}

TEST(DopplerResidual, JacobianMatchesFiniteDifferences) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const State x = rt::random_state(rng);
    const RigidTransform T = mount(so3_exp(Vec3(0.1 * u(rng), 0.1 * u(rng), 3 * u(rng))), Vec3(u(rng), u(rng), u(rng)));
    const Detection d = random_detection(rng);
    const Vec3 w(0.3 * u(rng), 0.3 * u(rng), u(rng));
    DopplerJacobian J;
    doppler_residual(x, d, T, w, &J);
    Eigen::MatrixXd Ja = Eigen::MatrixXd::Zero(1, 12);
    Ja.block<1, 3>(0, kVel) = J.d_v;
    Ja.block<1, 3>(0, kRot) = J.d_theta;
    Ja.block<1, 3>(0, kGyroBias) = J.d_bg;
    const auto f = [&](const State& s) {
      Eigen::VectorXd r(1);
      r[0] = doppler_residual(s, d, T, w);
      return r;
    };
    EXPECT_LT(rt::relative_error(Ja, rt::numeric_state_jacobian(f, x)), 1e-5);
  }
}

TEST(ImuResidual, JacobiansMatchFiniteDifferences) {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 100; ++i) {
    const rt::Excitation e = rt::Excitation::random(rng);
    const State xi0 = rt::random_state(rng);
    const PreintegratedImu pre(e.sample(0.0, 0.05, 200.0), xi0.ba, xi0.bg, ImuNoiseParams{});
    // Linearize away from the preintegration biases and off the propagated state.
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec12 d;
    for (int k = 0; k < 12; ++k) d[k] = 0.01 * u(rng);
    const State xi = xi0.boxplus(d);
    State xj = xi;
    pre.predict(xi.q, xi.v, xi.ba, xi.bg, xj.q, xj.v);
    for (int k = 0; k < 12; ++k) d[k] = 0.02 * u(rng);
    xj = xj.boxplus(d);

    ImuJacobian J;
    imu_residual(xi, xj, pre, &J);
    const auto fi = [&](const State& s) { return Eigen::VectorXd(imu_residual(s, xj, pre)); };
    const auto fj = [&](const State& s) { return Eigen::VectorXd(imu_residual(xi, s, pre)); };
    EXPECT_LT(rt::relative_error(J.d_i, rt::numeric_state_jacobian(fi, xi)), 1e-5) << i;
    EXPECT_LT(rt::relative_error(J.d_j, rt::numeric_state_jacobian(fj, xj)), 1e-5) << i;
  }
}

TEST(PolarDistance, Examples) {
  EXPECT_DOUBLE_EQ(polar_distance(Vec3(3, 4, 0), Vec3(3, 4, 0), 5.0), 0.0);
  EXPECT_NEAR(polar_distance(Vec3(1, 0, 0), Vec3(0, 1, 0), 1.0), kPi / 2, 1e-12);
  for (double L : {0.1, 1.0, 7.0}) EXPECT_NEAR(polar_distance(Vec3(2, 0, 0), Vec3(1, 0, 0), L), 1.0, 1e-12);
  EXPECT_THROW(polar_distance(Vec3(0, 0, 1), Vec3(1, 0, 0), 1.0), InvalidBearing);
}

TEST(PolarDistance, BearingDifferenceIsWrapped) {
  // Bearings +179 and -179 degrees are 2 degrees apart.
  const Vec3 a(std::cos(deg2rad(179.0)), std::sin(deg2rad(179.0)), 0);
  const Vec3 b(std::cos(deg2rad(-179.0)), std::sin(deg2rad(-179.0)), 0);
  EXPECT_NEAR(polar_distance(a, b, 1.0), deg2rad(2.0), 1e-9);
}

TEST(LandmarkResidual, ZeroAtExactPose) {
  std::mt19937_64 rng(44);
  for (int i = 0; i < 50; ++i) {
    const State x = rt::random_state(rng);
    const Vec3 t_OI(10, -3, 0.2);
    const Vec3 p_l(40, 12, 1.0);
    const Vec3 p_det = x.q.conjugate() * (p_l - t_OI);
    const auto e = landmark_residual(x, p_det, p_l, t_OI);
    ASSERT_TRUE(e.has_value());
    EXPECT_NEAR(*e, 0.0, 1e-12);
  }
}

TEST(LandmarkResidual, YawPerturbationShowsUp) {
  State x;
  const Vec3 p_l(50, 0, 0);
  const Vec3 p_det(50, 0, 0);
  x.q = yaw_quat(0.01);
  const auto e = landmark_residual(x, p_det, p_l, Vec3::Zero());
  ASSERT_TRUE(e.has_value());
  EXPECT_NEAR(std::abs(*e), 0.01, 0.05 * 0.01);
}

TEST(LandmarkResidual, DegenerateBearingSkipped) {
  State x;
  EXPECT_FALSE(landmark_residual(x, Vec3(0, 0, 2), Vec3(10, 0, 0), Vec3::Zero()).has_value());
  EXPECT_FALSE(landmark_residual(x, Vec3(10, 0, 0), Vec3(3, 4, 5), Vec3(3, 4, 0)).has_value());
}

TEST(LandmarkResidual, JacobianMatchesFiniteDifferencesAndIgnoresVelocity) {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const State x = rt::random_state(rng);
    const Vec3 t_OI(20 * u(rng), 20 * u(rng), u(rng));
    const Vec3 p_l = t_OI + Vec3(30 * u(rng), 30 * u(rng), u(rng));
    const Vec3 p_det = x.q.conjugate() * (p_l - t_OI) + 0.2 * Vec3(u(rng), u(rng), u(rng));
    Row3 J;
    ASSERT_TRUE(landmark_residual(x, p_det, p_l, t_OI, &J).has_value());
    Eigen::MatrixXd Ja = Eigen::MatrixXd::Zero(1, 12);
    Ja.block<1, 3>(0, kRot) = J;
    const auto f = [&](const State& s) {
      Eigen::VectorXd r(1);
      r[0] = *landmark_residual(s, p_det, p_l, t_OI);
      return r;
    };
    const Eigen::MatrixXd Jn = rt::numeric_state_jacobian(f, x);
    EXPECT_LT(rt::relative_error(Ja, Jn), 1e-5);
    EXPECT_LT((Jn.block<1, 3>(0, kVel).norm()), 1e-12);
    EXPECT_LT((Jn.block<1, 6>(0, kAccBias).norm()), 1e-12);
  }
}
