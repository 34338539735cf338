#include "radloc/eval/drift.hpp"
#include "radloc/pipeline.hpp"
#include "radloc/rio/estimator.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

using namespace radloc;
using namespace radloc::rio;
namespace rt = radloc::testing;

namespace {

io::RunConfig noise_free(const std::string& scenario, double duration, double speed) {
  io::RunConfig cfg;
  cfg.scenario.name = scenario;
  cfg.scenario.duration = duration;
  cfg.scenario.speed = speed;
  cfg.scenario.radar_noise = false;
  cfg.scenario.radar_dropout = false;
  cfg.scenario.clutter_density = 0.0;
  cfg.scenario.dynamic_fraction = 0.0;
  cfg.scenario.imu_noise = sim::ImuNoise::none();
  return cfg;
}

std::vector<ImuMeasurement> gravity_only(double t0, double t1) {
  std::vector<ImuMeasurement> out;
  for (int i = 0; i <= 400 * (t1 - t0); ++i) out.push_back({t0 + i / 400.0, Vec3(0, 0, kGravity), Vec3::Zero()});
  return out;
}

}  // namespace

TEST(RioEstimator, StationaryWithNoisySensors) {
  io::RunConfig cfg;
  cfg.scenario.name = "stationary";
  cfg.scenario.duration = 30.0;
  const io::SensorLogData log = simulate_log(cfg);
  const RioRun run = run_rio(log, cfg);
  ASSERT_GT(run.odometry.size(), 100u);
  std::vector<double> speed;
  for (const auto& o : run.odometry) speed.push_back(o.v.norm());
  EXPECT_LT(rt::nearest_rank_oracle(speed, 95.0), 0.05);
  const double yaw_drift = wrap_angle(yaw_of(run.odometry.back().q) - yaw_of(run.odometry.front().q));
  EXPECT_LT(std::abs(yaw_drift), deg2rad(0.1));
}

TEST(RioEstimator, NoiseFreeStraightLineTracksTruth) {
  const io::RunConfig cfg = noise_free("line", 10.0, 1.0);
  const io::SensorLogData log = simulate_log(cfg);
  const RioRun run = run_rio(log, cfg);
  ASSERT_GT(run.odometry.size(), 50u);
  double worst = 0.0;
  for (const auto& o : run.odometry) {
    const PoseStamped g = eval::interpolate_pose(log.gt, o.t);
    worst = std::max(worst, (o.p - g.p).norm());
    EXPECT_FALSE(o.degraded);
  }
  EXPECT_LT(worst, 1e-3);
  EXPECT_GT((log.gt.back().p - log.gt.front().p).norm(), 9.9);
}

TEST(RioEstimator, AllDynamicScanIsDegradedAndImuOnly) {
  RioEstimator est(RioParams{}, {RigidTransform(Quat::Identity(), Vec3::Zero(), FrameId::imu(), FrameId::radar(0))});
  State x0;
  est.initialize(x0);
  const auto imu = gravity_only(0.0, 1.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RadarScan scan;
  scan.t = 0.1;
  scan.sensor = 0;
  for (int i = 0; i < 30; ++i) scan.detections.push_back({Vec3(20, 15 * u(rng), u(rng)), 8.0 * u(rng)});
  const OdometryOutput o = est.step(0.1, std::vector<RadarScan>{scan}, imu);
  EXPECT_TRUE(o.degraded);
  EXPECT_NE(o.diag.ransac, RansacStatus::Ok);
  EXPECT_EQ(o.diag.doppler_factors, 0);
  EXPECT_EQ(o.diag.landmark_factors, 0);
  // IMU-only propagation of a level, resting state.
  EXPECT_LT(o.v.norm(), 1e-9);
  EXPECT_LT(o.p.norm(), 1e-9);
  EXPECT_LT(quat_error_vec(o.q, Quat::Identity()).norm(), 1e-9);
}

TEST(RioEstimator, EmptyScanIsDegraded) {
  RioEstimator est(RioParams{}, {RigidTransform(Quat::Identity(), Vec3::Zero(), FrameId::imu(), FrameId::radar(0))});
  est.initialize(State{});
  const auto imu = gravity_only(0.0, 1.0);
  const OdometryOutput o = est.step(0.1, std::vector<RadarScan>{}, imu);
  EXPECT_TRUE(o.degraded);
  EXPECT_EQ(o.diag.ransac, RansacStatus::TooFewDetections);
}

TEST(RioEstimator, RejectsBadUsage) {
  RioEstimator est(RioParams{}, {RigidTransform(Quat::Identity(), Vec3::Zero(), FrameId::imu(), FrameId::radar(0))});
  const auto imu = gravity_only(0.0, 1.0);
  EXPECT_THROW(est.step(0.1, std::vector<RadarScan>{}, imu), std::logic_error);
  est.initialize(State{});
  EXPECT_THROW(est.step(0.0, std::vector<RadarScan>{}, imu), std::invalid_argument);
  RadarScan s;
  s.t = 0.1;
  s.sensor = 4;
  s.detections.push_back({Vec3(10, 0, 0), 0.0});
  EXPECT_THROW(est.step(0.1, std::vector<RadarScan>{s}, imu), std::invalid_argument);
  EXPECT_THROW(RioEstimator(RioParams{}, {}), std::invalid_argument);
}

TEST(RioEstimator, WindowStaysBounded) {
  const io::RunConfig cfg = noise_free("circle", 5.0, 2.0);
  const io::SensorLogData log = simulate_log(cfg);
  const RioRun run = run_rio(log, cfg);
  ASSERT_FALSE(run.odometry.empty());
  for (const auto& o : run.odometry) {
    EXPECT_LE(o.diag.window_factors, 1 + cfg.rio.window_size * (1 + cfg.rio.max_doppler_per_step +
                                                                 cfg.rio.max_landmark_factors_per_step));
  }
}

TEST(BootstrapState, LevelsFromSpecificForce) {
  std::vector<ImuMeasurement> imu;
  const Quat tilt = so3_exp(Vec3(0.05, -0.03, 0.0));
  for (int i = 0; i < 100; ++i) imu.push_back({0.01 * i, tilt.conjugate() * Vec3(0, 0, kGravity), Vec3::Zero()});
  const State x = bootstrap_state(0.99, imu, Vec3(1, 0, 0));
  EXPECT_NEAR(yaw_of(x.q), 0.0, 1e-12);
  EXPECT_LT(((x.q * (tilt.conjugate() * Vec3::UnitZ())) - Vec3::UnitZ()).norm(), 1e-9);
  EXPECT_LT((x.v - x.q * Vec3(1, 0, 0)).norm(), 1e-12);
}
