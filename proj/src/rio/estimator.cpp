#include "radloc/rio/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace radloc::rio {
namespace {

std::uint64_t step_seed(std::uint64_t seed, std::uint64_t step) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (step + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Evenly spaced subset of [0, n) with at most `cap` entries, order preserved.
std::vector<int> thin(int n, int cap) {
  std::vector<int> out;
  if (n <= 0) return out;
  if (cap <= 0 || n <= cap) {
    out.resize(n);
    for (int i = 0; i < n; ++i) out[i] = i;
    return out;
  }
  out.reserve(cap);
  for (int k = 0; k < cap; ++k) out.push_back(static_cast<int>((static_cast<long long>(k) * n) / cap));
  return out;
}

bool finite_state(const State& x) {
  return x.v.allFinite() && x.q.coeffs().allFinite() && x.ba.allFinite() && x.bg.allFinite();
}

}  // namespace

RioEstimator::RioEstimator(RioParams params, std::vector<RigidTransform> imu_from_radar)
    : params_(params),
      extrinsics_(std::move(imu_from_radar)),
      window_(params.window, extrinsics_),
      tracker_(params.landmarks) {
  if (extrinsics_.empty()) throw std::invalid_argument("at least one radar extrinsic is required");
  if (params_.window_size < 2) throw std::invalid_argument("window size must be at least 2");
}

void RioEstimator::initialize(const State& x0, const Vec3& p0) {
  window_ = SlidingWindow(params_.window, extrinsics_);
  tracker_ = LandmarkTracker(params_.landmarks);
  Prior prior;
  prior.lin = x0;
  Vec12 sigma;
  sigma << Vec3::Constant(params_.init_sigma_vel), params_.init_sigma_tilt, params_.init_sigma_tilt,
      params_.init_sigma_yaw, Vec3::Constant(params_.init_sigma_accel_bias),
      Vec3::Constant(params_.init_sigma_gyro_bias);
  prior.H = sigma.array().square().inverse().matrix().asDiagonal();
  window_.set_prior(prior);
  WindowSlot slot;
  slot.x = x0;
  slot.t_OI = p0;
  window_.push(std::move(slot));
  step_count_ = 0;
  consecutive_failures_ = 0;
  initialized_ = true;
}

std::vector<CompensatedDetection> RioEstimator::compensate(std::span<const RadarScan> scans, const Vec3& omega,
                                                           const Vec3& gyro_bias) const {
  std::vector<CompensatedDetection> out;
  for (const RadarScan& scan : scans) {
    if (scan.sensor < 0 || scan.sensor >= static_cast<int>(extrinsics_.size())) {
      throw std::invalid_argument("scan references unknown sensor " + std::to_string(scan.sensor));
    }
    const RigidTransform& T = extrinsics_[scan.sensor];
    for (std::size_t i = 0; i < scan.detections.size(); ++i) {
      const Detection& d = scan.detections[i];
      if (!(d.p.norm() > 1e-6) || !d.p.allFinite() || !std::isfinite(d.rr)) continue;
      CompensatedDetection c = lever_arm_compensated_rr(d, T, omega, gyro_bias);
      c.sensor = scan.sensor;
      c.index = static_cast<int>(i);
      out.push_back(c);
    }
  }
  return out;
}

OdometryOutput RioEstimator::step(double t, std::span<const RadarScan> scans,
                                  std::span<const ImuMeasurement> imu) {
  if (!initialized_) throw std::logic_error("estimator not initialized");
  const WindowSlot& prev = window_.back();
  const double t_prev = prev.x.t;
  if (!(t > t_prev)) throw std::invalid_argument("radar timestep must advance");

  const std::vector<ImuMeasurement> samples = imu_window(imu, t_prev, t);
  PreintegratedImu pre(samples, prev.x.ba, prev.x.bg, params_.imu);

  State xj;
  xj.t = t;
  xj.ba = prev.x.ba;
  xj.bg = prev.x.bg;
  pre.predict(prev.x.q, prev.x.v, prev.x.ba, prev.x.bg, xj.q, xj.v);
  const Vec3 omega = samples.back().w;

  OdometryOutput out;
  StepDiagnostics& diag = out.diag;

  const std::vector<CompensatedDetection> dets = compensate(scans, omega, xj.bg);
  diag.detections = static_cast<int>(dets.size());
  std::vector<const Detection*> raw;
  raw.reserve(dets.size());
  {
    std::size_t k = 0;
    for (const RadarScan& scan : scans) {
      for (std::size_t i = 0; i < scan.detections.size() && k < dets.size(); ++i) {
        if (dets[k].sensor == scan.sensor && dets[k].index == static_cast<int>(i)) {
          raw.push_back(&scan.detections[i]);
          ++k;
        }
      }
    }
  }
  const RansacResult rs = ransac_velocity(dets, params_.ransac, step_seed(params_.seed, step_count_));
  diag.ransac = rs.status;
  diag.inliers = rs.inlier_count;

  WindowSlot slot;
  slot.degraded = !rs.ok();
  std::vector<int> inlier_ids;
  if (rs.ok()) {
    for (std::size_t i = 0; i < dets.size(); ++i) {
      if (rs.inliers[i]) inlier_ids.push_back(static_cast<int>(i));
    }
    xj.v = xj.q * rs.velocity;
    for (int k : thin(static_cast<int>(inlier_ids.size()), params_.max_doppler_per_step)) {
      const CompensatedDetection& c = dets[inlier_ids[k]];
      slot.doppler.push_back({*raw[inlier_ids[k]], c.sensor, omega});
    }
  }
  diag.doppler_factors = static_cast<int>(slot.doppler.size());

  const Vec3 t_pred = prev.t_OI + 0.5 * (prev.x.v + xj.v) * (t - t_prev);
  if (params_.heading_constraint && rs.ok()) {
    std::vector<Vec3> p_static;
    p_static.reserve(inlier_ids.size());
    for (int i : inlier_ids) p_static.push_back(dets[i].p_imu);
    const std::vector<ActiveMatch> active = tracker_.process(p_static, xj.q, t_pred, t);
    for (int k : thin(static_cast<int>(active.size()), params_.max_landmark_factors_per_step)) {
      const ActiveMatch& m = active[k];
      slot.landmarks.push_back({p_static[m.detection], m.p_landmark, t_pred});
    }
  } else if (params_.heading_constraint) {
    tracker_.prune(t);
  }
  diag.landmark_factors = static_cast<int>(slot.landmarks.size());
  diag.landmarks_tracked = static_cast<int>(tracker_.landmarks().size());

  slot.x = xj;
  slot.imu = std::move(pre);
  slot.t_OI = t_pred;
  window_.push(std::move(slot));

  // Re-integrate factors whose bias linearization point drifted too far.
  for (std::size_t j = 1; j < window_.size(); ++j) {
    WindowSlot& s = window_.slot(j);
    if (!s.imu) continue;
    const State& xi = window_.slot(j - 1).x;
    if ((xi.ba - s.imu->lin_accel_bias()).norm() > params_.bias_relin_threshold ||
        (xi.bg - s.imu->lin_gyro_bias()).norm() > params_.bias_relin_threshold) {
      s.imu->repropagate(xi.ba, xi.bg);
    }
  }

  const OptimizeReport rep = window_.optimize(params_.optimize);
  diag.iterations = rep.iterations;
  diag.rolled_back = rep.diverged;

  WindowSlot& cur = window_.back();
  const WindowSlot& before = window_.slot(window_.size() - 2);
  cur.t_OI = before.t_OI + 0.5 * (before.x.v + cur.x.v) * (t - t_prev);
  for (LandmarkFactor& f : cur.landmarks) f.t_OI = cur.t_OI;

  const bool bias_ok = cur.x.ba.norm() <= params_.max_accel_bias && cur.x.bg.norm() <= params_.max_gyro_bias;
  if (rep.diverged || !bias_ok || !finite_state(cur.x)) {
    ++consecutive_failures_;
  } else {
    consecutive_failures_ = 0;
  }
  if (!finite_state(cur.x) || consecutive_failures_ > params_.max_consecutive_failures) {
    throw EstimatorDiverged("estimator diverged at t=" + std::to_string(t));
  }

  while (static_cast<int>(window_.size()) > params_.window_size) {
    if (window_.marginalize_oldest().regularized) diag.prior_regularized = true;
  }
  diag.window_factors = window_.factor_count();
  ++step_count_;

  const WindowSlot& last = window_.back();
  out.t = t;
  out.q = last.x.q;
  out.v = last.x.v;
  out.p = last.t_OI;
  out.ba = last.x.ba;
  out.bg = last.x.bg;
  out.degraded = last.degraded;
  return out;
}

State bootstrap_state(double t, std::span<const ImuMeasurement> imu, const Vec3& velocity_imu) {
  Vec3 f = Vec3::Zero();
  int n = 0;
  for (const ImuMeasurement& m : imu) {
    if (m.t > t + 1e-9) break;
    if (m.t >= t - 0.25) {
      f += m.a;
      ++n;
    }
  }
  if (n == 0) {
    if (imu.empty()) throw std::invalid_argument("no IMU data for bootstrap");
    f = imu.front().a;
  } else {
    f /= n;
  }
  Quat q = Quat::FromTwoVectors(f, Vec3::UnitZ());
  q = (yaw_quat(-yaw_of(q)) * q).normalized();
  State x;
  x.t = t;
  x.q = q;
  x.v = q * velocity_imu;
  return x;
}

}  // namespace radloc::rio
