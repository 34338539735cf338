#include "radloc/sim/radar_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace radloc::sim {

SensorRig SensorRig::default_rig() {
  SensorRig rig;
  const FrameId imu = FrameId::imu();
  rig.imu_from_radar = {
      RigidTransform(yaw_quat(deg2rad(35.0)), Vec3(0.6, 0.3, 0.5), imu, FrameId::radar(0)),
      RigidTransform(yaw_quat(deg2rad(-35.0)), Vec3(0.6, -0.3, 0.5), imu, FrameId::radar(1)),
      RigidTransform(yaw_quat(kPi), Vec3(-0.5, 0.0, 0.6), imu, FrameId::radar(2)),
  };
  return rig;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 over a combined word
  std::uint64_t z = a * 0x9E3779B97F4A7C15ULL + b + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

bool in_field_of_view(const Vec3& p, const RadarModel& m) {
  const double r = p.norm();
  if (!(r > 0.0) || r > m.max_range) return false;
  const double az = std::atan2(p.y(), p.x());
  const double el = std::asin(std::clamp(p.z() / r, -1.0, 1.0));
  return std::abs(az) <= m.azimuth_fov && std::abs(el) <= m.elevation_fov;
}

Vec3 sensor_velocity(const TrajectorySample& s, const RigidTransform& imu_from_radar) {
  const Vec3 v_imu = s.q.conjugate() * s.v;
  const Vec3 v_point = v_imu + s.omega.cross(imu_from_radar.translation);
  return imu_from_radar.rotation.conjugate() * v_point;
}

RadarScan sim_radar_scan(const TrajectorySample& state, const Scene& scene, const SensorRig& rig,
                         int sensor_id, std::uint64_t seed, const RadarSimOptions& opts) {
  const RigidTransform& T_IR = rig.imu_from_radar.at(sensor_id);
  const RadarModel& m = rig.radar;
  // Sensor pose in the global frame.
  const Quat q_OR = state.q * T_IR.rotation;
  const Vec3 p_OR = state.p + state.q * T_IR.translation;
  const Quat q_RO = q_OR.conjugate();
  const Vec3 v_R = sensor_velocity(state, T_IR);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  RadarScan scan;
  scan.t = state.t;
  scan.sensor = sensor_id;

  auto detection_probability = [&](double reflectivity, double r) {
    if (!opts.dropout) return 1.0;
    const double k = std::min(1.0, (m.detection_ref_range / r) * (m.detection_ref_range / r));
    return reflectivity * k;
  };

  auto emit = [&](const Vec3& p_true, const Vec3& rel_vel, DetectionSource src) {
    const double r = p_true.norm();
    const Vec3 ray = p_true / r;
    double rr = rel_vel.dot(ray);
    Vec3 p = p_true;
    if (opts.noise) {
      const double az = std::atan2(p_true.y(), p_true.x()) + m.azimuth_sigma * n01(rng);
      const double el = std::asin(p_true.z() / r) + m.elevation_sigma * n01(rng);
      const double rn = std::clamp(r + m.range_sigma * n01(rng), 1e-3, m.max_range);
      p = rn * Vec3(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
      rr += m.doppler_sigma * n01(rng);
    }
    scan.detections.push_back({p, rr});
    scan.truth.push_back(src);
  };

  for (const StaticTarget& tgt : scene.static_targets) {
    const Vec3 p = q_RO * (tgt.position - p_OR);
    if (!in_field_of_view(p, m)) continue;
    // Always draw so the random stream does not depend on the dropout flag.
    const double u = u01(rng);
    if (u >= detection_probability(tgt.reflectivity, p.norm())) continue;
    emit(p, v_R, DetectionSource::Static);
  }

  for (const DynamicObject& obj : scene.dynamic_objects) {
    if (state.t < obj.t_begin || state.t > obj.t_end) continue;
    const Vec3 p = q_RO * (obj.position(state.t) - p_OR);
    if (!in_field_of_view(p, m)) continue;
    const double u = u01(rng);
    if (u >= detection_probability(obj.reflectivity, p.norm())) continue;
    emit(p, v_R - q_RO * obj.velocity, DetectionSource::Dynamic);
  }

  if (scene.clutter_density > 0.0) {
    std::poisson_distribution<int> count_dist(scene.clutter_density);
    const int n = count_dist(rng);
    const double s_el = std::sin(m.elevation_fov);
    for (int i = 0; i < n; ++i) {
      const double r = m.max_range * std::cbrt(u01(rng));
      const double az = (2.0 * u01(rng) - 1.0) * m.azimuth_fov;
      const double el = std::asin((2.0 * u01(rng) - 1.0) * s_el);
      const double rr = m.doppler_min + (m.doppler_max - m.doppler_min) * u01(rng);
      if (!(r > 0.0)) continue;
      scan.detections.push_back(
          {r * Vec3(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)), rr});
      scan.truth.push_back(DetectionSource::Clutter);
    }
  }
  return scan;
}

}  // namespace radloc::sim
