#include "radloc/sim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace radloc::sim {
namespace {

// Loop around a 150 m x 100 m block (about 500 m of road).
std::vector<Vec3> suburban_waypoints() {
  return {Vec3(0, 0, 0), Vec3(150, 0, 0), Vec3(150, 100, 0), Vec3(0, 100, 0)};
}

struct PathSampler {
  const Trajectory& traj;
  double duration;
  // Position and unit heading at a uniformly random time.
  std::pair<Vec3, Vec3> operator()(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> ut(0.0, duration);
    const TrajectorySample s = traj.at(ut(rng));
    Vec3 dir = s.q * Vec3::UnitX();
    return {s.p, dir};
  }
};

void add_roadside_scene(Scene& scene, const Trajectory& traj, double duration, double density,
                        std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  PathSampler sample{traj, std::max(duration, 1.0)};

  // Isolated scatterers (poles, trees, mailboxes, parked cars).
  const double path_len = std::max(40.0, std::get_if<Stationary>(&traj.spec()) ? 40.0 : duration * 2.0);
  const int n_points = static_cast<int>(density * 1.6 * path_len);
  for (int i = 0; i < n_points; ++i) {
    auto [p, dir] = sample(rng);
    const Vec3 left(-dir.y(), dir.x(), 0.0);
    const double side = u01(rng) < 0.5 ? -1.0 : 1.0;
    const double lateral = 3.0 + 27.0 * u01(rng);
    const double along = -10.0 + 20.0 * u01(rng);
    StaticTarget t;
    t.position = p + along * dir + side * lateral * left;
    t.position.z() = 0.3 + 2.5 * u01(rng);
    t.reflectivity = 0.4 + 0.6 * u01(rng);
    scene.static_targets.push_back(t);
  }

  // House fronts and fences: short wall segments parallel to the road.
  const int n_walls = static_cast<int>(density * path_len / 12.0);
  for (int i = 0; i < n_walls; ++i) {
    auto [p, dir] = sample(rng);
    const Vec3 left(-dir.y(), dir.x(), 0.0);
    const double side = u01(rng) < 0.5 ? -1.0 : 1.0;
    const double lateral = 8.0 + 8.0 * u01(rng);
    const double length = 6.0 + 8.0 * u01(rng);
    const double refl = 0.3 + 0.4 * u01(rng);
    for (double s = 0.0; s <= length; s += 1.0) {
      StaticTarget t;
      t.position = p + (s - 0.5 * length) * dir + side * lateral * left;
      t.position.z() = 0.8 + 1.2 * u01(rng);
      t.reflectivity = refl;
      scene.static_targets.push_back(t);
    }
  }
}

// Traffic and pedestrians spawned around the vehicle's planned position so
// the dynamic share of detections stays roughly constant along the route.
void add_traffic(Scene& scene, const Trajectory& traj, double duration, double fraction,
                 double density, std::mt19937_64& rng) {
  if (fraction <= 0.0) return;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  // Empirical: one 4-scatterer object alive per unit of rate*lifetime yields
  // roughly 1.9% of detections on the default scene.
  const double lifetime = 10.0;
  const double alive = std::max(0.0, fraction / (1.0 - fraction)) / 0.019 * std::sqrt(density);
  const double rate = alive / lifetime;
  const int n = static_cast<int>(std::ceil(rate * (duration + lifetime)));
  for (int i = 0; i < n; ++i) {
    const double t0 = -lifetime + (duration + lifetime) * u01(rng);
    const TrajectorySample s = traj.at(std::clamp(t0 + 0.5 * lifetime, 0.0, duration));
    const Vec3 dir = s.q * Vec3::UnitX();
    const Vec3 left(-dir.y(), dir.x(), 0.0);
    const double along = -25.0 + 50.0 * u01(rng);
    const double lateral = (u01(rng) < 0.5 ? -1.0 : 1.0) * (2.0 + 10.0 * u01(rng));
    const Vec3 center_mid = s.p + along * dir + lateral * left;
    const double heading = 2.0 * kPi * u01(rng);
    const double speed = 1.5 + 6.5 * u01(rng);
    const Vec3 vel = speed * Vec3(std::cos(heading), std::sin(heading), 0.0);
    const double t_mid = t0 + 0.5 * lifetime;
    for (int k = 0; k < 4; ++k) {
      DynamicObject obj;
      const Vec3 offset(2.0 * u01(rng) - 1.0, 2.0 * u01(rng) - 1.0, 0.3 + 1.2 * u01(rng));
      const Vec3 pos_mid = center_mid + offset;
      obj.position0 = pos_mid - t_mid * vel;
      obj.position0.z() = pos_mid.z();
      obj.velocity = vel;
      obj.reflectivity = 0.7 + 0.3 * u01(rng);
      obj.t_begin = t0;
      obj.t_end = t0 + lifetime;
      scene.dynamic_objects.push_back(obj);
    }
  }
}

void add_corridor(Scene& scene, double length, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (double x = -30.0; x <= length + 60.0; x += 0.25) {
    for (double side : {-6.0, 6.0}) {
      for (double z : {0.3, 0.9, 1.5}) {
        StaticTarget t;
        t.position = Vec3(x, side, z);
        t.reflectivity = 0.25 + 0.2 * u01(rng);
        scene.static_targets.push_back(t);
      }
    }
  }
  // Pillars along the walls.
  for (double x = -20.0; x <= length + 50.0; x += 7.5) {
    for (double side : {-4.5, 4.5}) {
      StaticTarget t;
      t.position = Vec3(x, side, 1.0);
      t.reflectivity = 1.0;
      scene.static_targets.push_back(t);
    }
  }
}

}  // namespace

ImuNoise ScenarioConfig::default_imu_noise() {
  ImuNoise n;
  n.accel_white = 2.5e-4 * kGravity * 4.0;
  n.gyro_white = deg2rad(0.005) * 4.0;
  n.accel_bias_walk = 1e-4;
  n.gyro_bias_walk = 2e-6;
  n.accel_bias0 = Vec3(0.02, -0.015, 0.03);
  n.gyro_bias0 = Vec3(0.0008, -0.0006, 0.002);
  return n;
}

Scenario make_scenario(const ScenarioConfig& cfg) {
  std::mt19937_64 rng(mix_seed(cfg.world_seed, 0x5CE4E));
  std::mt19937_64 traffic_rng(mix_seed(cfg.seed, 0x7AFF1C));
  TrajectorySpec spec;
  double duration = cfg.duration;
  const std::string& name = cfg.name;
  if (name == "suburban_loop") {
    spec = WaypointLoop{suburban_waypoints(), cfg.speed, 4.0};
  } else if (name == "corridor" || name == "line") {
    spec = Line{Vec3::Zero(), 0.0, cfg.speed};
  } else if (name == "stationary") {
    spec = Stationary{Vec3::Zero(), 0.0};
  } else if (name == "circle") {
    spec = Circle{Vec3(0, 20, 0), 20.0, cfg.speed, true};
  } else if (name == "figure8") {
    spec = FigureEight{Vec3::Zero(), 40.0, 2.0 * kPi * 40.0 * 1.3 / std::max(cfg.speed, 0.1)};
  } else {
    throw std::invalid_argument("unknown scenario '" + name + "'");
  }
  Trajectory traj(spec);
  if (duration <= 0.0) duration = traj.period() > 0.0 ? traj.period() : 30.0;

  Scenario sc{traj, Scene{}, SensorRig::default_rig(), duration};
  sc.scene.clutter_density = cfg.clutter_density;
  if (name == "corridor") {
    add_corridor(sc.scene, cfg.speed * duration, rng);
  } else {
    // Periodic routes get the same world whatever the mission length.
    add_roadside_scene(sc.scene, traj, traj.period() > 0.0 ? traj.period() : duration, cfg.landmark_density, rng);
  }
  add_traffic(sc.scene, traj, duration, cfg.dynamic_fraction, cfg.landmark_density, traffic_rng);
  return sc;
}

std::vector<double> radar_timestamps(const SensorRig& rig, double duration) {
  std::vector<double> ts;
  for (long k = 0;; ++k) {
    const double t = rig.radar_time_offset + static_cast<double>(k) / rig.radar_rate;
    if (t > duration) break;
    ts.push_back(t);
  }
  return ts;
}

SensorLog simulate(const Scenario& sc, const ScenarioConfig& cfg) {
  SensorLog log;
  log.gt = sc.trajectory.sample(sc.duration, sc.rig.imu_rate);
  log.imu = sim_imu(log.gt, cfg.imu_noise, mix_seed(cfg.seed, 0x1A0), &log.imu_bias);

  std::vector<int> sensors = cfg.sensors;
  if (sensors.empty()) {
    for (int s = 0; s < static_cast<int>(sc.rig.imu_from_radar.size()); ++s) sensors.push_back(s);
  }
  RadarSimOptions opts;
  opts.noise = cfg.radar_noise;
  opts.dropout = cfg.radar_dropout;
  const auto stamps = radar_timestamps(sc.rig, sc.duration);
  for (size_t k = 0; k < stamps.size(); ++k) {
    const TrajectorySample state = sc.trajectory.at(stamps[k]);
    for (int s : sensors) {
      const std::uint64_t seed = mix_seed(cfg.seed, (static_cast<std::uint64_t>(k) << 4) | s);
      log.scans.push_back(sim_radar_scan(state, sc.scene, sc.rig, s, seed, opts));
    }
  }
  return log;
}

}  // namespace radloc::sim
