#include "radloc/io/config.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace radloc::io {

using json = nlohmann::ordered_json;

namespace {

// One visitor walks the config for both directions so the key set is
// defined once.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "config root" : path_, "must be an object");
  }
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.contains(k)) fail(key(k), "unknown key");
    }
  }

  template <typename T>
  void field(const char* name, T& value) {
    seen_.insert(name);
    const auto it = j_.find(name);
    if (it == j_.end()) return;
    read(*it, key(name), value);
  }

  void section(const char* name, const std::function<void(Reader&)>& fn) {
    seen_.insert(name);
    const auto it = j_.find(name);
    if (it == j_.end()) return;
    Reader sub(*it, key(name));
    fn(sub);
  }

 private:
  [[noreturn]] static void fail(const std::string& k, const std::string& why) {
    throw ConfigError("config: '" + k + "' " + why);
  }
  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  static void read(const json& j, const std::string& k, double& v) {
    if (!j.is_number()) fail(k, "must be a number");
    v = j.get<double>();
  }
  static void read(const json& j, const std::string& k, int& v) {
    if (!j.is_number_integer()) fail(k, "must be an integer");
    v = j.get<int>();
  }
  static void read(const json& j, const std::string& k, std::uint64_t& v) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
      fail(k, "must be a non-negative integer");
    }
    v = j.get<std::uint64_t>();
  }
  static void read(const json& j, const std::string& k, bool& v) {
    if (!j.is_boolean()) fail(k, "must be a boolean");
    v = j.get<bool>();
  }
  static void read(const json& j, const std::string& k, std::string& v) {
    if (!j.is_string()) fail(k, "must be a string");
    v = j.get<std::string>();
  }
  static void read(const json& j, const std::string& k, Vec3& v) {
    if (!j.is_array() || j.size() != 3) fail(k, "must be an array of 3 numbers");
    for (int i = 0; i < 3; ++i) {
      if (!j[i].is_number()) fail(k, "must be an array of 3 numbers");
      v[i] = j[i].get<double>();
    }
  }
  static void read(const json& j, const std::string& k, std::vector<int>& v) {
    if (!j.is_array()) fail(k, "must be an array of integers");
    v.clear();
    for (const json& e : j) {
      if (!e.is_number_integer()) fail(k, "must be an array of integers");
      v.push_back(e.get<int>());
    }
  }
  static void read(const json& j, const std::string& k, std::vector<RigidTransform>& v) {
    if (!j.is_array() || j.empty()) fail(k, "must be a non-empty array of {translation, rotation}");
    v.clear();
    for (std::size_t s = 0; s < j.size(); ++s) {
      const std::string ks = k + "[" + std::to_string(s) + "]";
      const json& e = j[s];
      if (!e.is_object() || !e.contains("translation") || !e.contains("rotation")) {
        fail(ks, "must have 'translation' and 'rotation' ([w, x, y, z])");
      }
      for (const auto& [name, unused] : e.items()) {
        if (name != "translation" && name != "rotation") fail(ks + "." + name, "unknown key");
      }
      Vec3 t;
      read(e["translation"], ks + ".translation", t);
      const json& r = e["rotation"];
      if (!r.is_array() || r.size() != 4) fail(ks + ".rotation", "must be [w, x, y, z]");
      Eigen::Vector4d q;
      for (int i = 0; i < 4; ++i) {
        if (!r[i].is_number()) fail(ks + ".rotation", "must be [w, x, y, z]");
        q[i] = r[i].get<double>();
      }
      if (std::abs(q.norm() - 1.0) > 1e-6) fail(ks + ".rotation", "must be a unit quaternion");
      v.emplace_back(Quat(q[0], q[1], q[2], q[3]), t, FrameId::imu(), FrameId::radar(static_cast<int>(s)));
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

class Writer {
 public:
  explicit Writer(json& j) : j_(j) { j_ = json::object(); }

  template <typename T>
  void field(const char* name, T& value) {
    j_[name] = write(value);
  }
  void section(const char* name, const std::function<void(Writer&)>& fn) {
    json sub;
    Writer w(sub);
    fn(w);
    j_[name] = std::move(sub);
  }

 private:
  template <typename T>
  static json write(const T& v) {
    return v;
  }
  static json write(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
  static json write(const std::vector<RigidTransform>& v) {
    json a = json::array();
    for (const RigidTransform& T : v) {
      const Quat& q = T.rotation;
      a.push_back({{"translation", write(T.translation)}, {"rotation", json::array({q.w(), q.x(), q.y(), q.z()})}});
    }
    return a;
  }

  json& j_;
};

template <typename V>
void visit(V& v, RunConfig& c) {
  v.field("seed", c.seed);
  v.section("scenario", [&](V& s) {
    sim::ScenarioConfig& sc = c.scenario;
    s.field("name", sc.name);
    s.field("duration", sc.duration);
    s.field("world_seed", sc.world_seed);
    s.field("speed", sc.speed);
    s.field("clutter_density", sc.clutter_density);
    s.field("dynamic_fraction", sc.dynamic_fraction);
    s.field("landmark_density", sc.landmark_density);
    s.field("radar_noise", sc.radar_noise);
    s.field("radar_dropout", sc.radar_dropout);
    s.field("sensors", sc.sensors);
    s.section("imu_noise", [&](V& n) {
      n.field("accel_white", sc.imu_noise.accel_white);
      n.field("gyro_white", sc.imu_noise.gyro_white);
      n.field("accel_bias_walk", sc.imu_noise.accel_bias_walk);
      n.field("gyro_bias_walk", sc.imu_noise.gyro_bias_walk);
      n.field("accel_bias0", sc.imu_noise.accel_bias0);
      n.field("gyro_bias0", sc.imu_noise.gyro_bias0);
    });
  });
  v.section("rig", [&](V& r) {
    r.field("imu_rate", c.rig.imu_rate);
    r.field("radar_rate", c.rig.radar_rate);
    r.field("radar_time_offset", c.rig.radar_time_offset);
    r.field("imu_from_radar", c.rig.imu_from_radar);
    r.section("radar", [&](V& m) {
      sim::RadarModel& rm = c.rig.radar;
      m.field("max_range", rm.max_range);
      m.field("azimuth_fov", rm.azimuth_fov);
      m.field("elevation_fov", rm.elevation_fov);
      m.field("doppler_min", rm.doppler_min);
      m.field("doppler_max", rm.doppler_max);
      m.field("range_sigma", rm.range_sigma);
      m.field("azimuth_sigma", rm.azimuth_sigma);
      m.field("elevation_sigma", rm.elevation_sigma);
      m.field("doppler_sigma", rm.doppler_sigma);
      m.field("detection_ref_range", rm.detection_ref_range);
    });
  });
  v.section("rio", [&](V& r) {
    rio::RioParams& p = c.rio;
    r.field("window_size", p.window_size);
    r.field("heading_constraint", p.heading_constraint);
    r.field("max_doppler_per_step", p.max_doppler_per_step);
    r.field("max_landmark_factors_per_step", p.max_landmark_factors_per_step);
    r.field("bias_relin_threshold", p.bias_relin_threshold);
    r.field("max_accel_bias", p.max_accel_bias);
    r.field("max_gyro_bias", p.max_gyro_bias);
    r.field("max_consecutive_failures", p.max_consecutive_failures);
    r.field("init_sigma_vel", p.init_sigma_vel);
    r.field("init_sigma_tilt", p.init_sigma_tilt);
    r.field("init_sigma_yaw", p.init_sigma_yaw);
    r.field("init_sigma_accel_bias", p.init_sigma_accel_bias);
    r.field("init_sigma_gyro_bias", p.init_sigma_gyro_bias);
    r.field("init_from_gt", c.init_from_gt);
    r.section("ransac", [&](V& s) {
      s.field("iterations", p.ransac.iterations);
      s.field("inlier_threshold", p.ransac.inlier_threshold);
      s.field("min_inliers", p.ransac.min_inliers);
      s.field("min_abs_det", p.ransac.min_abs_det);
    });
    r.section("landmarks", [&](V& s) {
      s.field("bearing_weight", p.landmarks.bearing_weight);
      s.field("gate", p.landmarks.gate);
      s.field("n_obs_min", p.landmarks.n_obs_min);
      s.field("max_err_max", p.landmarks.max_err_max);
      s.field("staleness", p.landmarks.staleness);
      s.field("max_range", p.landmarks.max_range);
    });
    r.section("window", [&](V& s) {
      s.field("doppler_sigma", p.window.doppler_sigma);
      s.field("huber_k", p.window.huber_k);
      s.field("landmark_sigma", p.window.landmark_sigma);
      s.field("imu_cov_floor", p.window.imu_cov_floor);
      s.field("marginal_epsilon", p.window.marginal_epsilon);
    });
    r.section("optimize", [&](V& s) {
      s.field("max_iterations", p.optimize.max_iterations);
      s.field("initial_lambda", p.optimize.initial_lambda);
      s.field("convergence_tol", p.optimize.convergence_tol);
    });
    r.section("imu_noise", [&](V& s) {
      s.field("accel_white", p.imu.accel_white);
      s.field("gyro_white", p.imu.gyro_white);
      s.field("accel_bias_walk", p.imu.accel_bias_walk);
      s.field("gyro_bias_walk", p.imu.gyro_bias_walk);
    });
  });
  v.section("ogm", [&](V& s) {
    s.field("resolution", c.ogm.resolution);
    s.field("p_hit", c.ogm.p_hit);
    s.field("p_miss", c.ogm.p_miss);
    s.field("occupied_threshold", c.ogm.occupied_threshold);
    s.field("clamp_min", c.ogm.clamp_min);
    s.field("clamp_max", c.ogm.clamp_max);
    s.field("free_margin", c.ogm.free_margin);
    s.field("chunk_cells", c.chunk_cells);
  });
  v.section("query_map", [&](V& s) {
    s.field("box_size", c.query.box_size);
    s.field("z_extent", c.query.z_extent);
  });
  v.section("match", [&](V& s) {
    matching::MatcherParams& m = c.match;
    s.field("inlier_distance", m.inlier_distance);
    s.field("score_fraction", m.score_fraction);
    s.field("pyramid_levels", m.pyramid_levels);
    s.field("query_radius", m.query_radius);
    s.field("interval", c.localize.interval);
    s.field("warmup", c.localize.warmup);
    const auto spec = [&](const char* name, matching::SearchSpec& sp) {
      s.section(name, [&](V& q) {
        q.field("yaw_range", sp.yaw_range);
        q.field("translation_range", sp.translation_range);
        q.field("yaw_step", sp.yaw_step);
        q.field("levels", sp.levels);
        q.field("k", sp.k);
      });
    };
    spec("full", m.full);
    spec("tracking", m.tracking);
    s.section("icp", [&](V& q) {
      q.field("max_iterations", m.icp.max_iterations);
      q.field("correspondence_radius", m.icp.correspondence_radius);
      q.field("tolerance", m.icp.tolerance);
    });
  });
  v.section("ablation", [&](V& s) {
    s.field("single_sensor", c.ablation.single_sensor);
    s.field("disable_heading_constraint", c.ablation.disable_heading_constraint);
  });
  v.field("timing", c.timing);
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("config: '" + key + "' " + what);
}

}  // namespace

void RunConfig::validate() const {
  static const std::set<std::string> kScenarios = {"suburban_loop", "corridor", "stationary", "line", "circle", "figure8"};
  require(kScenarios.contains(scenario.name), "scenario.name", "is not a known scenario");
  require(scenario.duration >= 0.0, "scenario.duration", "must be non-negative");
  require(scenario.speed > 0.0, "scenario.speed", "must be positive");
  require(scenario.clutter_density >= 0.0, "scenario.clutter_density", "must be non-negative");
  require(scenario.dynamic_fraction >= 0.0 && scenario.dynamic_fraction < 1.0, "scenario.dynamic_fraction",
          "must lie in [0, 1)");
  require(scenario.landmark_density > 0.0, "scenario.landmark_density", "must be positive");
  for (int s : scenario.sensors) {
    require(s >= 0 && s < static_cast<int>(rig.imu_from_radar.size()), "scenario.sensors", "references an unknown sensor");
  }
  require(rig.imu_rate > 0.0 && rig.radar_rate > 0.0 && rig.radar_rate <= rig.imu_rate, "rig",
          "rates must be positive with radar_rate <= imu_rate");
  require(rig.radar_time_offset >= 0.0, "rig.radar_time_offset", "must be non-negative");
  require(!rig.imu_from_radar.empty(), "rig.imu_from_radar", "must list at least one sensor");
  require(rig.radar.max_range > 0.0, "rig.radar.max_range", "must be positive");
  require(rig.radar.azimuth_fov > 0.0 && rig.radar.azimuth_fov <= kPi, "rig.radar.azimuth_fov", "must lie in (0, pi]");
  require(rig.radar.elevation_fov > 0.0 && rig.radar.elevation_fov <= kPi / 2, "rig.radar.elevation_fov",
          "must lie in (0, pi/2]");
  require(rig.radar.doppler_min < rig.radar.doppler_max, "rig.radar.doppler_min", "must be below doppler_max");
  require(rig.radar.range_sigma >= 0.0 && rig.radar.azimuth_sigma >= 0.0 && rig.radar.elevation_sigma >= 0.0 &&
              rig.radar.doppler_sigma >= 0.0,
          "rig.radar", "noise sigmas must be non-negative");
  require(rig.radar.detection_ref_range > 0.0, "rig.radar.detection_ref_range", "must be positive");

  require(rio.window_size >= 2 && rio.window_size <= 200, "rio.window_size", "must lie in [2, 200]");
  require(rio.ransac.iterations >= 1, "rio.ransac.iterations", "must be positive");
  require(rio.ransac.inlier_threshold > 0.0, "rio.ransac.inlier_threshold", "must be positive");
  require(rio.ransac.min_inliers >= 3, "rio.ransac.min_inliers", "must be at least 3");
  require(rio.ransac.min_abs_det >= 0.0, "rio.ransac.min_abs_det", "must be non-negative");
  require(rio.landmarks.bearing_weight > 0.0, "rio.landmarks.bearing_weight", "must be positive");
  require(rio.landmarks.gate > 0.0, "rio.landmarks.gate", "must be positive");
  require(rio.landmarks.n_obs_min >= 0, "rio.landmarks.n_obs_min", "must be non-negative");
  require(rio.landmarks.max_err_max > 0.0, "rio.landmarks.max_err_max", "must be positive");
  require(rio.landmarks.staleness > 0.0, "rio.landmarks.staleness", "must be positive");
  require(rio.landmarks.max_range > 0.0, "rio.landmarks.max_range", "must be positive");
  require(rio.window.doppler_sigma > 0.0, "rio.window.doppler_sigma", "must be positive");
  require(rio.window.huber_k > 0.0, "rio.window.huber_k", "must be positive");
  require(rio.window.landmark_sigma > 0.0, "rio.window.landmark_sigma", "must be positive");
  require(rio.window.imu_cov_floor >= 0.0, "rio.window.imu_cov_floor", "must be non-negative");
  require(rio.window.marginal_epsilon > 0.0, "rio.window.marginal_epsilon", "must be positive");
  require(rio.optimize.max_iterations >= 1, "rio.optimize.max_iterations", "must be positive");
  require(rio.optimize.initial_lambda > 0.0, "rio.optimize.initial_lambda", "must be positive");
  require(rio.optimize.convergence_tol > 0.0, "rio.optimize.convergence_tol", "must be positive");
  require(rio.imu.accel_white > 0.0 && rio.imu.gyro_white > 0.0 && rio.imu.accel_bias_walk > 0.0 &&
              rio.imu.gyro_bias_walk > 0.0,
          "rio.imu_noise", "densities must be positive");
  require(rio.max_doppler_per_step >= 0, "rio.max_doppler_per_step", "must be non-negative (0 = no cap)");
  require(rio.max_landmark_factors_per_step >= 0, "rio.max_landmark_factors_per_step", "must be non-negative");
  require(rio.bias_relin_threshold > 0.0, "rio.bias_relin_threshold", "must be positive");
  require(rio.max_accel_bias > 0.0 && rio.max_gyro_bias > 0.0, "rio.max_*_bias", "must be positive");
  require(rio.max_consecutive_failures >= 0, "rio.max_consecutive_failures", "must be non-negative");
  require(rio.init_sigma_vel > 0.0 && rio.init_sigma_tilt > 0.0 && rio.init_sigma_yaw > 0.0 &&
              rio.init_sigma_accel_bias > 0.0 && rio.init_sigma_gyro_bias > 0.0,
          "rio.init_sigma_*", "must be positive");

  try {
    ogm.validate();
    query.validate();
    match.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  require(chunk_cells >= 1, "ogm.chunk_cells", "must be positive");
  require(localize.interval > 0.0, "match.interval", "must be positive");
  require(localize.warmup >= 0.0, "match.warmup", "must be non-negative");
}

std::vector<RigidTransform> RunConfig::active_extrinsics() const {
  if (ablation.single_sensor) return {rig.imu_from_radar.front()};
  return rig.imu_from_radar;
}

rio::RioParams RunConfig::active_rio() const {
  rio::RioParams p = rio;
  p.seed = seed;
  if (ablation.disable_heading_constraint) p.heading_constraint = false;
  return p;
}

RunConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  RunConfig c;
  {
    Reader r(j, "");
    visit(r, c);
  }
  c.scenario.seed = c.seed;
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return config_from_json_text(ss.str());
}

std::string config_to_json(const RunConfig& cfg) {
  RunConfig c = cfg;
  json j;
  Writer w(j);
  visit(w, c);
  return j.dump(2);
}

}  // namespace radloc::io
