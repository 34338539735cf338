#include "radloc/io/jsonl.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>

namespace radloc::io {

using json = nlohmann::ordered_json;

DataError::DataError(const std::string& file, std::size_t line, const std::string& reason)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + reason), file_(file), line_(line) {}

namespace {

struct LineCtx {
  const std::string& file;
  std::size_t line;
  [[noreturn]] void fail(const std::string& why) const { throw DataError(file, line, why); }
};

double number(const json& j, const char* key, const LineCtx& ctx) {
  const auto it = j.find(key);
  if (it == j.end()) ctx.fail(std::string("missing field '") + key + "'");
  if (!it->is_number()) ctx.fail(std::string("field '") + key + "' is not a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) ctx.fail(std::string("field '") + key + "' is not finite");
  return v;
}

template <int N>
Eigen::Matrix<double, N, 1> vec(const json& j, const char* key, const LineCtx& ctx) {
  const auto it = j.find(key);
  if (it == j.end()) ctx.fail(std::string("missing field '") + key + "'");
  if (!it->is_array() || it->size() != N) {
    ctx.fail(std::string("field '") + key + "' must be an array of " + std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) {
    if (!(*it)[i].is_number()) ctx.fail(std::string("field '") + key + "' has a non-numeric entry");
    v[i] = (*it)[i].get<double>();
    if (!std::isfinite(v[i])) ctx.fail(std::string("field '") + key + "' has a non-finite entry");
  }
  return v;
}

Quat quat(const json& j, const char* key, const LineCtx& ctx) {
  const Eigen::Vector4d v = vec<4>(j, key, ctx);  // w, x, y, z
  if (std::abs(v.norm() - 1.0) > 1e-3) ctx.fail(std::string("field '") + key + "' is not a unit quaternion");
  return Quat(v[0], v[1], v[2], v[3]).normalized();
}

json arr(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
json arr(const Quat& q) { return json::array({q.w(), q.x(), q.y(), q.z()}); }

void for_each_record(const std::string& path, const std::function<void(const json&, const LineCtx&)>& fn) {
  std::ifstream is(path);
  if (!is) throw DataError(path, 0, "cannot open file");
  std::string text;
  std::size_t line = 0;
  while (std::getline(is, text)) {
    ++line;
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    const LineCtx ctx{path, line};
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      ctx.fail(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) ctx.fail("record is not a JSON object");
    fn(j, ctx);
  }
}

std::string type_of(const json& j, const LineCtx& ctx) {
  const auto it = j.find("type");
  if (it == j.end()) return {};
  if (!it->is_string()) ctx.fail("field 'type' is not a string");
  return it->get<std::string>();
}

}  // namespace

SensorLogData read_sensor_log(const std::string& path, bool negate_doppler) {
  SensorLogData log;
  double last_imu = -INFINITY, last_radar = -INFINITY, last_gt = -INFINITY;
  for_each_record(path, [&](const json& j, const LineCtx& ctx) {
    const std::string type = type_of(j, ctx);
    if (type == "imu") {
      ImuMeasurement m{number(j, "t", ctx), vec<3>(j, "a", ctx), vec<3>(j, "w", ctx)};
      if (!(m.t > last_imu)) ctx.fail("imu timestamps must be strictly increasing");
      last_imu = m.t;
      log.imu.push_back(m);
    } else if (type == "radar") {
      RadarScan s;
      s.t = number(j, "t", ctx);
      const double sensor = number(j, "sensor", ctx);
      if (sensor < 0 || sensor != std::floor(sensor)) ctx.fail("field 'sensor' must be a non-negative integer");
      s.sensor = static_cast<int>(sensor);
      if (s.t < last_radar) ctx.fail("radar timestamps must be non-decreasing");
      last_radar = s.t;
      const auto dets = j.find("detections");
      if (dets == j.end() || !dets->is_array()) ctx.fail("field 'detections' must be an array");
      for (const json& d : *dets) {
        if (!d.is_object()) ctx.fail("detection is not an object");
        Detection det{vec<3>(d, "p", ctx), number(d, "rr", ctx)};
        if (negate_doppler) det.rr = -det.rr;
        s.detections.push_back(det);
      }
      log.scans.push_back(std::move(s));
    } else if (type == "gt") {
      PoseStamped p{number(j, "t", ctx), vec<3>(j, "p", ctx), quat(j, "q", ctx), vec<3>(j, "v", ctx)};
      if (!(p.t > last_gt)) ctx.fail("gt timestamps must be strictly increasing");
      last_gt = p.t;
      log.gt.push_back(p);
    } else if (type.empty()) {
      ctx.fail("record has no 'type'");
    }
  });
  std::stable_sort(log.scans.begin(), log.scans.end(), [](const RadarScan& a, const RadarScan& b) {
    return a.t != b.t ? a.t < b.t : a.sensor < b.sensor;
  });
  return log;
}

void write_sensor_log(std::ostream& os, const SensorLogData& log) {
  // Merge the three streams by time; ties keep imu, radar, gt order.
  std::size_t i = 0, r = 0, g = 0;
  while (i < log.imu.size() || r < log.scans.size() || g < log.gt.size()) {
    const double ti = i < log.imu.size() ? log.imu[i].t : INFINITY;
    const double tr = r < log.scans.size() ? log.scans[r].t : INFINITY;
    const double tg = g < log.gt.size() ? log.gt[g].t : INFINITY;
    json j;
    if (ti <= tr && ti <= tg) {
      const ImuMeasurement& m = log.imu[i++];
      j = {{"type", "imu"}, {"t", m.t}, {"a", arr(m.a)}, {"w", arr(m.w)}};
    } else if (tr <= tg) {
      const RadarScan& s = log.scans[r++];
      json dets = json::array();
      for (const Detection& d : s.detections) dets.push_back({{"p", arr(d.p)}, {"rr", d.rr}});
      j = {{"type", "radar"}, {"t", s.t}, {"sensor", s.sensor}, {"detections", std::move(dets)}};
    } else {
      const PoseStamped& p = log.gt[g++];
      j = {{"type", "gt"}, {"t", p.t}, {"p", arr(p.p)}, {"q", arr(p.q)}, {"v", arr(p.v)}};
    }
    os << j.dump() << '\n';
  }
}

std::vector<PoseStamped> read_poses(const std::string& path) {
  std::vector<PoseStamped> out;
  for_each_record(path, [&](const json& j, const LineCtx& ctx) {
    const std::string type = type_of(j, ctx);
    if (!type.empty() && type != "gt") return;
    PoseStamped p{number(j, "t", ctx), vec<3>(j, "p", ctx), quat(j, "q", ctx), Vec3::Zero()};
    if (j.contains("v")) p.v = vec<3>(j, "v", ctx);
    if (!out.empty() && !(p.t > out.back().t)) ctx.fail("pose timestamps must be strictly increasing");
    out.push_back(p);
  });
  return out;
}

std::vector<OdometryRecord> read_odometry(const std::string& path) {
  std::vector<OdometryRecord> out;
  for_each_record(path, [&](const json& j, const LineCtx& ctx) {
    OdometryRecord r{number(j, "t", ctx), quat(j, "q", ctx), vec<3>(j, "v", ctx), vec<3>(j, "p", ctx), false};
    if (j.contains("degraded")) {
      if (!j["degraded"].is_boolean()) ctx.fail("field 'degraded' is not a boolean");
      r.degraded = j["degraded"].get<bool>();
    }
    if (!out.empty() && !(r.t > out.back().t)) ctx.fail("odometry timestamps must be strictly increasing");
    out.push_back(r);
  });
  return out;
}

void write_odometry(std::ostream& os, const OdometryRecord& r) {
  const json j = {{"t", r.t}, {"q", arr(r.q)}, {"v", arr(r.v)}, {"p", arr(r.p)}, {"degraded", r.degraded}};
  os << j.dump() << '\n';
}

OdometryRecord to_record(const rio::OdometryOutput& o) { return {o.t, o.q, o.v, o.p, o.degraded}; }

std::vector<eval::MatchRecord> read_matches(const std::string& path) {
  std::vector<eval::MatchRecord> out;
  for_each_record(path, [&](const json& j, const LineCtx& ctx) {
    eval::MatchRecord m;
    m.t = number(j, "t", ctx);
    const auto s = j.find("success");
    if (s == j.end() || !s->is_boolean()) ctx.fail("field 'success' must be a boolean");
    m.success = s->get<bool>();
    if (j.contains("mode")) {
      if (!j["mode"].is_string()) ctx.fail("field 'mode' is not a string");
      m.mode = j["mode"].get<std::string>();
    }
    m.x = number(j, "x", ctx);
    m.y = number(j, "y", ctx);
    m.yaw = number(j, "yaw", ctx);
    m.score = static_cast<int>(number(j, "score", ctx));
    if (j.contains("ms")) m.ms = number(j, "ms", ctx);
    out.push_back(m);
  });
  return out;
}

void write_match(std::ostream& os, const matching::MatchResult& r) {
  const json j = {{"t", r.t},          {"success", r.success}, {"mode", matching::to_string(r.mode)},
                  {"x", r.pose.x},     {"y", r.pose.y},        {"yaw", r.pose.yaw},
                  {"score", r.score},  {"ms", r.ms}};
  os << j.dump() << '\n';
}

std::vector<std::vector<RadarScan>> group_by_time(const std::vector<RadarScan>& scans) {
  std::vector<std::vector<RadarScan>> out;
  for (const RadarScan& s : scans) {
    if (out.empty() || out.back().front().t != s.t) out.emplace_back();
    out.back().push_back(s);
  }
  return out;
}

}  // namespace radloc::io
