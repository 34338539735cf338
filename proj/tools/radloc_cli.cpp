// radloc: simulate, estimate, map, localize and evaluate.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 estimator divergence.

#include "radloc/eval/drift.hpp"
#include "radloc/eval/match_stats.hpp"
#include "radloc/io/config.hpp"
#include "radloc/io/jsonl.hpp"
#include "radloc/pipeline.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace radloc;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kDiverged = 3 };

json summary_json(const eval::Summary& s, bool p90) {
  json j;
  j["p50"] = s.p50;
  if (p90) j["p90"] = s.p90;
  if (!p90) j["p95"] = s.p95;
  j["p99"] = s.p99;
  j["max"] = s.max;
  j["count"] = s.count;
  return j;
}

json drift_json(const eval::DriftStats& d) {
  json j;
  j["segment_length_m"] = d.segment_length;
  j["segments"] = d.translation.size();
  j["insufficient"] = d.insufficient;
  j["translation_m_per_m"] = summary_json(d.translation_summary, false);
  j["heading_deg_per_m"] = summary_json(d.heading_summary, false);
  return j;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

void print_drift_table(std::ostream& os, const std::vector<std::pair<std::string, eval::DriftStats>>& rows) {
  os << "configuration          | trans p50  p95     p99     max    (m/m) | head p50  p95     p99     max    (deg/m)\n";
  for (const auto& [name, d] : rows) {
    std::string n = name;
    n.resize(22, ' ');
    const auto& t = d.translation_summary;
    const auto& h = d.heading_summary;
    os << n << " | " << fmt("%.4f", t.p50) << "  " << fmt("%.4f", t.p95) << "  " << fmt("%.4f", t.p99) << "  "
       << fmt("%.4f", t.max) << "       | " << fmt("%.4f", h.p50) << "  " << fmt("%.4f", h.p95) << "  "
       << fmt("%.4f", h.p99) << "  " << fmt("%.4f", h.max) << "\n";
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  return os;
}

std::optional<matching::Pose2> parse_pose(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::stringstream ss(s);
  matching::Pose2 p;
  char c1 = 0, c2 = 0;
  if (!(ss >> p.x >> c1 >> p.y >> c2 >> p.yaw) || c1 != ',' || c2 != ',') {
    throw CLI::ValidationError("--initial-pose", "expected x,y,yaw");
  }
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radar-inertial odometry, mapping and map-matching toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool timing = false;
  app.add_option("-c,--config", config_path, "JSON run configuration (defaults apply for absent keys)");
  app.add_option("--seed", seed, "Override the configuration seed");
  app.add_flag("--timing", timing, "Record wall-clock times in outputs");

  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a sensor log for the configured scenario");
  std::string sim_out, scenario;
  double duration = -1.0;
  sim_cmd->add_option("--out", sim_out, "Output sensor log (JSONL)")->required();
  sim_cmd->add_option("--scenario", scenario, "Scenario name (overrides config)");
  sim_cmd->add_option("--duration", duration, "Duration in seconds (overrides config)");

  auto* rio_cmd = app.add_subcommand("rio", "Run radar-inertial odometry over a sensor log");
  std::string rio_log, rio_out, rio_stats;
  std::vector<std::string> ablate;
  bool negate = false;
  rio_cmd->add_option("--log", rio_log, "Sensor log (JSONL)")->required()->check(CLI::ExistingFile);
  rio_cmd->add_option("--out", rio_out, "Odometry output (JSONL)")->required();
  rio_cmd->add_option("--ablate", ablate, "Disable a component: heading | single-sensor")
      ->check(CLI::IsMember({"heading", "single-sensor"}));
  rio_cmd->add_option("--stats", rio_stats, "Drift statistics output (JSON), needs gt records in the log");
  rio_cmd->add_flag("--negate-doppler", negate, "Flip the sign of every range rate on input");

  auto* map_cmd = app.add_subcommand("build-map", "Build a chunked global map from logged scans and ground truth");
  std::string map_log, map_gt, map_out;
  map_cmd->add_option("--log", map_log, "Sensor log (JSONL)")->required()->check(CLI::ExistingFile);
  map_cmd->add_option("--gt", map_gt, "Ground-truth poses (JSONL)")->required()->check(CLI::ExistingFile);
  map_cmd->add_option("--out", map_out, "Map file (a .json sidecar is written next to it)")->required();

  auto* loc_cmd = app.add_subcommand("localize", "Match odometry query maps against a global map");
  std::string loc_map, loc_odom, loc_log, loc_out, init_pose;
  loc_cmd->add_option("--map", loc_map, "Map file")->required()->check(CLI::ExistingFile);
  loc_cmd->add_option("--odom", loc_odom, "Odometry (JSONL)")->required()->check(CLI::ExistingFile);
  loc_cmd->add_option("--log", loc_log, "Sensor log (JSONL)")->required()->check(CLI::ExistingFile);
  loc_cmd->add_option("--out", loc_out, "Match results (JSONL)")->required();
  loc_cmd->add_option("--initial-pose", init_pose, "Prior robot pose in the map frame: x,y,yaw");

  auto* drift_cmd = app.add_subcommand("eval-drift", "10 m segment drift statistics");
  std::string dr_odom, dr_gt, dr_out;
  double seg = 10.0;
  drift_cmd->add_option("--odom", dr_odom, "Odometry (JSONL)")->required()->check(CLI::ExistingFile);
  drift_cmd->add_option("--gt", dr_gt, "Ground truth (JSONL)")->required()->check(CLI::ExistingFile);
  drift_cmd->add_option("--out", dr_out, "Statistics (JSON)")->required();
  drift_cmd->add_option("--segment", seg, "Segment length in meters")->check(CLI::PositiveNumber);

  auto* em_cmd = app.add_subcommand("eval-match", "Map-matching error and availability statistics");
  std::string em_matches, em_gt, em_out;
  em_cmd->add_option("--matches", em_matches, "Match results (JSONL)")->required()->check(CLI::ExistingFile);
  em_cmd->add_option("--gt", em_gt, "Ground truth (JSONL)")->required()->check(CLI::ExistingFile);
  em_cmd->add_option("--out", em_out, "Statistics (JSON)")->required();

  auto* bench_cmd = app.add_subcommand("bench", "Wall-time statistics of rio_step and map matching");
  std::string b_log, b_map, b_out;
  bench_cmd->add_option("--log", b_log, "Sensor log (JSONL)")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--map", b_map, "Map file; enables match timing")->check(CLI::ExistingFile);
  bench_cmd->add_option("--out", b_out, "Statistics (JSON)");

  auto* cfg_cmd = app.add_subcommand("config", "Print the effective configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  io::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = io::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (!scenario.empty()) cfg.scenario.name = scenario;
    if (duration >= 0.0) cfg.scenario.duration = duration;
    if (timing) cfg.timing = true;
    for (const std::string& a : ablate) {
      if (a == "heading") cfg.ablation.disable_heading_constraint = true;
      if (a == "single-sensor") cfg.ablation.single_sensor = true;
    }
    cfg.scenario.seed = cfg.seed;
    cfg.validate();
  } catch (const io::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*cfg_cmd) {
      std::cout << io::config_to_json(cfg) << "\n";
    } else if (*sim_cmd) {
      const io::SensorLogData log = simulate_log(cfg);
      std::ofstream os = open_out(sim_out);
      io::write_sensor_log(os, log);
      std::cerr << "simulated " << log.imu.size() << " imu samples, " << log.scans.size() << " scans\n";
    } else if (*rio_cmd) {
      const io::SensorLogData log = io::read_sensor_log(rio_log, negate);
      const RioRun run = run_rio(log, cfg);
      {
        std::ofstream os = open_out(rio_out);
        for (const rio::OdometryOutput& o : run.odometry) io::write_odometry(os, io::to_record(o));
      }
      std::size_t degraded = 0;
      for (const auto& o : run.odometry) degraded += o.degraded ? 1 : 0;
      std::cerr << "odometry: " << run.odometry.size() << " steps, " << degraded << " degraded\n";
      if (!log.gt.empty()) {
        std::vector<std::pair<std::string, eval::DriftStats>> rows;
        const eval::DriftStats mine = eval::segment_drift(to_poses(run.odometry), log.gt);
        if (!ablate.empty()) {
          io::RunConfig base = cfg;
          base.ablation = {};
          rows.emplace_back("full system", eval::segment_drift(to_poses(run_rio(log, base).odometry), log.gt));
          std::string name = "without";
          for (const std::string& a : ablate) name += " " + a;
          rows.emplace_back(name, mine);
        } else {
          rows.emplace_back("full system", mine);
        }
        print_drift_table(std::cout, rows);
        if (!rio_stats.empty()) {
          json j = json::array();
          for (const auto& [name, d] : rows) {
            json r = drift_json(d);
            r["configuration"] = name;
            j.push_back(r);
          }
          write_text(rio_stats, j.dump(2) + "\n");
        }
      } else if (!rio_stats.empty()) {
        std::cerr << "no gt records in the log; --stats skipped\n";
      }
    } else if (*map_cmd) {
      const io::SensorLogData log = io::read_sensor_log(map_log);
      const std::vector<PoseStamped> gt = io::read_poses(map_gt);
      std::vector<std::string> warnings;
      const mapping::GlobalMap map = build_map(log, gt, cfg, &warnings);
      for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
      map.save(map_out);
      std::cerr << "map: " << map.point_count() << " occupied cells in " << map.chunks().size() << " chunks\n";
    } else if (*loc_cmd) {
      const mapping::GlobalMap map = mapping::GlobalMap::load(loc_map);
      const std::vector<io::OdometryRecord> odom = io::read_odometry(loc_odom);
      const io::SensorLogData log = io::read_sensor_log(loc_log);
      const auto results = run_localization(map, odom, log, cfg, parse_pose(init_pose));
      std::ofstream os = open_out(loc_out);
      std::size_t ok = 0;
      for (const matching::MatchResult& r : results) {
        io::write_match(os, r);
        ok += r.success ? 1 : 0;
      }
      std::cerr << "matches: " << ok << "/" << results.size() << " successful\n";
    } else if (*drift_cmd) {
      const std::vector<PoseStamped> est = io::read_poses(dr_odom);
      const std::vector<PoseStamped> gt = io::read_poses(dr_gt);
      const eval::DriftStats d = eval::segment_drift(est, gt, seg);
      print_drift_table(std::cout, {{"estimate", d}});
      if (d.insufficient) std::cerr << "warning: trajectory shorter than one segment\n";
      write_text(dr_out, drift_json(d).dump(2) + "\n");
    } else if (*em_cmd) {
      const std::vector<eval::MatchRecord> m = io::read_matches(em_matches);
      const std::vector<PoseStamped> gt = io::read_poses(em_gt);
      const eval::MatchStats s = eval::match_stats(m, gt);
      json j;
      j["attempts"] = s.attempts;
      j["successes"] = s.successes;
      j["availability"] = s.availability;
      j["x_error_m"] = summary_json(s.x_summary, true);
      j["y_error_m"] = summary_json(s.y_summary, true);
      std::cout << "availability " << fmt("%.3f", s.availability) << " (" << s.successes << "/" << s.attempts
                << ")  x p50 " << fmt("%.3f", s.x_summary.p50) << " p90 " << fmt("%.3f", s.x_summary.p90)
                << "  y p50 " << fmt("%.3f", s.y_summary.p50) << " p90 " << fmt("%.3f", s.y_summary.p90) << "\n";
      write_text(em_out, j.dump(2) + "\n");
    } else if (*bench_cmd) {
      const io::SensorLogData log = io::read_sensor_log(b_log);
      const RioRun run = run_rio(log, cfg, true);
      json j;
      const eval::Summary rs = eval::summarize(run.step_ms);
      double mean = 0.0;
      for (double v : run.step_ms) mean += v;
      mean = run.step_ms.empty() ? 0.0 : mean / static_cast<double>(run.step_ms.size());
      j["rio_step_ms"] = {{"mean", mean}, {"p50", rs.p50}, {"p95", rs.p95}, {"p99", rs.p99}, {"max", rs.max},
                          {"count", rs.count}};
      std::cout << "rio_step: mean " << fmt("%.3f", mean) << " ms  p95 " << fmt("%.3f", rs.p95) << " ms over "
                << rs.count << " steps\n";
      if (!b_map.empty()) {
        const mapping::GlobalMap map = mapping::GlobalMap::load(b_map);
        std::vector<io::OdometryRecord> odom;
        for (const auto& o : run.odometry) odom.push_back(io::to_record(o));
        io::RunConfig c = cfg;
        c.timing = true;
        const auto results = run_localization(map, odom, log, c);
        std::vector<double> full_ms, track_ms;
        for (const auto& r : results) (r.mode == matching::MatchMode::Full ? full_ms : track_ms).push_back(r.ms);
        for (const auto& [name, v] : {std::pair{"match_full_ms", full_ms}, std::pair{"match_tracking_ms", track_ms}}) {
          const eval::Summary s = eval::summarize(v);
          double m = 0.0;
          for (double x : v) m += x;
          m = v.empty() ? 0.0 : m / static_cast<double>(v.size());
          j[name] = {{"mean", m}, {"p50", s.p50}, {"p95", s.p95}, {"max", s.max}, {"count", s.count}};
          std::cout << name << ": mean " << fmt("%.2f", m) << " ms over " << s.count << " calls\n";
        }
      }
      if (!b_out.empty()) write_text(b_out, j.dump(2) + "\n");
    }
  } catch (const rio::EstimatorDiverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDiverged;
  } catch (const io::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kOk;
}
