#include "radloc/pipeline.hpp"

#include "radloc/eval/drift.hpp"
#include "radloc/mapping/query_map.hpp"

#include <chrono>
#include <sstream>

namespace radloc {

io::SensorLogData simulate_log(const io::RunConfig& cfg, sim::SensorLog* truth) {
  sim::ScenarioConfig sc = cfg.scenario;
  sc.seed = cfg.seed;
  sim::Scenario scenario = sim::make_scenario(sc);
  scenario.rig.imu_rate = cfg.rig.imu_rate;
  scenario.rig.radar_rate = cfg.rig.radar_rate;
  scenario.rig.radar_time_offset = cfg.rig.radar_time_offset;
  scenario.rig.radar = cfg.rig.radar;
  scenario.rig.imu_from_radar = cfg.rig.imu_from_radar;
  sim::SensorLog log = sim::simulate(scenario, sc);
  io::SensorLogData out;
  out.imu = log.imu;
  out.scans = log.scans;
  for (RadarScan& s : out.scans) s.truth.clear();
  out.gt.reserve(log.gt.size());
  for (const sim::TrajectorySample& s : log.gt) out.gt.push_back({s.t, s.p, s.q, s.v});
  if (truth) *truth = std::move(log);
  return out;
}

std::vector<PoseStamped> to_poses(const std::vector<io::OdometryRecord>& odom) {
  std::vector<PoseStamped> out;
  out.reserve(odom.size());
  for (const io::OdometryRecord& r : odom) out.push_back({r.t, r.p, r.q, r.v});
  return out;
}

std::vector<PoseStamped> to_poses(const std::vector<rio::OdometryOutput>& odom) {
  std::vector<PoseStamped> out;
  out.reserve(odom.size());
  for (const rio::OdometryOutput& r : odom) out.push_back({r.t, r.p, r.q, r.v});
  return out;
}

matching::Pose2 planar(const PoseStamped& p) { return {p.p.x(), p.p.y(), yaw_of(p.q)}; }

RioRun run_rio(const io::SensorLogData& log, const io::RunConfig& cfg, bool measure_time) {
  RioRun run;
  if (log.imu.size() < 2) return run;
  const std::vector<RigidTransform> ext = cfg.active_extrinsics();
  rio::RioEstimator est(cfg.active_rio(), ext);

  std::vector<std::vector<RadarScan>> steps = io::group_by_time(log.scans);
  if (cfg.ablation.single_sensor) {
    for (auto& g : steps) std::erase_if(g, [](const RadarScan& s) { return s.sensor != 0; });
  }
  const double t_first = log.imu.front().t;
  const double t_last = log.imu.back().t;

  for (const std::vector<RadarScan>& group : steps) {
    if (group.empty()) continue;
    const double t = group.front().t;
    if (t < t_first) continue;
    if (t > t_last) break;
    if (!est.initialized()) {
      rio::State x0;
      Vec3 p0 = Vec3::Zero();
      if (cfg.init_from_gt && !log.gt.empty() && t >= log.gt.front().t && t <= log.gt.back().t) {
        const PoseStamped g = eval::interpolate_pose(log.gt, t);
        x0.t = t;
        x0.q = g.q;
        x0.v = g.v;
        p0 = g.p;
      } else {
        const ImuMeasurement z = log.imu.size() > 1 && t > t_first
                                     ? rio::imu_window(log.imu, std::max(t_first, t - 0.01), t).back()
                                     : log.imu.front();
        const auto dets = est.compensate(group, z.w, Vec3::Zero());
        const rio::RansacResult rs = rio::ransac_velocity(dets, cfg.active_rio().ransac, cfg.seed);
        x0 = rio::bootstrap_state(t, log.imu, rs.ok() ? rs.velocity : Vec3::Zero());
      }
      est.initialize(x0, p0);
      rio::OdometryOutput o;
      o.t = t;
      o.q = x0.q;
      o.v = x0.v;
      o.p = p0;
      o.ba = x0.ba;
      o.bg = x0.bg;
      run.odometry.push_back(o);
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    run.odometry.push_back(est.step(t, group, log.imu));
    if (measure_time) {
      run.step_ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    }
  }
  return run;
}

mapping::GlobalMap build_map(const io::SensorLogData& log, const std::vector<PoseStamped>& gt,
                             const io::RunConfig& cfg, std::vector<std::string>* warnings) {
  mapping::OccupancyGrid grid(cfg.ogm);
  std::size_t skipped = 0;
  for (const RadarScan& s : log.scans) {
    if (gt.empty() || s.t < gt.front().t || s.t > gt.back().t) {
      ++skipped;
      continue;
    }
    if (s.sensor < 0 || s.sensor >= static_cast<int>(cfg.rig.imu_from_radar.size())) {
      throw std::invalid_argument("scan references unknown sensor " + std::to_string(s.sensor));
    }
    const PoseStamped p = eval::interpolate_pose(gt, s.t);
    const RigidTransform world_from_imu(p.q, p.p, FrameId::global(), FrameId::imu());
    const RigidTransform world_from_sensor = world_from_imu * cfg.rig.imu_from_radar[s.sensor];
    std::vector<Vec3> pts;
    pts.reserve(s.detections.size());
    for (const Detection& d : s.detections) pts.push_back(d.p);
    grid.insert_scan(world_from_sensor, pts);
  }
  if (skipped > 0 && warnings) {
    warnings->push_back(std::to_string(skipped) + " scan(s) outside the ground-truth time range were skipped");
  }
  return mapping::GlobalMap::from_grid(grid, cfg.chunk_cells);
}

std::vector<matching::MatchResult> run_localization(const mapping::GlobalMap& map,
                                                    const std::vector<io::OdometryRecord>& odom,
                                                    const io::SensorLogData& log, const io::RunConfig& cfg,
                                                    const std::optional<matching::Pose2>& initial_prior) {
  std::vector<matching::MatchResult> out;
  if (odom.size() < 2) return out;
  const std::vector<PoseStamped> track = to_poses(odom);
  mapping::OgmParams ogm = cfg.ogm;
  ogm.resolution = map.resolution();
  mapping::QueryMap qm(ogm, cfg.query);
  matching::MatcherParams mp = cfg.match;
  mp.timing = cfg.timing;
  matching::Matcher matcher(map, mp);

  const double t_begin = track.front().t;
  const double t_end = track.back().t;
  double next_attempt = t_begin + cfg.localize.warmup;
  bool first = true;
  for (const std::vector<RadarScan>& group : io::group_by_time(log.scans)) {
    const double t = group.front().t;
    if (t < t_begin) continue;
    if (t > t_end) break;
    const PoseStamped p = eval::interpolate_pose(track, t);
    const RigidTransform odom_from_imu(p.q, p.p, FrameId::global(), FrameId::imu());
    for (const RadarScan& s : group) {
      if (s.sensor < 0 || s.sensor >= static_cast<int>(cfg.rig.imu_from_radar.size())) continue;
      std::vector<Vec3> pts;
      pts.reserve(s.detections.size());
      for (const Detection& d : s.detections) pts.push_back(d.p);
      qm.insert_scan(odom_from_imu * cfg.rig.imu_from_radar[s.sensor], pts, p.p);
    }
    if (t + 1e-9 < next_attempt) continue;
    next_attempt = t + cfg.localize.interval;
    if (first && initial_prior) matcher.set_correction(initial_prior->compose(planar(p).inverse()));
    first = false;
    out.push_back(matcher.match(t, qm.cloud(), planar(p)));
  }
  return out;
}

}  // namespace radloc
