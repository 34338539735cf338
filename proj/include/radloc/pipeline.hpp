#pragma once

#include "radloc/io/config.hpp"
#include "radloc/io/jsonl.hpp"
#include "radloc/mapping/global_map.hpp"
#include "radloc/matching/matcher.hpp"
#include "radloc/rio/estimator.hpp"
#include "radloc/sim/scenario.hpp"

#include <optional>
#include <string>
#include <vector>

namespace radloc {

/// Simulates the configured scenario. `truth`, when given, receives the
/// full simulator output (including per-detection provenance).
io::SensorLogData simulate_log(const io::RunConfig& cfg, sim::SensorLog* truth = nullptr);

struct RioRun {
  std::vector<rio::OdometryOutput> odometry;
  std::vector<double> step_ms;  // filled when timing is requested
};

/// Runs the estimator over a sensor log. The first radar timestep covered by
/// IMU data initializes the window (from ground truth when configured and
/// available, otherwise from accelerometer leveling and the first RANSAC
/// velocity). Throws rio::EstimatorDiverged.
RioRun run_rio(const io::SensorLogData& log, const io::RunConfig& cfg, bool measure_time = false);

/// Inserts every scan at its ground-truth pose into one grid and chunks the
/// occupied cells. Scans outside the trajectory time range are skipped with
/// a message appended to `warnings`.
mapping::GlobalMap build_map(const io::SensorLogData& log, const std::vector<PoseStamped>& gt,
                             const io::RunConfig& cfg, std::vector<std::string>* warnings = nullptr);

/// Odometry-frame query maps matched against `map` every `interval` seconds.
/// `initial_prior` (robot pose in the map frame) seeds the first Full match;
/// without it the odometry frame is assumed to coincide with the map frame.
std::vector<matching::MatchResult> run_localization(const mapping::GlobalMap& map,
                                                    const std::vector<io::OdometryRecord>& odom,
                                                    const io::SensorLogData& log, const io::RunConfig& cfg,
                                                    const std::optional<matching::Pose2>& initial_prior = {});

std::vector<PoseStamped> to_poses(const std::vector<io::OdometryRecord>& odom);
std::vector<PoseStamped> to_poses(const std::vector<rio::OdometryOutput>& odom);
matching::Pose2 planar(const PoseStamped& p);

}  // namespace radloc
