#pragma once

#include "radloc/eval/match_stats.hpp"
#include "radloc/matching/matcher.hpp"
#include "radloc/rio/estimator.hpp"
#include "radloc/types.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace radloc::io {

/// Malformed input. what() reads "<file>:<line>: <reason>".
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& file, std::size_t line, const std::string& reason);
  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

struct SensorLogData {
  std::vector<ImuMeasurement> imu;
  std::vector<RadarScan> scans;  // sorted by (t, sensor)
  std::vector<PoseStamped> gt;
};

/// Reads imu/radar/gt records; other record types are ignored. Records
/// within each stream must be time-ordered. `negate_doppler` flips the sign
/// of every range rate (for sensors reporting the opening speed).
SensorLogData read_sensor_log(const std::string& path, bool negate_doppler = false);
void write_sensor_log(std::ostream& os, const SensorLogData& log);

/// Poses from either gt records or odometry records.
std::vector<PoseStamped> read_poses(const std::string& path);

struct OdometryRecord {
  double t = 0.0;
  Quat q = Quat::Identity();
  Vec3 v = Vec3::Zero();
  Vec3 p = Vec3::Zero();
  bool degraded = false;
};

std::vector<OdometryRecord> read_odometry(const std::string& path);
void write_odometry(std::ostream& os, const OdometryRecord& rec);
OdometryRecord to_record(const rio::OdometryOutput& out);

std::vector<eval::MatchRecord> read_matches(const std::string& path);
void write_match(std::ostream& os, const matching::MatchResult& r);

/// Groups a time-sorted scan list into per-timestep batches.
std::vector<std::vector<RadarScan>> group_by_time(const std::vector<RadarScan>& scans);

}  // namespace radloc::io
