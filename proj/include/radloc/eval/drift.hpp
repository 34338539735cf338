#pragma once

#include "radloc/types.hpp"

#include <span>
#include <vector>

namespace radloc::eval {

/// Nearest-rank percentile (p in [0, 100]) of an unsorted sample. Returns 0
/// for an empty sample.
double nearest_rank(std::vector<double> values, double p);

struct Summary {
  double p50 = 0.0;
  double p90 = 0.0;
  double p95 = 0.0;
  double p99 = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

Summary summarize(const std::vector<double>& values);

struct DriftStats {
  double segment_length = 10.0;
  std::vector<double> translation;  // m/m, one per segment
  std::vector<double> heading;      // deg/m
  Summary translation_summary;
  Summary heading_summary;
  bool insufficient = false;  // ground truth shorter than one segment
};

/// Pose at time t by linear interpolation of position and slerp of the
/// orientation. Requires a time-sorted, non-empty track; clamps outside it.
PoseStamped interpolate_pose(std::span<const PoseStamped> track, double t);

/// segment_drift: cuts the ground truth into non-overlapping segments of
/// `segment_length` arc length (trailing remainder dropped) and compares
/// the estimated relative transform over each segment with the true one.
/// Segments not fully covered by the estimate are skipped.
DriftStats segment_drift(std::span<const PoseStamped> estimate, std::span<const PoseStamped> ground_truth,
                         double segment_length = 10.0);

}  // namespace radloc::eval
