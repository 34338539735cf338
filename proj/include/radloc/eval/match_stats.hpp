#pragma once

#include "radloc/eval/drift.hpp"

#include <span>
#include <string>
#include <vector>

namespace radloc::eval {

/// One map-registration attempt as written by `localize`.
struct MatchRecord {
  double t = 0.0;
  bool success = false;
  std::string mode;
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  int score = 0;
  double ms = 0.0;
};

struct MatchStats {
  std::vector<double> x_error;  // |x - x_gt|, successful matches only
  std::vector<double> y_error;
  Summary x_summary;
  Summary y_summary;
  std::size_t attempts = 0;
  std::size_t successes = 0;
  double availability = 0.0;
};

MatchStats match_stats(std::span<const MatchRecord> matches, std::span<const PoseStamped> ground_truth);

}  // namespace radloc::eval
