#include "radloc/eval/match_stats.hpp"

#include <cmath>

namespace radloc::eval {

MatchStats match_stats(std::span<const MatchRecord> matches, std::span<const PoseStamped> gt) {
  MatchStats out;
  out.attempts = matches.size();
  for (const MatchRecord& m : matches) {
    if (!m.success) continue;
    ++out.successes;
    if (gt.empty()) continue;
    const PoseStamped truth = interpolate_pose(gt, m.t);
    out.x_error.push_back(std::abs(m.x - truth.p.x()));
    out.y_error.push_back(std::abs(m.y - truth.p.y()));
  }
  out.availability = out.attempts ? static_cast<double>(out.successes) / static_cast<double>(out.attempts) : 0.0;
  out.x_summary = summarize(out.x_error);
  out.y_summary = summarize(out.y_error);
  return out;
}

}  // namespace radloc::eval
