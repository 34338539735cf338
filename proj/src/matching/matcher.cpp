#include "radloc/matching/matcher.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <stdexcept>

namespace radloc::matching {

std::string to_string(MatchMode m) { return m == MatchMode::Full ? "full" : "tracking"; }

void MatcherParams::validate() const {
  full.validate();
  tracking.validate();
  icp.validate();
  if (!(inlier_distance > 0.0)) throw std::invalid_argument("match.inlier_distance must be positive");
  if (!(score_fraction > 0.0 && score_fraction <= 1.0)) throw std::invalid_argument("match.score_fraction must lie in (0, 1]");
  if (pyramid_levels < 1 || pyramid_levels > 12) throw std::invalid_argument("match.pyramid_levels must lie in [1, 12]");
  if (!(query_radius > 0.0)) throw std::invalid_argument("match.query_radius must be positive");
}

Matcher::Matcher(const mapping::GlobalMap& map, MatcherParams params) : map_(map), params_(params) {
  params_.validate();
}

std::vector<Vec2> Matcher::robot_frame_query(std::span<const Vec3> query_odom, const Pose2& robot_odom) const {
  const double res = map_.resolution();
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  const Pose2 inv = robot_odom.inverse();
  std::vector<Vec2> out;
  for (const Vec3& p : query_odom) {
    const auto key = std::make_pair(static_cast<std::int64_t>(std::floor(p.x() / res)),
                                    static_cast<std::int64_t>(std::floor(p.y() / res)));
    if (!seen.insert(key).second) continue;
    out.push_back(inv.apply(Vec2(p.x(), p.y())));
  }
  return out;
}

const Matcher::Index& Matcher::index_near(const Pose2& prior, double translation_range) {
  const Eigen::Vector2d c(prior.x, prior.y);
  const double radius = params_.query_radius + translation_range;
  std::vector<mapping::ChunkKey> keys = map_.chunk_keys_near(c, radius);
  if (index_.pyramid && keys == index_.chunks) return index_;
  // Reuse a larger cached neighbourhood when it already covers every chunk.
  if (index_.pyramid && std::includes(index_.chunks.begin(), index_.chunks.end(), keys.begin(), keys.end())) {
    return index_;
  }
  const std::vector<Vec3> pts3 = map_.chunks_near(c, radius);
  std::set<std::pair<std::int32_t, std::int32_t>> seen;
  std::vector<Vec2> pts;
  const double res = map_.resolution();
  for (const Vec3& p : pts3) {
    const auto key = std::make_pair(static_cast<std::int32_t>(std::floor(p.x() / res)),
                                    static_cast<std::int32_t>(std::floor(p.y() / res)));
    if (seen.insert(key).second) pts.emplace_back(p.x(), p.y());
  }
  index_.chunks = std::move(keys);
  index_.pyramid = std::make_unique<PyramidMap>(pts, res, params_.inlier_distance, params_.pyramid_levels);
  index_.nn = std::make_unique<NearestNeighbor2>(pts, params_.icp.correspondence_radius);
  return index_;
}

MatchResult Matcher::match(double t, std::span<const Vec3> query_odom, const Pose2& robot_odom,
                           const std::optional<Pose2>& prior) {
  const auto t0 = std::chrono::steady_clock::now();
  MatchResult r;
  r.t = t;
  r.mode = next_mode_;
  r.prior = prior ? *prior : correction_.compose(robot_odom);
  const SearchSpec& spec = r.mode == MatchMode::Full ? params_.full : params_.tracking;

  const auto finish = [&](MatchResult& out) {
    next_mode_ = out.success ? MatchMode::Tracking : MatchMode::Full;
    if (out.success) correction_ = out.pose.compose(robot_odom.inverse());
    if (params_.timing) {
      out.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
    return out;
  };

  const std::vector<Vec2> query = robot_frame_query(query_odom, robot_odom);
  r.query_points = static_cast<int>(query.size());
  r.pose = r.prior;
  if (map_.chunk_keys_near({r.prior.x, r.prior.y}, params_.query_radius).empty()) {
    r.available = false;
    return finish(r);
  }
  if (query.empty()) return finish(r);

  const Index& idx = index_near(r.prior, spec.translation_range);
  const SearchResult coarse = coarse_search(query, *idx.pyramid, spec, r.prior);
  r.level0_evaluations = coarse.level0_evaluations;
  r.evaluations = coarse.bound_evaluations;
  if (!coarse.ok()) return finish(r);

  const Candidate& best = coarse.candidates.front();
  r.pose = best.pose;
  r.score = score_alignment(query, *idx.pyramid, best.pose);
  const IcpResult icp = icp_refine(query, *idx.nn, best.pose, params_.icp);
  r.icp_ok = icp.ok;
  if (icp.ok) {
    const int s = score_alignment(query, *idx.pyramid, icp.pose);
    if (s >= r.score) {
      r.pose = icp.pose;
      r.score = s;
    }
  }
  r.pose.yaw = wrap_angle(r.pose.yaw);
  r.success = r.icp_ok && r.score >= params_.score_fraction * static_cast<double>(r.query_points);
  return finish(r);
}

}  // namespace radloc::matching
