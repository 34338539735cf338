#pragma once

#include "radloc/mapping/global_map.hpp"
#include "radloc/matching/coarse_search.hpp"
#include "radloc/matching/icp.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace radloc::matching {

enum class MatchMode { Full, Tracking };
std::string to_string(MatchMode m);

struct MatcherParams {
  SearchSpec full = SearchSpec::full();
  SearchSpec tracking = SearchSpec::tracking();
  IcpParams icp;
  double inlier_distance = 0.3;  // m
  double score_fraction = 0.35;  // success threshold as a share of query points
  int pyramid_levels = 4;
  double query_radius = 28.3;    // m, reach of the query box from the robot
  bool timing = true;            // measure wall time into MatchResult::ms

  void validate() const;
};

struct MatchResult {
  double t = 0.0;
  bool success = false;
  bool available = true;  // false when no map chunk lies near the prior
  bool icp_ok = false;
  MatchMode mode = MatchMode::Full;
  Pose2 pose;             // robot pose in the map frame
  Pose2 prior;
  int score = 0;
  int query_points = 0;
  double ms = 0.0;
  std::int64_t level0_evaluations = 0;
  std::int64_t evaluations = 0;  // lattice scorings at every pyramid level
};

/// Registers query maps against a frozen global map. Single owner.
class Matcher {
 public:
  Matcher(const mapping::GlobalMap& map, MatcherParams params = {});

  /// match: `query_odom` are occupied query-map centers and `robot_odom` the
  /// robot pose, both in the odometry frame. The prior defaults to the last
  /// map-from-odometry correction applied to `robot_odom` (identity before
  /// the first success); `prior` overrides it.
  MatchResult match(double t, std::span<const Vec3> query_odom, const Pose2& robot_odom,
                    const std::optional<Pose2>& prior = std::nullopt);

  MatchMode next_mode() const { return next_mode_; }
  void force_mode(MatchMode m) { next_mode_ = m; }
  const Pose2& correction() const { return correction_; }
  /// Map-from-odometry transform used to form priors.
  void set_correction(const Pose2& c) { correction_ = c; }
  const MatcherParams& params() const { return params_; }

  /// Query points in the robot frame, one per occupied x-y cell.
  std::vector<Vec2> robot_frame_query(std::span<const Vec3> query_odom, const Pose2& robot_odom) const;

 private:
  struct Index {
    std::vector<mapping::ChunkKey> chunks;
    std::unique_ptr<PyramidMap> pyramid;
    std::unique_ptr<NearestNeighbor2> nn;
  };
  const Index& index_near(const Pose2& prior, double translation_range);

  const mapping::GlobalMap& map_;
  MatcherParams params_;
  MatchMode next_mode_ = MatchMode::Full;
  Pose2 correction_;
  Index index_;
};

}  // namespace radloc::matching
