#pragma once

#include "radloc/matching/pyramid.hpp"

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace radloc::matching {

struct IcpParams {
  int max_iterations = 30;
  double correspondence_radius = 1.0;  // m
  double tolerance = 1e-4;             // on residual change and step size

  void validate() const;
};

struct IcpResult {
  Pose2 pose;
  bool ok = false;
  int iterations = 0;
  int correspondences = 0;
  double mean_residual = 0.0;
  std::vector<double> residual_history;  // nonincreasing
};

/// Fixed-radius nearest neighbour lookup on a uniform hash grid.
class NearestNeighbor2 {
 public:
  NearestNeighbor2(std::span<const Vec2> points, double cell_size);

  /// Index of the closest point within `radius` (ties to the lower index), or -1.
  int nearest(const Vec2& p, double radius) const;
  const std::vector<Vec2>& points() const { return points_; }

 private:
  static std::int64_t key(std::int64_t cx, std::int64_t cy) { return (cx << 32) ^ (cy & 0xffffffffLL); }

  std::vector<Vec2> points_;
  double cell_;
  std::unordered_map<std::int64_t, std::vector<int>> buckets_;
};

/// Least-squares rigid transform mapping src[i] onto dst[i] (closed form).
Pose2 fit_rigid_2d(std::span<const Vec2> src, std::span<const Vec2> dst);

/// icp_refine: point-to-point ICP of `query` against the indexed target,
/// starting from `init`. ok == false when an iteration finds fewer than
/// three correspondences; pose is then the last accepted estimate.
IcpResult icp_refine(std::span<const Vec2> query, const NearestNeighbor2& target, const Pose2& init,
                     const IcpParams& params);

IcpResult icp_refine(std::span<const Vec2> query, std::span<const Vec2> target, const Pose2& init,
                     const IcpParams& params);

}  // namespace radloc::matching
