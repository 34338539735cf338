#pragma once

#include "radloc/geometry.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace radloc::matching {

using Vec2 = Eigen::Vector2d;
using Cell2 = Eigen::Vector2i;

/// Planar rigid transform: p -> R(yaw) p + (x, y).
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;

  Vec2 apply(const Vec2& p) const;
  Pose2 compose(const Pose2& o) const;  // this * o
  Pose2 inverse() const;
};

/// Projects 3D points to the x-y plane.
std::vector<Vec2> project_xy(std::span<const Vec3> points);

/// Multiresolution occupancy lookup over a global point cloud. Level 0 marks
/// every cell whose center lies within the inlier distance of a map point;
/// level n marks a cell when any level-0 cell in the 2^n x 2^n block starting
/// at it is marked, so a level-n lookup bounds every level-0 lookup it covers.
class PyramidMap {
 public:
  PyramidMap(std::span<const Vec2> map_points, double resolution, double inlier_distance, int levels);

  int levels() const { return static_cast<int>(grids_.size()); }
  double resolution() const { return resolution_; }
  double inlier_distance() const { return inlier_distance_; }
  const std::vector<Vec2>& points() const { return points_; }

  Cell2 cell_of(const Vec2& p) const;
  Vec2 cell_center(const Cell2& c) const;

  bool marked(int level, int cx, int cy) const {
    const int ix = cx - min_.x();
    const int iy = cy - min_.y();
    if (ix < 0 || iy < 0 || ix >= width_ || iy >= height_) return false;
    return grids_[level][static_cast<std::size_t>(iy) * width_ + ix] != 0;
  }
  /// Level-0 predicate at a continuous point.
  bool near(const Vec2& p) const {
    const Cell2 c = cell_of(p);
    return marked(0, c.x(), c.y());
  }

 private:
  std::vector<Vec2> points_;
  double resolution_;
  double inlier_distance_;
  Cell2 min_;
  int width_ = 0;
  int height_ = 0;
  std::vector<std::vector<std::uint8_t>> grids_;
};

/// score_alignment: number of query points that land within the inlier
/// distance of the map after applying T.
int score_alignment(std::span<const Vec2> query, const PyramidMap& map, const Pose2& T);

}  // namespace radloc::matching
