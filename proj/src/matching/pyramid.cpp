#include "radloc/matching/pyramid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace radloc::matching {

Vec2 Pose2::apply(const Vec2& p) const {
  const double c = std::cos(yaw), s = std::sin(yaw);
  return {c * p.x() - s * p.y() + x, s * p.x() + c * p.y() + y};
}

Pose2 Pose2::compose(const Pose2& o) const {
  const Vec2 t = apply({o.x, o.y});
  return {t.x(), t.y(), wrap_angle(yaw + o.yaw)};
}

Pose2 Pose2::inverse() const {
  const double c = std::cos(yaw), s = std::sin(yaw);
  return {-(c * x + s * y), -(-s * x + c * y), wrap_angle(-yaw)};
}

std::vector<Vec2> project_xy(std::span<const Vec3> points) {
  std::vector<Vec2> out;
  out.reserve(points.size());
  for (const Vec3& p : points) out.emplace_back(p.x(), p.y());
  return out;
}

PyramidMap::PyramidMap(std::span<const Vec2> map_points, double resolution, double inlier_distance, int levels)
    : points_(map_points.begin(), map_points.end()), resolution_(resolution), inlier_distance_(inlier_distance) {
  if (!(resolution > 0.0)) throw std::invalid_argument("pyramid resolution must be positive");
  if (!(inlier_distance >= 0.0)) throw std::invalid_argument("inlier distance must be non-negative");
  if (levels < 1) throw std::invalid_argument("pyramid needs at least one level");
  if (points_.empty()) {
    min_ = Cell2::Zero();
    grids_.assign(levels, {});
    return;
  }
  Vec2 lo = points_.front(), hi = points_.front();
  for (const Vec2& p : points_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const int pad = static_cast<int>(std::ceil(inlier_distance / resolution)) + 1;
  min_ = Cell2(static_cast<int>(std::floor(lo.x() / resolution)) - pad - (1 << (levels - 1)),
               static_cast<int>(std::floor(lo.y() / resolution)) - pad - (1 << (levels - 1)));
  const Cell2 max(static_cast<int>(std::floor(hi.x() / resolution)) + pad,
                  static_cast<int>(std::floor(hi.y() / resolution)) + pad);
  width_ = max.x() - min_.x() + 1;
  height_ = max.y() - min_.y() + 1;

  std::vector<std::uint8_t> base(static_cast<std::size_t>(width_) * height_, 0);
  const double d2 = inlier_distance * inlier_distance;
  for (const Vec2& p : points_) {
    const Cell2 c = cell_of(p);
    for (int dy = -pad; dy <= pad; ++dy) {
      for (int dx = -pad; dx <= pad; ++dx) {
        const Cell2 n(c.x() + dx, c.y() + dy);
        if ((cell_center(n) - p).squaredNorm() > d2) continue;
        base[static_cast<std::size_t>(n.y() - min_.y()) * width_ + (n.x() - min_.x())] = 1;
      }
    }
  }
  grids_.push_back(std::move(base));
  for (int n = 1; n < levels; ++n) {
    const std::vector<std::uint8_t>& prev = grids_.back();
    const int h = 1 << (n - 1);
    std::vector<std::uint8_t> next(prev.size(), 0);
    for (int iy = 0; iy < height_; ++iy) {
      for (int ix = 0; ix < width_; ++ix) {
        std::uint8_t v = prev[static_cast<std::size_t>(iy) * width_ + ix];
        if (ix + h < width_) v |= prev[static_cast<std::size_t>(iy) * width_ + ix + h];
        if (iy + h < height_) v |= prev[static_cast<std::size_t>(iy + h) * width_ + ix];
        if (ix + h < width_ && iy + h < height_) v |= prev[static_cast<std::size_t>(iy + h) * width_ + ix + h];
        next[static_cast<std::size_t>(iy) * width_ + ix] = v;
      }
    }
    grids_.push_back(std::move(next));
  }
}

Cell2 PyramidMap::cell_of(const Vec2& p) const {
  return {static_cast<int>(std::floor(p.x() / resolution_)), static_cast<int>(std::floor(p.y() / resolution_))};
}

Vec2 PyramidMap::cell_center(const Cell2& c) const {
  return {(c.x() + 0.5) * resolution_, (c.y() + 0.5) * resolution_};
}

int score_alignment(std::span<const Vec2> query, const PyramidMap& map, const Pose2& T) {
  int n = 0;
  for (const Vec2& p : query) n += map.near(T.apply(p)) ? 1 : 0;
  return n;
}

}  // namespace radloc::matching
