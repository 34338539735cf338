#include "radloc/matching/icp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace radloc::matching {

void IcpParams::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("icp.max_iterations must be positive");
  if (!(correspondence_radius > 0.0)) throw std::invalid_argument("icp.correspondence_radius must be positive");
  if (!(tolerance > 0.0)) throw std::invalid_argument("icp.tolerance must be positive");
}

NearestNeighbor2::NearestNeighbor2(std::span<const Vec2> points, double cell_size)
    : points_(points.begin(), points.end()), cell_(cell_size) {
  if (!(cell_size > 0.0)) throw std::invalid_argument("cell size must be positive");
  for (int i = 0; i < static_cast<int>(points_.size()); ++i) {
    const auto cx = static_cast<std::int64_t>(std::floor(points_[i].x() / cell_));
    const auto cy = static_cast<std::int64_t>(std::floor(points_[i].y() / cell_));
    buckets_[key(cx, cy)].push_back(i);
  }
}

int NearestNeighbor2::nearest(const Vec2& p, double radius) const {
  const auto cx = static_cast<std::int64_t>(std::floor(p.x() / cell_));
  const auto cy = static_cast<std::int64_t>(std::floor(p.y() / cell_));
  const auto reach = static_cast<std::int64_t>(std::ceil(radius / cell_));
  int best = -1;
  double best_d2 = radius * radius;
  for (std::int64_t dx = -reach; dx <= reach; ++dx) {
    for (std::int64_t dy = -reach; dy <= reach; ++dy) {
      const auto it = buckets_.find(key(cx + dx, cy + dy));
      if (it == buckets_.end()) continue;
      for (int i : it->second) {
        const double d2 = (points_[i] - p).squaredNorm();
        if (d2 < best_d2 || (d2 == best_d2 && (best < 0 || i < best))) {
          best_d2 = d2;
          best = i;
        }
      }
    }
  }
  return best;
}

Pose2 fit_rigid_2d(std::span<const Vec2> src, std::span<const Vec2> dst) {
  if (src.size() != dst.size() || src.empty()) throw std::invalid_argument("fit needs matched, non-empty sets");
  Vec2 cs = Vec2::Zero(), cd = Vec2::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    cs += src[i];
    cd += dst[i];
  }
  cs /= static_cast<double>(src.size());
  cd /= static_cast<double>(dst.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Vec2 a = src[i] - cs;
    const Vec2 b = dst[i] - cd;
    sxx += a.x() * b.x() + a.y() * b.y();
    sxy += a.x() * b.y() - a.y() * b.x();
  }
  const double yaw = std::atan2(sxy, sxx);
  const Pose2 R{0.0, 0.0, yaw};
  const Vec2 t = cd - R.apply(cs);
  return {t.x(), t.y(), yaw};
}

IcpResult icp_refine(std::span<const Vec2> query, const NearestNeighbor2& target, const Pose2& init,
                     const IcpParams& params) {
  params.validate();
  IcpResult res;
  res.pose = init;
  Pose2 T = init;
  std::vector<Vec2> src, dst;
  for (int it = 0; it < params.max_iterations; ++it) {
    src.clear();
    dst.clear();
    double sum = 0.0;
    for (const Vec2& q : query) {
      const Vec2 p = T.apply(q);
      const int j = target.nearest(p, params.correspondence_radius);
      if (j < 0) continue;
      src.push_back(q);
      dst.push_back(target.points()[j]);
      sum += (target.points()[j] - p).norm();
    }
    if (src.size() < 3) {
      res.ok = false;
      return res;
    }
    const double r = sum / static_cast<double>(src.size());
    if (!res.residual_history.empty() && r > res.residual_history.back()) break;  // keep the previous estimate
    const double prev = res.residual_history.empty() ? std::numeric_limits<double>::infinity()
                                                     : res.residual_history.back();
    res.residual_history.push_back(r);
    res.pose = T;
    res.mean_residual = r;
    res.correspondences = static_cast<int>(src.size());
    res.ok = true;
    if (prev - r < params.tolerance && it > 0) break;

    const Pose2 next = fit_rigid_2d(src, dst);
    res.iterations = it + 1;
    const double step = std::hypot(next.x - T.x, next.y - T.y) + std::abs(wrap_angle(next.yaw - T.yaw));
    T = next;
    if (step < params.tolerance) {
      res.pose = T;
      break;
    }
  }
  return res;
}

IcpResult icp_refine(std::span<const Vec2> query, std::span<const Vec2> target, const Pose2& init,
                     const IcpParams& params) {
  const NearestNeighbor2 index(target, params.correspondence_radius);
  return icp_refine(query, index, init, params);
}

}  // namespace radloc::matching
