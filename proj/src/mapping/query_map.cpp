#include "radloc/mapping/query_map.hpp"

#include <cmath>
#include <stdexcept>

namespace radloc::mapping {

void QueryMapParams::validate() const {
  if (!(box_size > 0.0)) throw std::invalid_argument("query.box_size must be positive");
  if (!(z_extent > 0.0)) throw std::invalid_argument("query.z_extent must be positive");
}

QueryMap::QueryMap(OgmParams ogm, QueryMapParams params) : grid_(ogm), params_(params) {
  params_.validate();
  box_ = index_box();
}

bool QueryMap::IndexBox::contains(const CellKey& k) const {
  return k.x >= lo.x && k.x <= hi.x && k.y >= lo.y && k.y <= hi.y && k.z >= lo.z && k.z <= hi.z;
}

// Range of cell indices whose centers satisfy in_box().
QueryMap::IndexBox QueryMap::index_box() const {
  const double r = grid_.params().resolution;
  const Vec3 o = grid_.origin();
  const Vec3 ext(0.5 * params_.box_size, 0.5 * params_.box_size, params_.z_extent);
  IndexBox b;
  std::int32_t* lo[3] = {&b.lo.x, &b.lo.y, &b.lo.z};
  std::int32_t* hi[3] = {&b.hi.x, &b.hi.y, &b.hi.z};
  for (int i = 0; i < 3; ++i) {
    *lo[i] = static_cast<std::int32_t>(std::ceil((center_[i] - ext[i] - o[i]) / r - 0.5));
    *hi[i] = static_cast<std::int32_t>(std::floor((center_[i] + ext[i] - o[i]) / r - 0.5));
    // Guard the rounding at exact face hits against in_box().
    while (*lo[i] <= *hi[i] && !(std::abs(o[i] + r * (*lo[i] + 0.5) - center_[i]) <= ext[i])) ++*lo[i];
    while (*hi[i] >= *lo[i] && !(std::abs(o[i] + r * (*hi[i] + 0.5) - center_[i]) <= ext[i])) --*hi[i];
    while (std::abs(o[i] + r * (*lo[i] - 0.5) - center_[i]) <= ext[i]) --*lo[i];
    while (std::abs(o[i] + r * (*hi[i] + 1.5) - center_[i]) <= ext[i]) ++*hi[i];
  }
  return b;
}

bool QueryMap::in_box(const Vec3& p) const {
  const double h = 0.5 * params_.box_size;
  return std::abs(p.x() - center_.x()) <= h && std::abs(p.y() - center_.y()) <= h &&
         std::abs(p.z() - center_.z()) <= params_.z_extent;
}

void QueryMap::recenter(const Vec3& robot) {
  center_ = robot;
  const IndexBox b = index_box();
  if (b == box_) return;
  box_ = b;
  grid_.erase_if([&](const CellKey& k) { return !box_.contains(k); });
}

void QueryMap::insert_scan(const RigidTransform& odom_from_sensor, std::span<const Vec3> points_sensor,
                           const Vec3& robot) {
  recenter(robot);
  std::vector<Vec3> pts;
  pts.reserve(points_sensor.size());
  for (const Vec3& p : points_sensor) {
    const Vec3 q = odom_from_sensor * p;
    if (in_box(q) && box_.contains(grid_.key_of(q))) pts.push_back(q);
  }
  grid_.insert_points(odom_from_sensor.translation, pts, [&](const CellKey& k) { return box_.contains(k); });
}

std::size_t QueryMap::capacity() const {
  const double r = grid_.params().resolution;
  const auto side = static_cast<std::size_t>(std::ceil(params_.box_size / r)) + 1;
  const auto height = static_cast<std::size_t>(std::ceil(2.0 * params_.z_extent / r)) + 1;
  return side * side * height;
}

}  // namespace radloc::mapping
