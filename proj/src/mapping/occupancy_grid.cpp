#include "radloc/mapping/occupancy_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace radloc::mapping {

void OgmParams::validate() const {
  if (!(resolution > 0.0)) throw std::invalid_argument("ogm.resolution must be positive");
  if (!(p_hit > 0.5 && p_hit < 1.0)) throw std::invalid_argument("ogm.p_hit must lie in (0.5, 1)");
  if (!(p_miss > 0.0 && p_miss < 0.5)) throw std::invalid_argument("ogm.p_miss must lie in (0, 0.5)");
  if (!(clamp_min > 0.0 && clamp_min < 0.5)) throw std::invalid_argument("ogm.clamp_min must lie in (0, 0.5)");
  if (!(clamp_max > 0.5 && clamp_max < 1.0)) throw std::invalid_argument("ogm.clamp_max must lie in (0.5, 1)");
  if (!(free_margin >= 0.0)) throw std::invalid_argument("ogm.free_margin must be non-negative");
  if (!(occupied_threshold > 0.5 && occupied_threshold < clamp_max)) {
    throw std::invalid_argument("ogm.occupied_threshold must lie in (0.5, clamp_max)");
  }
}

double logit(double p) { return std::log(p / (1.0 - p)); }
double probability(double l) { return 1.0 / (1.0 + std::exp(-l)); }

double logodds_update(double l, Observation obs, const OgmParams& params) {
  const double delta = obs == Observation::Hit ? logit(params.p_hit) : logit(params.p_miss);
  return std::clamp(l + delta, logit(params.clamp_min), logit(params.clamp_max));
}

OccupancyGrid::OccupancyGrid(OgmParams params, const Vec3& origin)
    : params_(params),
      origin_(origin),
      l_hit_(logit(params.p_hit)),
      l_miss_(logit(params.p_miss)),
      l_min_(logit(params.clamp_min)),
      l_max_(logit(params.clamp_max)) {
  params_.validate();
}

CellKey OccupancyGrid::key_of(const Vec3& p) const {
  const Vec3 c = (p - origin_) / params_.resolution;
  return {static_cast<std::int32_t>(std::floor(c.x())), static_cast<std::int32_t>(std::floor(c.y())),
          static_cast<std::int32_t>(std::floor(c.z()))};
}

Vec3 OccupancyGrid::center(const CellKey& k) const {
  return origin_ + params_.resolution * Vec3(k.x + 0.5, k.y + 0.5, k.z + 0.5);
}

double OccupancyGrid::log_odds(const CellKey& k) const {
  const auto it = cells_.find(k);
  return it == cells_.end() ? 0.0 : it->second;
}

bool OccupancyGrid::occupied(const CellKey& k) const {
  return log_odds(k) >= logit(params_.occupied_threshold);
}

std::vector<CellKey> traverse_ray(const OccupancyGrid& grid, const Vec3& a, const Vec3& b) {
  std::vector<CellKey> out;
  const double res = grid.params().resolution;
  const Vec3 pa = (a - grid.origin()) / res;
  const Vec3 pb = (b - grid.origin()) / res;
  CellKey cur = grid.key_of(a);
  const CellKey end = grid.key_of(b);
  const Vec3 d = pb - pa;

  int step[3];
  double t_max[3], t_delta[3];
  int idx[3] = {cur.x, cur.y, cur.z};
  for (int i = 0; i < 3; ++i) {
    if (d[i] > 0.0) {
      step[i] = 1;
      t_delta[i] = 1.0 / d[i];
      t_max[i] = (std::floor(pa[i]) + 1.0 - pa[i]) / d[i];
    } else if (d[i] < 0.0) {
      step[i] = -1;
      t_delta[i] = -1.0 / d[i];
      t_max[i] = (pa[i] - std::floor(pa[i])) / -d[i];
    } else {
      step[i] = 0;
      t_delta[i] = std::numeric_limits<double>::infinity();
      t_max[i] = std::numeric_limits<double>::infinity();
    }
  }
  const int max_steps = std::abs(end.x - cur.x) + std::abs(end.y - cur.y) + std::abs(end.z - cur.z);
  for (int n = 0; n <= max_steps; ++n) {
    const CellKey k{idx[0], idx[1], idx[2]};
    if (k == end) break;
    out.push_back(k);
    int axis = 0;
    if (t_max[1] < t_max[axis]) axis = 1;
    if (t_max[2] < t_max[axis]) axis = 2;
    if (t_max[axis] > 1.0) break;
    idx[axis] += step[axis];
    t_max[axis] += t_delta[axis];
  }
  return out;
}

void OccupancyGrid::insert_points(const Vec3& origin, std::span<const Vec3> endpoints,
                                  const std::function<bool(const CellKey&)>& keep) {
  std::unordered_set<CellKey, CellKeyHash> hits, misses;
  for (const Vec3& p : endpoints) {
    if (!p.allFinite()) continue;
    const CellKey k = key_of(p);
    if (!keep || keep(k)) hits.insert(k);
  }
  for (const Vec3& p : endpoints) {
    if (!p.allFinite()) continue;
    const double r = (p - origin).norm();
    if (r <= params_.free_margin) continue;
    const Vec3 stop = origin + (p - origin) * ((r - params_.free_margin) / r);
    for (const CellKey& k : traverse_ray(*this, origin, stop)) {
      if (!hits.contains(k) && (!keep || keep(k))) misses.insert(k);
    }
  }
  for (const CellKey& k : misses) {
    double& l = cells_[k];
    l = std::clamp(l + l_miss_, l_min_, l_max_);
  }
  for (const CellKey& k : hits) {
    double& l = cells_[k];
    l = std::clamp(l + l_hit_, l_min_, l_max_);
  }
}

void OccupancyGrid::insert_scan(const RigidTransform& grid_from_sensor, std::span<const Vec3> points_sensor) {
  std::vector<Vec3> pts;
  pts.reserve(points_sensor.size());
  for (const Vec3& p : points_sensor) pts.push_back(grid_from_sensor * p);
  insert_points(grid_from_sensor.translation, pts);
}

std::vector<CellKey> OccupancyGrid::occupied_cells() const {
  const double l_occ = logit(params_.occupied_threshold);
  std::vector<CellKey> out;
  for (const auto& [k, l] : cells_) {
    if (l >= l_occ) out.push_back(k);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Vec3> OccupancyGrid::occupied_points() const {
  std::vector<Vec3> out;
  for (const CellKey& k : occupied_cells()) out.push_back(center(k));
  return out;
}

std::size_t OccupancyGrid::erase_if(const std::function<bool(const CellKey&)>& pred) {
  return std::erase_if(cells_, [&](const auto& kv) { return pred(kv.first); });
}

}  // namespace radloc::mapping
