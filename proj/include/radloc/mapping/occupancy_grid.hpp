#pragma once

#include "radloc/geometry.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

namespace radloc::mapping {

struct OgmParams {
  double resolution = 0.2;  // m
  double p_hit = 0.7;
  double p_miss = 0.4;
  double occupied_threshold = 0.9;
  double clamp_min = 0.12;  // probability
  double clamp_max = 0.99;
  double free_margin = 2.0;  // m; rays stop clearing this far short of the endpoint

  /// Throws std::invalid_argument when a value is outside its documented range.
  void validate() const;
};

double logit(double p);
double probability(double log_odds);

enum class Observation { Hit, Miss };

/// logodds_update: l + logit(p_hit | p_miss), clamped.
double logodds_update(double log_odds, Observation obs, const OgmParams& params);

struct CellKey {
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::int32_t z = 0;

  bool operator==(const CellKey&) const = default;
  auto operator<=>(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = static_cast<std::uint32_t>(k.x);
    h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(k.y);
    h = h * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(k.z);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

/// Sparse log-odds voxel grid. Absent cells are at the uniform prior.
class OccupancyGrid {
 public:
  explicit OccupancyGrid(OgmParams params = {}, const Vec3& origin = Vec3::Zero());

  CellKey key_of(const Vec3& p) const;
  Vec3 center(const CellKey& k) const;

  double log_odds(const CellKey& k) const;
  double probability(const CellKey& k) const { return mapping::probability(log_odds(k)); }
  bool occupied(const CellKey& k) const;

  /// insert_scan: endpoints given in the sensor frame, pose maps sensor to grid frame.
  void insert_scan(const RigidTransform& grid_from_sensor, std::span<const Vec3> points_sensor);

  /// Ray-casts from `origin` to every endpoint (grid frame). Endpoint voxels
  /// get a hit, traversed voxels a miss, each voxel at most one update; a
  /// voxel that is both an endpoint and traversed counts as a hit.
  /// Cells rejected by `keep` (when given) are left untouched.
  void insert_points(const Vec3& origin, std::span<const Vec3> endpoints,
                     const std::function<bool(const CellKey&)>& keep = {});

  /// Keys of occupied cells in ascending (x, y, z) order.
  std::vector<CellKey> occupied_cells() const;
  std::vector<Vec3> occupied_points() const;

  std::size_t size() const { return cells_.size(); }
  void clear() { cells_.clear(); }
  std::size_t erase_if(const std::function<bool(const CellKey&)>& pred);

  const std::unordered_map<CellKey, double, CellKeyHash>& cells() const { return cells_; }
  const OgmParams& params() const { return params_; }
  const Vec3& origin() const { return origin_; }

 private:
  OgmParams params_;
  Vec3 origin_;
  double l_hit_, l_miss_, l_min_, l_max_;
  std::unordered_map<CellKey, double, CellKeyHash> cells_;
};

/// Cells visited by the segment a -> b, in order, excluding b's own cell
/// (3D integer traversal on the grid lattice).
std::vector<CellKey> traverse_ray(const OccupancyGrid& grid, const Vec3& a, const Vec3& b);

}  // namespace radloc::mapping
