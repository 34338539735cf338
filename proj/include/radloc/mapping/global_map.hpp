#pragma once

#include "radloc/mapping/occupancy_grid.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace radloc::mapping {

struct ChunkKey {
  std::int32_t x = 0;
  std::int32_t y = 0;

  bool operator==(const ChunkKey&) const = default;
  auto operator<=>(const ChunkKey&) const = default;
};

/// Occupied cell centers of a prebuilt map, partitioned into square x-y
/// tiles of `chunk_cells` cells per side.
class GlobalMap {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  explicit GlobalMap(double resolution = 0.2, const Vec3& origin = Vec3::Zero(), int chunk_cells = 80);

  /// Partitions the occupied cells of `grid`.
  static GlobalMap from_grid(const OccupancyGrid& grid, int chunk_cells = 80);

  void add_cell(const CellKey& k);

  ChunkKey chunk_of(const CellKey& k) const;
  /// Min/max x-y corners of a chunk, in meters.
  Eigen::Vector4d chunk_bounds(const ChunkKey& c) const;
  Vec3 center(const CellKey& k) const;

  /// chunks_near: points of every chunk intersecting the disk, ordered by
  /// chunk key then cell key.
  std::vector<Vec3> chunks_near(const Eigen::Vector2d& position, double radius) const;
  std::vector<ChunkKey> chunk_keys_near(const Eigen::Vector2d& position, double radius) const;
  std::vector<Vec3> all_points() const;

  const std::map<ChunkKey, std::vector<CellKey>>& chunks() const { return chunks_; }
  std::size_t point_count() const;
  double resolution() const { return resolution_; }
  const Vec3& origin() const { return origin_; }
  int chunk_cells() const { return chunk_cells_; }
  double chunk_side() const { return chunk_cells_ * resolution_; }

  /// Binary little-endian map file plus `<path>.json` metadata sidecar.
  void save(const std::string& path) const;
  /// Throws std::runtime_error on a malformed or truncated file.
  static GlobalMap load(const std::string& path);

  bool operator==(const GlobalMap& o) const;

 private:
  double resolution_;
  Vec3 origin_;
  int chunk_cells_;
  std::map<ChunkKey, std::vector<CellKey>> chunks_;  // cells sorted within a chunk
};

}  // namespace radloc::mapping
