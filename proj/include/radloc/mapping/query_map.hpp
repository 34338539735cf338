#pragma once

#include "radloc/mapping/occupancy_grid.hpp"

#include <span>
#include <vector>

namespace radloc::mapping {

struct QueryMapParams {
  double box_size = 40.0;  // m, side of the x-y box
  double z_extent = 3.0;   // m above and below the robot

  void validate() const;
};

/// Local occupancy grid in the odometry frame, restricted to an axis-aligned
/// box centered on the robot.
class QueryMap {
 public:
  explicit QueryMap(OgmParams ogm = {}, QueryMapParams params = {});

  /// query_map_update: recenters on `robot_position`, drops cells outside
  /// the box, then inserts the scan (endpoints outside the box are ignored).
  void insert_scan(const RigidTransform& odom_from_sensor, std::span<const Vec3> points_sensor,
                   const Vec3& robot_position);

  /// Moves the box and deletes every cell whose center leaves it.
  void recenter(const Vec3& robot_position);

  bool in_box(const Vec3& p) const;

  /// Occupied cell centers (odometry frame), ascending cell order.
  std::vector<Vec3> cloud() const { return grid_.occupied_points(); }

  const OccupancyGrid& grid() const { return grid_; }
  const Vec3& center() const { return center_; }
  const QueryMapParams& params() const { return params_; }
  /// Upper bound on stored cells implied by the box.
  std::size_t capacity() const;

  void clear() { grid_.clear(); }

 private:
  struct IndexBox {
    CellKey lo, hi;
    bool operator==(const IndexBox&) const = default;
    bool contains(const CellKey& k) const;
  };
  IndexBox index_box() const;

  OccupancyGrid grid_;
  QueryMapParams params_;
  Vec3 center_ = Vec3::Zero();
  IndexBox box_;
};

}  // namespace radloc::mapping
