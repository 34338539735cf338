#pragma once

#include "radloc/rio/factors.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace radloc::rio {

struct RansacParams {
  int iterations = 100;
  double inlier_threshold = 0.12;  // m/s, 3x the Doppler sigma
  int min_inliers = 8;
  /// Minimal samples whose 3x3 ray matrix has |det| below this are redrawn.
  double min_abs_det = 1e-3;
};

enum class RansacStatus { Ok, TooFewDetections, InsufficientGeometry, LowConsensus };

struct RansacResult {
  RansacStatus status = RansacStatus::TooFewDetections;
  Vec3 velocity = Vec3::Zero();  // IMU-frame velocity
  std::vector<bool> inliers;     // parallel to the input detections
  int inlier_count = 0;

  bool ok() const { return status == RansacStatus::Ok; }
};

/// ransac_velocity: pooled 3-point RANSAC over lever-arm-compensated
/// detections from every sensor at one timestep. The final estimate is the
/// least-squares fit over the largest consensus set; outliers are treated as
/// dynamic objects.
RansacResult ransac_velocity(std::span<const CompensatedDetection> detections, const RansacParams& params,
                             std::uint64_t seed);

/// Least squares v = argmin sum (rr - v . ray)^2 over the masked detections.
/// Returns false when the normal matrix is rank deficient.
bool fit_velocity(std::span<const CompensatedDetection> detections, const std::vector<bool>& mask,
                  Vec3& velocity);

}  // namespace radloc::rio
