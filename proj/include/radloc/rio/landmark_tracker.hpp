#pragma once

#include "radloc/geometry.hpp"

#include <span>
#include <vector>

namespace radloc::rio {

struct LandmarkParams {
  double bearing_weight = 5.0;  // L, m/rad
  double gate = 0.5;            // max polar distance for a valid match
  int n_obs_min = 5;            // previous observations must exceed this
  double max_err_max = 0.3;     // max historical match distance must stay below this
  double staleness = 1.0;       // s without a match before a landmark is dropped
  double max_range = 60.0;      // detections beyond this never seed landmarks
};

/// A tracked static radar target. The global position is fixed at the first
/// observation and never re-estimated.
struct Landmark {
  int id = 0;
  Vec3 p_O = Vec3::Zero();
  int n_obs = 1;
  double max_err = 0.0;
  double t_last = 0.0;
};

struct LandmarkMatch {
  int detection = -1;
  int landmark = -1;  // index into the landmark list passed to the association
  double distance = 0.0;
};

struct Association {
  std::vector<LandmarkMatch> matches;
  std::vector<int> unmatched_detections;
};

/// associate_landmarks: one-to-one assignment between detections and
/// landmarks (both in the IMU frame) minimizing total weighted polar
/// distance. Pairs beyond the gate are never assigned; candidates are split
/// into independent gated components and each is solved with the Hungarian
/// algorithm.
Association associate_landmarks(std::span<const Vec3> detections_imu, std::span<const Vec3> landmarks_imu,
                                double bearing_weight, double gate);

/// A landmark match promoted into the active set used for heading factors.
struct ActiveMatch {
  int detection = -1;
  int landmark_id = 0;
  Vec3 p_landmark = Vec3::Zero();
};

class LandmarkTracker {
 public:
  explicit LandmarkTracker(LandmarkParams params = {}) : params_(params) {}

  /// Drops stale landmarks, associates the detections against the
  /// survivors projected with (q_OI, t_OI), and applies update_tracker.
  std::vector<ActiveMatch> process(std::span<const Vec3> detections_imu, const Quat& q_OI, const Vec3& t_OI,
                                   double now);

  /// update_tracker: refreshes matched landmarks, emits the active set,
  /// seeds unmatched detections as new landmarks at their dead-reckoned
  /// global position.
  std::vector<ActiveMatch> update(const Association& assoc, std::span<const Vec3> detections_imu,
                                   const Quat& q_OI, const Vec3& t_OI, double now);

  /// Removes landmarks with now - t_last > staleness.
  void prune(double now);

  const std::vector<Landmark>& landmarks() const { return landmarks_; }
  std::vector<Landmark>& landmarks() { return landmarks_; }
  const LandmarkParams& params() const { return params_; }

 private:
  LandmarkParams params_;
  std::vector<Landmark> landmarks_;
  int next_id_ = 0;
};

}  // namespace radloc::rio
