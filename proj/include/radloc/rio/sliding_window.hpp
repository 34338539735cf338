#pragma once

#include "radloc/rio/factors.hpp"
#include "radloc/rio/imu_preintegration.hpp"
#include "radloc/rio/state.hpp"

#include <Eigen/Core>

#include <deque>
#include <optional>
#include <vector>

namespace radloc::rio {

struct DopplerFactor {
  Detection detection;
  int sensor = 0;
  Vec3 omega = Vec3::Zero();  // IMU rate interpolated to the scan time
};

/// Heading factor; landmark position and dead-reckoned translation are constants.
struct LandmarkFactor {
  Vec3 p_det_imu = Vec3::Zero();
  Vec3 p_landmark = Vec3::Zero();
  Vec3 t_OI = Vec3::Zero();
};

/// Gaussian prior on the oldest state, expressed around a linearization
/// point: cost = d^T H d + 2 g^T d with d = x (-) x_lin.
struct Prior {
  State lin;
  Eigen::Matrix<double, 12, 12> H = Eigen::Matrix<double, 12, 12>::Zero();
  Vec12 g = Vec12::Zero();
};

/// One state and the factors attached to it. `imu` links the previous slot
/// to this one.
struct WindowSlot {
  State x;
  std::vector<DopplerFactor> doppler;
  std::vector<LandmarkFactor> landmarks;
  std::optional<PreintegratedImu> imu;
  Vec3 t_OI = Vec3::Zero();
  bool degraded = false;
};

struct WindowParams {
  double doppler_sigma = 0.04;   // m/s
  double huber_k = 3.0;          // in sigmas
  double landmark_sigma = 0.01;  // rad
  double imu_cov_floor = 1e-10;  // added to the preintegration covariance diagonal
  double marginal_epsilon = 1e-9;
};

struct OptimizeParams {
  int max_iterations = 8;
  double initial_lambda = 1e-4;
  double convergence_tol = 1e-6;  // on the step norm
};

struct OptimizeReport {
  int iterations = 0;
  bool converged = false;
  bool diverged = false;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  std::vector<double> cost_history;  // accepted costs, starting with the initial one
};

struct MarginalizeReport {
  bool regularized = false;
};

/// Fixed-lag smoother over the last N radar timesteps.
class SlidingWindow {
 public:
  SlidingWindow(WindowParams params, std::vector<RigidTransform> extrinsics);

  void set_prior(const Prior& prior) { prior_ = prior; }
  const Prior& prior() const { return prior_; }

  void push(WindowSlot slot) { slots_.push_back(std::move(slot)); }
  std::size_t size() const { return slots_.size(); }
  bool empty() const { return slots_.empty(); }
  WindowSlot& slot(std::size_t i) { return slots_[i]; }
  const WindowSlot& slot(std::size_t i) const { return slots_[i]; }
  WindowSlot& back() { return slots_.back(); }
  const WindowSlot& back() const { return slots_.back(); }
  std::size_t factor_count() const;

  /// Total weighted cost at the current estimates.
  double cost() const;

  /// Levenberg-Marquardt over all residuals; rotation updated on the
  /// manifold. On a non-finite cost the states are rolled back.
  OptimizeReport optimize(const OptimizeParams& params);

  /// Schur-complements the oldest state into a prior on the next one.
  MarginalizeReport marginalize_oldest();

  /// Dense normal equations over all in-window states (H, gradient b).
  void build_normal_equations(Eigen::MatrixXd& H, Eigen::VectorXd& b) const;

  const WindowParams& params() const { return params_; }
  const std::vector<RigidTransform>& extrinsics() const { return extrinsics_; }

 private:
  double cost_of(const std::deque<WindowSlot>& slots) const;
  /// Accumulates the factors that touch slot `first` (and the IMU factor to
  /// slot first+1 if `include_next_imu`) into H/b over the variable range
  /// [offset, offset + 12 * n).
  void linearize_slot(const std::deque<WindowSlot>& slots, std::size_t i, Eigen::MatrixXd& H,
                      Eigen::VectorXd& b, std::size_t first_var) const;
  void linearize_imu(const std::deque<WindowSlot>& slots, std::size_t j, Eigen::MatrixXd& H,
                     Eigen::VectorXd& b, std::size_t first_var) const;
  void linearize_prior(const State& x0, Eigen::MatrixXd& H, Eigen::VectorXd& b) const;

  WindowParams params_;
  std::vector<RigidTransform> extrinsics_;
  std::deque<WindowSlot> slots_;
  Prior prior_;
};

/// Huber weight and cost on a whitened residual r (cost returned for r^2 units).
double huber_cost(double r, double k);
double huber_weight(double r, double k);

}  // namespace radloc::rio
