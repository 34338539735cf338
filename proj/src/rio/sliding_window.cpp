#include "radloc/rio/sliding_window.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace radloc::rio {

using Mat12 = Eigen::Matrix<double, 12, 12>;
using Row12 = Eigen::Matrix<double, 1, 12>;

double huber_cost(double r, double k) {
  const double a = std::abs(r);
  return a <= k ? r * r : 2.0 * k * a - k * k;
}

double huber_weight(double r, double k) {
  const double a = std::abs(r);
  return a <= k ? 1.0 : k / a;
}

namespace {

Mat12 imu_information(const PreintegratedImu& pre, double floor) {
  Mat12 cov = pre.covariance();
  cov.diagonal().array() += floor;
  return cov.ldlt().solve(Mat12::Identity());
}

}  // namespace

SlidingWindow::SlidingWindow(WindowParams params, std::vector<RigidTransform> extrinsics)
    : params_(params), extrinsics_(std::move(extrinsics)) {}

std::size_t SlidingWindow::factor_count() const {
  std::size_t n = 1;  // prior
  for (const WindowSlot& s : slots_) n += s.doppler.size() + s.landmarks.size() + (s.imu ? 1 : 0);
  return n;
}

double SlidingWindow::cost() const { return cost_of(slots_); }

double SlidingWindow::cost_of(const std::deque<WindowSlot>& slots) const {
  if (slots.empty()) return 0.0;
  double c = 0.0;
  const Vec12 d = State::boxminus(slots.front().x, prior_.lin);
  c += d.dot(prior_.H * d) + 2.0 * prior_.g.dot(d);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const WindowSlot& s = slots[i];
    for (const DopplerFactor& f : s.doppler) {
      const double r = doppler_residual(s.x, f.detection, extrinsics_[f.sensor], f.omega) / params_.doppler_sigma;
      c += huber_cost(r, params_.huber_k);
    }
    for (const LandmarkFactor& f : s.landmarks) {
      const auto e = landmark_residual(s.x, f.p_det_imu, f.p_landmark, f.t_OI);
      if (!e) continue;
      const double r = *e / params_.landmark_sigma;
      c += r * r;
    }
    if (i > 0 && s.imu) {
      const Vec12 r = imu_residual(slots[i - 1].x, s.x, *s.imu);
      c += r.dot(imu_information(*s.imu, params_.imu_cov_floor) * r);
    }
  }
  return c;
}

void SlidingWindow::linearize_prior(const State& x0, Eigen::MatrixXd& H, Eigen::VectorXd& b) const {
  const Vec12 d = State::boxminus(x0, prior_.lin);
  H.block<12, 12>(0, 0) += prior_.H;
  b.segment<12>(0) += prior_.H * d + prior_.g;
}

void SlidingWindow::linearize_slot(const std::deque<WindowSlot>& slots, std::size_t i, Eigen::MatrixXd& H,
                                   Eigen::VectorXd& b, std::size_t first_var) const {
  const WindowSlot& s = slots[i];
  const std::size_t o = 12 * (i - first_var);
  Mat12 Hs = Mat12::Zero();
  Vec12 bs = Vec12::Zero();
  for (const DopplerFactor& f : s.doppler) {
    DopplerJacobian J;
    const double r = doppler_residual(s.x, f.detection, extrinsics_[f.sensor], f.omega, &J) / params_.doppler_sigma;
    Row12 row = Row12::Zero();
    row.segment<3>(kVel) = J.d_v / params_.doppler_sigma;
    row.segment<3>(kRot) = J.d_theta / params_.doppler_sigma;
    row.segment<3>(kGyroBias) = J.d_bg / params_.doppler_sigma;
    const double w = huber_weight(r, params_.huber_k);
    Hs.noalias() += w * row.transpose() * row;
    bs.noalias() += w * row.transpose() * r;
  }
  for (const LandmarkFactor& f : s.landmarks) {
    Row3 J;
    const auto e = landmark_residual(s.x, f.p_det_imu, f.p_landmark, f.t_OI, &J);
    if (!e) continue;
    Row12 row = Row12::Zero();
    row.segment<3>(kRot) = J / params_.landmark_sigma;
    const double r = *e / params_.landmark_sigma;
    Hs.noalias() += row.transpose() * row;
    bs.noalias() += row.transpose() * r;
  }
  H.block<12, 12>(o, o) += Hs;
  b.segment<12>(o) += bs;
}

void SlidingWindow::linearize_imu(const std::deque<WindowSlot>& slots, std::size_t j, Eigen::MatrixXd& H,
                                  Eigen::VectorXd& b, std::size_t first_var) const {
  const WindowSlot& s = slots[j];
  if (!s.imu || j == 0) return;
  ImuJacobian J;
  const Vec12 r = imu_residual(slots[j - 1].x, s.x, *s.imu, &J);
  const Mat12 W = imu_information(*s.imu, params_.imu_cov_floor);
  const std::size_t oi = 12 * (j - 1 - first_var);
  const std::size_t oj = 12 * (j - first_var);
  const Mat12 WJi = W * J.d_i;
  const Mat12 WJj = W * J.d_j;
  H.block<12, 12>(oi, oi) += J.d_i.transpose() * WJi;
  H.block<12, 12>(oi, oj) += J.d_i.transpose() * WJj;
  H.block<12, 12>(oj, oi) += J.d_j.transpose() * WJi;
  H.block<12, 12>(oj, oj) += J.d_j.transpose() * WJj;
  b.segment<12>(oi) += J.d_i.transpose() * (W * r);
  b.segment<12>(oj) += J.d_j.transpose() * (W * r);
}

void SlidingWindow::build_normal_equations(Eigen::MatrixXd& H, Eigen::VectorXd& b) const {
  const std::size_t n = 12 * slots_.size();
  H.setZero(n, n);
  b.setZero(n);
  if (slots_.empty()) return;
  linearize_prior(slots_.front().x, H, b);
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    linearize_slot(slots_, i, H, b, 0);
    linearize_imu(slots_, i, H, b, 0);
  }
}

OptimizeReport SlidingWindow::optimize(const OptimizeParams& params) {
  OptimizeReport rep;
  if (slots_.empty()) return rep;
  const std::deque<WindowSlot> backup = slots_;
  double cost = cost_of(slots_);
  rep.initial_cost = cost;
  rep.cost_history.push_back(cost);
  if (!std::isfinite(cost)) {
    rep.diverged = true;
    return rep;
  }

  double lambda = params.initial_lambda;
  Eigen::MatrixXd H;
  Eigen::VectorXd b;
  bool relinearize = true;
  for (int it = 0; it < params.max_iterations; ++it) {
    rep.iterations = it + 1;
    if (relinearize) build_normal_equations(H, b);
    Eigen::MatrixXd A = H;
    A.diagonal() += lambda * (H.diagonal().array().max(1e-9)).matrix();
    const Eigen::VectorXd delta = A.ldlt().solve(-b);
    if (!delta.allFinite()) {
      rep.diverged = true;
      break;
    }
    std::deque<WindowSlot> candidate = slots_;
    for (std::size_t i = 0; i < candidate.size(); ++i) {
      candidate[i].x = candidate[i].x.boxplus(delta.segment<12>(12 * i));
    }
    const double new_cost = cost_of(candidate);
    if (!std::isfinite(new_cost)) {
      rep.diverged = true;
      break;
    }
    if (new_cost <= cost) {
      slots_ = std::move(candidate);
      cost = new_cost;
      rep.cost_history.push_back(cost);
      lambda = std::max(lambda * 0.1, 1e-12);
      relinearize = true;
      if (delta.norm() < params.convergence_tol) {
        rep.converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      relinearize = false;
      if (lambda > 1e10) {
        rep.converged = true;  // no descent direction left
        break;
      }
    }
  }
  if (rep.diverged) {
    slots_ = backup;
    rep.final_cost = cost_of(slots_);
    return rep;
  }
  rep.final_cost = cost;
  return rep;
}

MarginalizeReport SlidingWindow::marginalize_oldest() {
  MarginalizeReport rep;
  if (slots_.empty()) return rep;
  if (slots_.size() == 1) {
    slots_.pop_front();
    return rep;
  }
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(24, 24);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(24);
  linearize_prior(slots_[0].x, H, b);
  linearize_slot(slots_, 0, H, b, 0);
  linearize_imu(slots_, 1, H, b, 0);

  Mat12 H00 = H.block<12, 12>(0, 0);
  H00 = 0.5 * (H00 + H00.transpose());
  Eigen::SelfAdjointEigenSolver<Mat12> eig(H00);
  const double max_ev = std::max(eig.eigenvalues().maxCoeff(), 1.0);
  if (eig.eigenvalues().minCoeff() < params_.marginal_epsilon * max_ev) {
    H00.diagonal().array() += params_.marginal_epsilon * max_ev;
    rep.regularized = true;
  }
  const Eigen::LDLT<Mat12> ldlt(H00);
  const Mat12 H10 = H.block<12, 12>(12, 0);
  const Mat12 K = ldlt.solve(H10.transpose()).transpose();  // H10 H00^-1
  Prior p;
  p.lin = slots_[1].x;
  p.H = H.block<12, 12>(12, 12) - K * H10.transpose();
  p.H = 0.5 * (p.H + p.H.transpose());
  p.g = b.segment<12>(12) - K * b.segment<12>(0);
  prior_ = p;

  slots_.pop_front();
  slots_.front().imu.reset();
  return rep;
}

}  // namespace radloc::rio
