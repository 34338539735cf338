#include "radloc/rio/ransac.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace radloc::rio {

bool fit_velocity(std::span<const CompensatedDetection> detections, const std::vector<bool>& mask,
                  Vec3& velocity) {
  Mat3 AtA = Mat3::Zero();
  Vec3 Atb = Vec3::Zero();
  int n = 0;
  for (size_t i = 0; i < detections.size(); ++i) {
    if (!mask[i]) continue;
    AtA += detections[i].ray_imu * detections[i].ray_imu.transpose();
    Atb += detections[i].ray_imu * detections[i].rr_imu;
    ++n;
  }
  if (n < 3) return false;
  Eigen::SelfAdjointEigenSolver<Mat3> eig(AtA);
  if (eig.eigenvalues()(0) < 1e-9 * std::max(1.0, eig.eigenvalues()(2))) return false;
  velocity = AtA.ldlt().solve(Atb);
  return true;
}

namespace {

int count_inliers(std::span<const CompensatedDetection> dets, const Vec3& v, double thr,
                  std::vector<bool>* mask) {
  int n = 0;
  for (size_t i = 0; i < dets.size(); ++i) {
    const bool in = std::abs(dets[i].rr_imu - v.dot(dets[i].ray_imu)) < thr;
    if (mask) (*mask)[i] = in;
    n += in ? 1 : 0;
  }
  return n;
}

}  // namespace

RansacResult ransac_velocity(std::span<const CompensatedDetection> dets, const RansacParams& params,
                             std::uint64_t seed) {
  RansacResult res;
  res.inliers.assign(dets.size(), false);
  if (dets.size() < 3) {
    res.status = RansacStatus::TooFewDetections;
    return res;
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, dets.size() - 1);

  int best_count = -1;
  Vec3 best_v = Vec3::Zero();
  bool any_model = false;
  // Each iteration may redraw degenerate samples a bounded number of times.
  const int max_redraws = 20;
  for (int it = 0; it < params.iterations; ++it) {
    Mat3 A;
    Vec3 b;
    bool solved = false;
    for (int attempt = 0; attempt < max_redraws && !solved; ++attempt) {
      size_t i0 = pick(rng), i1 = pick(rng), i2 = pick(rng);
      if (i0 == i1 || i1 == i2 || i0 == i2) continue;
      A.row(0) = dets[i0].ray_imu.transpose();
      A.row(1) = dets[i1].ray_imu.transpose();
      A.row(2) = dets[i2].ray_imu.transpose();
      if (std::abs(A.determinant()) < params.min_abs_det) continue;
      b << dets[i0].rr_imu, dets[i1].rr_imu, dets[i2].rr_imu;
      solved = true;
    }
    if (!solved) continue;
    any_model = true;
    const Vec3 v = A.partialPivLu().solve(b);
    const int n = count_inliers(dets, v, params.inlier_threshold, nullptr);
    if (n > best_count) {
      best_count = n;
      best_v = v;
    }
  }

  if (!any_model) {
    res.status = RansacStatus::InsufficientGeometry;
    return res;
  }

  std::vector<bool> mask(dets.size(), false);
  count_inliers(dets, best_v, params.inlier_threshold, &mask);
  Vec3 v = best_v;
  if (!fit_velocity(dets, mask, v)) {
    res.status = RansacStatus::InsufficientGeometry;
    return res;
  }
  // One re-classification pass against the refined model.
  std::vector<bool> refined(dets.size(), false);
  const int n_refined = count_inliers(dets, v, params.inlier_threshold, &refined);
  if (n_refined >= best_count) {
    Vec3 v2 = v;
    if (fit_velocity(dets, refined, v2)) {
      v = v2;
      mask = std::move(refined);
    }
  }

  res.velocity = v;
  res.inliers = std::move(mask);
  res.inlier_count = 0;
  for (bool in : res.inliers) res.inlier_count += in ? 1 : 0;
  res.status = res.inlier_count >= params.min_inliers ? RansacStatus::Ok : RansacStatus::LowConsensus;
  return res;
}

}  // namespace radloc::rio
