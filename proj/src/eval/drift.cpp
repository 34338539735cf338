#include "radloc/eval/drift.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace radloc::eval {

double nearest_rank(std::vector<double> values, double p) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
  return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.count = values.size();
  s.p50 = nearest_rank(values, 50);
  s.p90 = nearest_rank(values, 90);
  s.p95 = nearest_rank(values, 95);
  s.p99 = nearest_rank(values, 99);
  s.max = nearest_rank(values, 100);
  return s;
}

PoseStamped interpolate_pose(std::span<const PoseStamped> track, double t) {
  if (track.empty()) throw std::invalid_argument("empty track");
  if (t <= track.front().t) return track.front();
  if (t >= track.back().t) return track.back();
  const auto it = std::upper_bound(track.begin(), track.end(), t,
                                   [](double v, const PoseStamped& p) { return v < p.t; });
  const PoseStamped& b = *it;
  const PoseStamped& a = *(it - 1);
  const double s = (t - a.t) / (b.t - a.t);
  PoseStamped out;
  out.t = t;
  out.p = a.p + s * (b.p - a.p);
  out.v = a.v + s * (b.v - a.v);
  out.q = a.q.slerp(s, b.q).normalized();
  return out;
}

namespace {

struct Pose {
  Mat3 R;
  Vec3 p;
};

Pose relative(const PoseStamped& a, const PoseStamped& b) {
  const Mat3 Ra = a.q.toRotationMatrix();
  return {Ra.transpose() * b.q.toRotationMatrix(), Ra.transpose() * (b.p - a.p)};
}

}  // namespace

DriftStats segment_drift(std::span<const PoseStamped> est, std::span<const PoseStamped> gt, double seg_len) {
  if (!(seg_len > 0.0)) throw std::invalid_argument("segment length must be positive");
  DriftStats out;
  out.segment_length = seg_len;
  if (gt.size() < 2 || est.empty()) {
    out.insufficient = true;
    return out;
  }

  // Times at which the ground-truth arc length crosses multiples of seg_len.
  std::vector<double> cuts{gt.front().t};
  double arc = 0.0;
  double next = seg_len;
  for (std::size_t i = 1; i < gt.size(); ++i) {
    const double step = (gt[i].p - gt[i - 1].p).norm();
    while (step > 0.0 && arc + step >= next) {
      const double s = (next - arc) / step;
      cuts.push_back(gt[i - 1].t + s * (gt[i].t - gt[i - 1].t));
      next += seg_len;
    }
    arc += step;
  }
  if (cuts.size() < 2) {
    out.insufficient = true;
    return out;
  }

  const double t_lo = est.front().t - 1e-9;
  const double t_hi = est.back().t + 1e-9;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double ta = cuts[k];
    const double tb = cuts[k + 1];
    if (ta < t_lo || tb > t_hi) continue;
    const Pose g = relative(interpolate_pose(gt, ta), interpolate_pose(gt, tb));
    const Pose e = relative(interpolate_pose(est, ta), interpolate_pose(est, tb));
    // Error transform g^-1 * e.
    const Vec3 dp = g.R.transpose() * (e.p - g.p);
    const Quat qg(g.R);
    const Quat qe(e.R);
    const double dyaw = wrap_angle(yaw_of(qe) - yaw_of(qg));
    out.translation.push_back(dp.norm() / seg_len);
    out.heading.push_back(std::abs(rad2deg(dyaw)) / seg_len);
  }
  out.insufficient = out.translation.empty();
  out.translation_summary = summarize(out.translation);
  out.heading_summary = summarize(out.heading);
  return out;
}

}  // namespace radloc::eval
