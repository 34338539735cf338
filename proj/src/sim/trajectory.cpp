#include "radloc/sim/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace radloc::sim {
namespace {

std::vector<Vec3> resample_polygon(const std::vector<Vec3>& pts, double spacing) {
  double perimeter = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) perimeter += (pts[(i + 1) % pts.size()] - pts[i]).norm();
  const int n = std::max(4, static_cast<int>(std::round(perimeter / spacing)));
  const double step = perimeter / n;
  std::vector<Vec3> out;
  out.reserve(n);
  size_t seg = 0;
  double seg_start = 0.0;
  for (int k = 0; k < n; ++k) {
    const double s = k * step;
    while (true) {
      const double len = (pts[(seg + 1) % pts.size()] - pts[seg]).norm();
      if (s <= seg_start + len || seg + 1 == pts.size()) {
        const double u = len > 0.0 ? (s - seg_start) / len : 0.0;
        out.push_back(pts[seg] + u * (pts[(seg + 1) % pts.size()] - pts[seg]));
        break;
      }
      seg_start += len;
      ++seg;
    }
  }
  return out;
}

}  // namespace

Trajectory::Trajectory(TrajectorySpec spec) : spec_(std::move(spec)) {
  if (const auto* l = std::get_if<Line>(&spec_)) {
    if (!(l->speed > 0.0)) throw std::invalid_argument("line: speed must be positive");
  } else if (const auto* c = std::get_if<Circle>(&spec_)) {
    if (!(c->radius > 0.0) || !(c->speed > 0.0))
      throw std::invalid_argument("circle: radius and speed must be positive");
  } else if (const auto* f = std::get_if<FigureEight>(&spec_)) {
    if (!(f->half_width > 0.0) || !(f->period > 0.0))
      throw std::invalid_argument("figure eight: size and period must be positive");
  } else if (const auto* w = std::get_if<WaypointLoop>(&spec_)) {
    if (w->waypoints.size() < 3) throw std::invalid_argument("waypoint loop: need at least 3 waypoints");
    if (!(w->speed > 0.0) || !(w->control_spacing > 0.0))
      throw std::invalid_argument("waypoint loop: speed and spacing must be positive");
    for (size_t i = 0; i < w->waypoints.size(); ++i) {
      const Vec3 d = w->waypoints[(i + 1) % w->waypoints.size()] - w->waypoints[i];
      if (d.head<2>().norm() < 1e-6) throw std::invalid_argument("waypoint loop: repeated waypoint");
    }
    control_ = resample_polygon(w->waypoints, w->control_spacing);
    double perimeter = 0.0;
    for (size_t i = 0; i < w->waypoints.size(); ++i)
      perimeter += (w->waypoints[(i + 1) % w->waypoints.size()] - w->waypoints[i]).norm();
    segment_time_ = perimeter / control_.size() / w->speed;
  }
}

double Trajectory::period() const {
  if (const auto* c = std::get_if<Circle>(&spec_)) return 2.0 * kPi * c->radius / c->speed;
  if (const auto* f = std::get_if<FigureEight>(&spec_)) return f->period;
  if (std::holds_alternative<WaypointLoop>(spec_)) return segment_time_ * control_.size();
  return 0.0;
}

Trajectory::Kinematics Trajectory::planar(double t) const {
  Kinematics k{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  if (const auto* s = std::get_if<Stationary>(&spec_)) {
    k.p = s->position;
  } else if (const auto* l = std::get_if<Line>(&spec_)) {
    const Vec3 dir(std::cos(l->heading), std::sin(l->heading), 0.0);
    k.p = l->start + l->speed * t * dir;
    k.v = l->speed * dir;
  } else if (const auto* c = std::get_if<Circle>(&spec_)) {
    const double sgn = c->counter_clockwise ? 1.0 : -1.0;
    const double w = sgn * c->speed / c->radius;
    const double th = w * t;
    k.p = c->center + c->radius * Vec3(std::cos(th), std::sin(th), 0.0);
    k.v = c->radius * w * Vec3(-std::sin(th), std::cos(th), 0.0);
    k.a = -c->radius * w * w * Vec3(std::cos(th), std::sin(th), 0.0);
  } else if (const auto* f = std::get_if<FigureEight>(&spec_)) {
    const double w = 2.0 * kPi / f->period;
    const double A = f->half_width;
    k.p = f->center + Vec3(A * std::sin(w * t), 0.5 * A * std::sin(2.0 * w * t), 0.0);
    k.v = Vec3(A * w * std::cos(w * t), A * w * std::cos(2.0 * w * t), 0.0);
    k.a = Vec3(-A * w * w * std::sin(w * t), -2.0 * A * w * w * std::sin(2.0 * w * t), 0.0);
  } else {
    // Uniform periodic cubic B-spline.
    const int n = static_cast<int>(control_.size());
    const double T = segment_time_;
    double s = t / T;
    const double total = static_cast<double>(n);
    s = std::fmod(s, total);
    if (s < 0.0) s += total;
    int i = static_cast<int>(std::floor(s));
    if (i >= n) i = n - 1;
    const double u = s - i;
    const Vec3& P0 = control_[(i + n - 1) % n];
    const Vec3& P1 = control_[i % n];
    const Vec3& P2 = control_[(i + 1) % n];
    const Vec3& P3 = control_[(i + 2) % n];
    const double u2 = u * u, u3 = u2 * u;
    k.p = ((1 - u) * (1 - u) * (1 - u) * P0 + (3 * u3 - 6 * u2 + 4) * P1 +
           (-3 * u3 + 3 * u2 + 3 * u + 1) * P2 + u3 * P3) / 6.0;
    const Vec3 dp = (-3 * (1 - u) * (1 - u) * P0 + (9 * u2 - 12 * u) * P1 +
                     (-9 * u2 + 6 * u + 3) * P2 + 3 * u2 * P3) / 6.0;
    const Vec3 ddp = (6 * (1 - u) * P0 + (18 * u - 12) * P1 + (-18 * u + 6) * P2 + 6 * u * P3) / 6.0;
    k.v = dp / T;
    k.a = ddp / (T * T);
  }
  return k;
}

TrajectorySample Trajectory::at(double t) const {
  const Kinematics k = planar(t);
  TrajectorySample s;
  s.t = t;
  s.p = k.p;
  s.v = k.v;
  s.a = k.a;
  if (const auto* st = std::get_if<Stationary>(&spec_)) {
    s.q = yaw_quat(st->yaw);
    return s;
  }
  const double speed2 = k.v.head<2>().squaredNorm();
  const double yaw = std::atan2(k.v.y(), k.v.x());
  s.q = yaw_quat(yaw);
  const double yaw_rate = speed2 > 0.0 ? (k.v.x() * k.a.y() - k.v.y() * k.a.x()) / speed2 : 0.0;
  s.omega = Vec3(0.0, 0.0, yaw_rate);
  return s;
}

GroundTruth Trajectory::sample(double duration, double rate) const {
  if (!(duration > 0.0)) throw std::invalid_argument("trajectory duration must be positive");
  if (!(rate > 0.0)) throw std::invalid_argument("sample rate must be positive");
  const auto n = static_cast<long>(std::floor(duration * rate + 1e-9));
  GroundTruth gt;
  gt.reserve(n + 1);
  for (long i = 0; i <= n; ++i) gt.push_back(at(static_cast<double>(i) / rate));
  return gt;
}

GroundTruth gen_trajectory(const TrajectorySpec& spec, double duration, double imu_rate) {
  return Trajectory(spec).sample(duration, imu_rate);
}

TrajectorySample interpolate(const GroundTruth& gt, double t) {
  if (gt.empty()) throw std::invalid_argument("interpolate: empty trajectory");
  if (t <= gt.front().t) return gt.front();
  if (t >= gt.back().t) return gt.back();
  auto it = std::upper_bound(gt.begin(), gt.end(), t,
                             [](double v, const TrajectorySample& s) { return v < s.t; });
  const TrajectorySample& b = *it;
  const TrajectorySample& a = *(it - 1);
  const double u = (t - a.t) / (b.t - a.t);
  TrajectorySample s;
  s.t = t;
  s.p = a.p + u * (b.p - a.p);
  s.v = a.v + u * (b.v - a.v);
  s.a = a.a + u * (b.a - a.a);
  s.omega = a.omega + u * (b.omega - a.omega);
  s.q = a.q.slerp(u, b.q);
  return s;
}

}  // namespace radloc::sim
