#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance runner.

#include "radloc/geometry.hpp"
#include "radloc/rio/state.hpp"
#include "radloc/types.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace radloc::testing {

/// Smooth band-limited IMU excitation: sums of sinusoids per axis.
struct Excitation {
  struct Tone {
    double amp, freq, phase;
  };
  std::vector<Tone> w[3], a[3];
  Vec3 a_offset = Vec3::Zero();

  static Excitation random(std::mt19937_64& rng, double w_amp = 1.0, double a_amp = 2.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Excitation e;
    for (int k = 0; k < 3; ++k) {
      for (int j = 0; j < 3; ++j) {
        e.w[k].push_back({w_amp * (u(rng) - 0.5), 0.2 + 2.0 * u(rng), 2 * kPi * u(rng)});
        e.a[k].push_back({a_amp * (u(rng) - 0.5), 0.2 + 2.0 * u(rng), 2 * kPi * u(rng)});
      }
    }
    e.a_offset = Vec3(0.0, 0.0, kGravity);
    return e;
  }

  static double eval(const std::vector<Tone>& tones, double t) {
    double s = 0.0;
    for (const Tone& tn : tones) s += tn.amp * std::sin(2 * kPi * tn.freq * t + tn.phase);
    return s;
  }
  Vec3 omega(double t) const { return {eval(w[0], t), eval(w[1], t), eval(w[2], t)}; }
  Vec3 accel(double t) const { return a_offset + Vec3(eval(a[0], t), eval(a[1], t), eval(a[2], t)); }

  std::vector<ImuMeasurement> sample(double t0, double t1, double rate) const {
    std::vector<ImuMeasurement> out;
    const int n = static_cast<int>(std::llround((t1 - t0) * rate));
    for (int i = 0; i <= n; ++i) {
      const double t = t0 + (t1 - t0) * i / n;
      out.push_back({t, accel(t), omega(t)});
    }
    return out;
  }
};

/// Direct fine-step integration of R' = R [w]x, v' = R a over [t0, t1]
/// (body-frame increments, no gravity), Simpson's rule on the rotated force.
inline void direct_integrate(const Excitation& e, double t0, double t1, double rate, Quat& dR, Vec3& dv) {
  const int n = static_cast<int>(std::llround((t1 - t0) * rate));
  const double h = (t1 - t0) / n;
  Quat R = Quat::Identity();
  dv.setZero();
  for (int i = 0; i < n; ++i) {
    const double t = t0 + i * h;
    const Quat Rm = R * so3_exp(e.omega(t + 0.25 * h) * 0.5 * h);
    const Quat R1 = R * so3_exp(e.omega(t + 0.5 * h) * h);
    dv += h / 6.0 * (R * e.accel(t) + 4.0 * (Rm * e.accel(t + 0.5 * h)) + R1 * e.accel(t + h));
    R = R1.normalized();
  }
  dR = R;
}

/// Central-difference Jacobian of f over the 12-dim state tangent.
template <class F>
Eigen::MatrixXd numeric_state_jacobian(F f, const rio::State& x, double h = 1e-6) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd J(f0.size(), 12);
  for (int k = 0; k < 12; ++k) {
    rio::Vec12 d = rio::Vec12::Zero();
    d[k] = h;
    J.col(k) = (f(x.boxplus(d)) - f(x.boxplus(-d))) / (2 * h);
  }
  return J;
}

/// Frobenius error relative to the reference, with unit floor for
/// near-zero references.
inline double relative_error(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& reference) {
  return (analytic - reference).norm() / std::max(1.0, reference.norm());
}

inline rio::State random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  rio::State x;
  x.v = Vec3(5 * u(rng), 5 * u(rng), 0.5 * u(rng));
  x.q = so3_exp(Vec3(0.3 * u(rng), 0.3 * u(rng), kPi * u(rng)));
  x.ba = 0.05 * Vec3(u(rng), u(rng), u(rng));
  x.bg = 0.01 * Vec3(u(rng), u(rng), u(rng));
  return x;
}

/// Nearest-rank percentile, written independently of the library.
inline double nearest_rank_oracle(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  std::size_t rank = static_cast<std::size_t>(std::ceil(p / 100.0 * v.size()));
  if (rank < 1) rank = 1;
  return v[rank - 1];
}

}  // namespace radloc::testing
