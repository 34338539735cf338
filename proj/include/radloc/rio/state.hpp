#pragma once

#include "radloc/geometry.hpp"

#include <Eigen/Core>

namespace radloc::rio {

using Vec12 = Eigen::Matrix<double, 12, 1>;

/// Tangent-space layout of one state.
enum StateBlock : int { kVel = 0, kRot = 3, kAccBias = 6, kGyroBias = 9, kStateDim = 12 };

/// Estimator state at one radar timestep.
struct State {
  double t = 0.0;
  Vec3 v = Vec3::Zero();        // global-frame velocity
  Quat q = Quat::Identity();    // q_OI
  Vec3 ba = Vec3::Zero();       // accelerometer bias
  Vec3 bg = Vec3::Zero();       // gyro bias

  /// Applies a tangent increment; rotation is perturbed on the right.
  State boxplus(const Vec12& d) const {
    State s = *this;
    s.v += d.segment<3>(kVel);
    s.q = (q * so3_exp(d.segment<3>(kRot))).normalized();
    s.ba += d.segment<3>(kAccBias);
    s.bg += d.segment<3>(kGyroBias);
    return s;
  }

  /// Tangent difference such that b.boxplus(boxminus(a, b)) == a.
  static Vec12 boxminus(const State& a, const State& b) {
    Vec12 d;
    d.segment<3>(kVel) = a.v - b.v;
    d.segment<3>(kRot) = so3_log(b.q.conjugate() * a.q);
    d.segment<3>(kAccBias) = a.ba - b.ba;
    d.segment<3>(kGyroBias) = a.bg - b.bg;
    return d;
  }
};

}  // namespace radloc::rio
