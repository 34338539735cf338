#include "radloc/sim/imu_sim.hpp"

#include <cmath>
#include <random>

namespace radloc::sim {

std::vector<ImuMeasurement> sim_imu(const GroundTruth& gt, const ImuNoise& noise, std::uint64_t seed,
                                    std::vector<ImuBias>* bias_out) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  auto gauss3 = [&] { return Vec3(n01(rng), n01(rng), n01(rng)); };

  Vec3 ba = noise.accel_bias0;
  Vec3 bg = noise.gyro_bias0;
  const Vec3 g = gravity_vector();

  std::vector<ImuMeasurement> out;
  out.reserve(gt.size());
  if (bias_out) bias_out->clear();
  for (size_t i = 0; i < gt.size(); ++i) {
    const TrajectorySample& s = gt[i];
    const double dt = i > 0 ? s.t - gt[i - 1].t : (gt.size() > 1 ? gt[1].t - gt[0].t : 0.0);
    if (i > 0 && dt > 0.0) {
      ba += noise.accel_bias_walk * std::sqrt(dt) * gauss3();
      bg += noise.gyro_bias_walk * std::sqrt(dt) * gauss3();
    }
    ImuMeasurement m;
    m.t = s.t;
    m.a = s.q.conjugate() * (s.a - g) + ba;
    m.w = s.omega + bg;
    if (dt > 0.0) {
      m.a += noise.accel_white / std::sqrt(dt) * gauss3();
      m.w += noise.gyro_white / std::sqrt(dt) * gauss3();
    }
    out.push_back(m);
    if (bias_out) bias_out->push_back({s.t, ba, bg});
  }
  return out;
}

}  // namespace radloc::sim
