#include "radloc/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace radloc;

namespace {

// Rodrigues' formula, written out independently of Eigen's AngleAxis.
Mat3 rodrigues(const Vec3& axis_angle) {
  const double th = axis_angle.norm();
  if (th < 1e-15) return Mat3::Identity();
  const Vec3 k = axis_angle / th;
  Mat3 K;
  K << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
  return Mat3::Identity() + std::sin(th) * K + (1.0 - std::cos(th)) * K * K;
}

Quat random_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Quat q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized();
}

}  // namespace

TEST(Skew, MatchesDefinition) {
  Mat3 expected;
  expected << 0, -3, 2, 3, 0, -1, -2, 1, 0;
  EXPECT_TRUE(skew(Vec3(1, 2, 3)).isApprox(expected));
  EXPECT_TRUE(skew(Vec3::Zero()).isZero());
  const Vec3 v(0.3, -1.2, 2.0);
  EXPECT_LT((skew(v) * v).norm(), 1e-15);
}

TEST(Skew, IsCrossProductAndAntisymmetric) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 100; ++i) {
    const Vec3 v(u(rng), u(rng), u(rng));
    const Vec3 w(u(rng), u(rng), u(rng));
    const Mat3 S = skew(v);
    EXPECT_TRUE((S + S.transpose()).isZero(1e-15));
    const Vec3 cross(v.y() * w.z() - v.z() * w.y(), v.z() * w.x() - v.x() * w.z(), v.x() * w.y() - v.y() * w.x());
    EXPECT_LT((S * w - cross).norm(), 1e-12);
  }
}

TEST(QuatErrorVec, ZeroForIdenticalRotations) {
  const Quat q = so3_exp(Vec3(0.2, -0.4, 1.1));
  EXPECT_LT(quat_error_vec(q, q).norm(), 1e-15);
}

TEST(QuatErrorVec, SmallYawMatchesTwiceHalfSine) {
  const double th = deg2rad(2.0);
  const Vec3 e = quat_error_vec(yaw_quat(th), Quat::Identity());
  EXPECT_NEAR(e.z(), 2.0 * std::sin(th / 2.0), 1e-12);
  EXPECT_NEAR(e.z(), 0.0349, 1e-4);
  EXPECT_NEAR(e.x(), 0.0, 1e-15);
  EXPECT_NEAR(e.y(), 0.0, 1e-15);
}

TEST(QuatErrorVec, AntipodalRepresentationGivesZero) {
  const Quat q = so3_exp(Vec3(0.5, 0.1, -2.0));
  const Quat neg(-q.w(), -q.x(), -q.y(), -q.z());
  EXPECT_LT(quat_error_vec(neg, q).norm(), 1e-15);
  EXPECT_LT(quat_error_vec(q, neg).norm(), 1e-15);
}

TEST(Bearing, AxesAndQuadrants) {
  EXPECT_DOUBLE_EQ(atan2_bearing(Vec3(1, 0, 7)), 0.0);
  EXPECT_DOUBLE_EQ(atan2_bearing(Vec3(0, 1, 0)), kPi / 2);
  EXPECT_DOUBLE_EQ(atan2_bearing(Vec3(-1, -1, 0)), -3 * kPi / 4);
  EXPECT_DOUBLE_EQ(atan2_bearing(Vec3(-1, 0, 0)), kPi);
}

TEST(Bearing, PointOnZAxisThrows) {
  EXPECT_THROW(atan2_bearing(Vec3(0, 0, 3)), InvalidBearing);
  EXPECT_FALSE(has_bearing(Vec3(0, 0, 3)));
  EXPECT_TRUE(has_bearing(Vec3(1e-6, 0, 3)));
}

TEST(WrapAngle, RangeIsHalfOpen) {
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(wrap_angle(3 * kPi / 2), -kPi / 2, 1e-12);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng);
    const double w = wrap_angle(a);
    EXPECT_GT(w, -kPi);
    EXPECT_LE(w, kPi);
    EXPECT_NEAR(std::remainder(a - w, 2 * kPi), 0.0, 1e-9);
  }
}

TEST(So3, ExpMatchesRodrigues) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 200; ++i) {
    const Vec3 th(u(rng), u(rng), u(rng));
    if (th.norm() >= kPi) continue;
    EXPECT_TRUE(so3_exp(th).toRotationMatrix().isApprox(rodrigues(th), 1e-12));
    EXPECT_LT((so3_log(so3_exp(th)) - th).norm(), 1e-9);
  }
}

TEST(So3, RightJacobianMatchesFiniteDifference) {
  // Exp(th + d) ~= Exp(th) Exp(Jr(th) d)
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 50; ++i) {
    const Vec3 th(u(rng), u(rng), u(rng));
    const Mat3 Jr = so3_right_jacobian(th);
    Mat3 num;
    const double h = 1e-6;
    for (int k = 0; k < 3; ++k) {
      const Vec3 d = h * Vec3::Unit(k);
      const Vec3 fp = so3_log(so3_exp(th).conjugate() * so3_exp(th + d));
      const Vec3 fm = so3_log(so3_exp(th).conjugate() * so3_exp(th - d));
      num.col(k) = (fp - fm) / (2 * h);
    }
    EXPECT_TRUE(Jr.isApprox(num, 1e-6));
    EXPECT_TRUE((so3_right_jacobian_inv(th) * Jr).isApprox(Mat3::Identity(), 1e-9));
  }
}

TEST(Quaternion, MatrixRoundTripPreservesRotation) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 1000; ++i) {
    const Quat q = random_quat(rng);
    const Quat back(q.toRotationMatrix());
    EXPECT_LT(quat_error_vec(back, q).norm(), 1e-9);
    EXPECT_NEAR(canonical(q).norm(), 1.0, 1e-12);
    EXPECT_GE(canonical(q).w(), 0.0);
  }
}

TEST(RigidTransform, CompositionMatchesMatrixProduct) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 1000; ++i) {
    const RigidTransform a(random_quat(rng), Vec3(u(rng), u(rng), u(rng)), FrameId::global(), FrameId::imu());
    const RigidTransform b(random_quat(rng), Vec3(u(rng), u(rng), u(rng)), FrameId::imu(), FrameId::radar(1));
    Eigen::Matrix4d Ma = Eigen::Matrix4d::Identity(), Mb = Eigen::Matrix4d::Identity();
    Ma.topLeftCorner<3, 3>() = a.rotation.toRotationMatrix();
    Ma.topRightCorner<3, 1>() = a.translation;
    Mb.topLeftCorner<3, 3>() = b.rotation.toRotationMatrix();
    Mb.topRightCorner<3, 1>() = b.translation;
    const RigidTransform ab = a * b;
    EXPECT_LT(((Ma * Mb) - ab.matrix()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_EQ(ab.target, FrameId::global());
    EXPECT_EQ(ab.source, FrameId::radar(1));
    const Vec3 p(u(rng), u(rng), u(rng));
    EXPECT_LT((ab * p - a * (b * p)).norm(), 1e-9);
  }
}

TEST(RigidTransform, InverseComposesToIdentity) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 100; ++i) {
    const RigidTransform a(random_quat(rng), Vec3(u(rng), u(rng), u(rng)), FrameId::imu(), FrameId::radar(0));
    const RigidTransform id = a.inverse() * a;
    EXPECT_TRUE(id.matrix().isApprox(Eigen::Matrix4d::Identity(), 1e-9));
    EXPECT_EQ(id.target, FrameId::radar(0));
  }
}

TEST(RigidTransform, CompositionIsAssociative) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 100; ++i) {
    const RigidTransform a(random_quat(rng), Vec3(u(rng), u(rng), u(rng)), FrameId::global(), FrameId::imu());
    const RigidTransform b(random_quat(rng), Vec3(u(rng), u(rng), u(rng)), FrameId::imu(), FrameId::radar(0));
    const RigidTransform c(random_quat(rng), Vec3(u(rng), u(rng), u(rng)), FrameId::radar(0), FrameId::radar(2));
    EXPECT_TRUE(((a * b) * c).matrix().isApprox((a * (b * c)).matrix(), 1e-9));
  }
}

TEST(RigidTransform, MismatchedFramesThrow) {
  const RigidTransform a(Quat::Identity(), Vec3::Zero(), FrameId::global(), FrameId::imu());
  const RigidTransform b(Quat::Identity(), Vec3::Zero(), FrameId::radar(0), FrameId::radar(1));
  EXPECT_THROW(a * b, std::invalid_argument);
}

TEST(Yaw, RoundTrip) {
  for (double y : {-3.0, -1.0, 0.0, 0.5, 3.1}) EXPECT_NEAR(yaw_of(yaw_quat(y)), y, 1e-12);
}
