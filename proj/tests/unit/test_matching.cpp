#include "radloc/matching/matcher.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace radloc;
using namespace radloc::matching;

namespace {

// Random wall segments on the 0.2 m lattice, one point per cell.
std::vector<Vec2> structured_map(std::mt19937_64& rng, int walls, double extent) {
  std::uniform_real_distribution<double> u(-extent, extent), a(-kPi, kPi), len(2.0, 8.0);
  std::set<std::pair<int, int>> cells;
  for (int w = 0; w < walls; ++w) {
    const Vec2 s(u(rng), u(rng));
    const double th = a(rng), L = len(rng);
    for (double t = 0; t < L; t += 0.1) {
      const Vec2 p = s + t * Vec2(std::cos(th), std::sin(th));
      cells.insert({int(std::floor(p.x() / 0.2)), int(std::floor(p.y() / 0.2))});
    }
  }
  std::vector<Vec2> pts;
  for (const auto& [x, y] : cells) pts.emplace_back((x + 0.5) * 0.2, (y + 0.5) * 0.2);
  return pts;
}

std::vector<Vec2> transformed(const std::vector<Vec2>& pts, const Pose2& T) {
  std::vector<Vec2> out;
  for (const Vec2& p : pts) out.push_back(T.apply(p));
  return out;
}

std::vector<Vec2> subset(std::mt19937_64& rng, const std::vector<Vec2>& pts, std::size_t n) {
  std::vector<Vec2> s = pts;
  std::shuffle(s.begin(), s.end(), rng);
  s.resize(std::min(n, s.size()));
  return s;
}

// Score by definition: points within d of any map point, after snapping to the lookup cell center.
int brute_score(const std::vector<Vec2>& query, const std::vector<Vec2>& map, const Pose2& T, double res, double d) {
  int n = 0;
  for (const Vec2& q : query) {
    const Vec2 p = T.apply(q);
    const Vec2 c((std::floor(p.x() / res) + 0.5) * res, (std::floor(p.y() / res) + 0.5) * res);
    for (const Vec2& m : map) {
      if ((m - c).norm() <= d) {
        ++n;
        break;
      }
    }
  }
  return n;
}

mapping::GlobalMap as_global(const std::vector<Vec2>& pts) {
  mapping::GlobalMap m(0.2, Vec3::Zero(), 80);
  for (const Vec2& p : pts) m.add_cell({int(std::floor(p.x() / 0.2)), int(std::floor(p.y() / 0.2)), 0});
  return m;
}

std::vector<Vec3> lift(const std::vector<Vec2>& pts) {
  std::vector<Vec3> out;
  for (const Vec2& p : pts) out.emplace_back(p.x(), p.y(), 0.1);
  return out;
}

}  // namespace

TEST(Pose2, ComposeAndInverse) {
  const Pose2 a{1.0, -2.0, 0.7}, b{0.3, 0.4, -2.0};
  const Vec2 p(3, 4);
  EXPECT_LT((a.compose(b).apply(p) - a.apply(b.apply(p))).norm(), 1e-12);
  EXPECT_LT((a.inverse().apply(a.apply(p)) - p).norm(), 1e-12);
}

TEST(Score, Examples) {
  std::mt19937_64 rng(1);
  const auto map = structured_map(rng, 20, 15);
  const PyramidMap pm(map, 0.2, 0.3, 4);
  EXPECT_EQ(score_alignment(map, pm, Pose2{}), static_cast<int>(map.size()));
  EXPECT_EQ(score_alignment(std::vector<Vec2>{}, pm, Pose2{}), 0);
  // Every point moved 10 d away from all map points.
  std::vector<Vec2> far;
  for (const Vec2& p : map) far.push_back(p + Vec2(100.0, 0.0));
  EXPECT_EQ(score_alignment(far, pm, Pose2{}), 0);
}

TEST(Score, MatchesDirectEvaluation) {
  std::mt19937_64 rng(2);
  const auto map = structured_map(rng, 15, 10);
  const PyramidMap pm(map, 0.2, 0.3, 4);
  std::uniform_real_distribution<double> u(-2, 2), a(-0.5, 0.5);
  const auto q = subset(rng, map, 80);
  for (int t = 0; t < 200; ++t) {
    const Pose2 T{u(rng), u(rng), a(rng)};
    EXPECT_EQ(score_alignment(q, pm, T), brute_score(q, map, T, 0.2, 0.3));
  }
}

TEST(Score, ConjugationInvariance) {
  // The lookup lattice is axis aligned, so invariance is exact for lattice
  // symmetries: quarter turns about the origin and whole-cell shifts.
  std::mt19937_64 rng(3);
  const auto map = structured_map(rng, 15, 10);
  const auto q = subset(rng, map, 60);
  const PyramidMap pm(map, 0.2, 0.3, 3);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_int_distribution<int> cell(-50, 50), quarter(0, 3);
  for (int t = 0; t < 100; ++t) {
    const Pose2 G{0.2 * cell(rng), 0.2 * cell(rng), quarter(rng) * kPi / 2};
    const Pose2 T{u(rng), u(rng), 0.3 * u(rng)};
    const PyramidMap pg(transformed(map, G), 0.2, 0.3, 3);
    // Map -> G map, query unchanged, alignment -> G T.
    EXPECT_EQ(score_alignment(q, pm, T), score_alignment(q, pg, G.compose(T)));
  }
}

TEST(Pyramid, SinglePointDilation) {
  const Vec2 p(1.13, -0.47);
  const PyramidMap pm(std::vector<Vec2>{p}, 0.2, 0.3, 4);
  std::set<std::pair<int, int>> base;
  for (int x = -20; x < 20; ++x)
    for (int y = -20; y < 20; ++y)
      if ((Vec2((x + 0.5) * 0.2, (y + 0.5) * 0.2) - p).norm() <= 0.3) base.insert({x, y});
  ASSERT_FALSE(base.empty());
  for (int n = 0; n < 4; ++n) {
    const int s = 1 << n;
    for (int x = -20; x < 20; ++x) {
      for (int y = -20; y < 20; ++y) {
        bool expect = false;
        for (const auto& [bx, by] : base) expect |= bx - x >= 0 && bx - x < s && by - y >= 0 && by - y < s;
        EXPECT_EQ(pm.marked(n, x, y), expect) << n << " " << x << " " << y;
      }
    }
  }
}

TEST(Pyramid, LevelBoundIsAdmissible) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-10, 10), a(-kPi, kPi);
  std::vector<Vec2> map;
  for (int i = 0; i < 200; ++i) map.emplace_back(u(rng), u(rng));
  const PyramidMap pm(map, 0.2, 0.3, 4);
  const auto q = subset(rng, map, 50);
  int violations = 0;
  for (int t = 0; t < 500; ++t) {
    const Pose2 T{u(rng) * 0.2, u(rng) * 0.2, a(rng)};
    std::vector<Cell2> cells;
    for (const Vec2& p : q) cells.push_back(pm.cell_of(T.apply(p)));
    for (int n = 1; n < 4; ++n) {
      int bound = 0;
      for (const Cell2& c : cells) bound += pm.marked(n, c.x(), c.y());
      const int s = 1 << n;
      for (int dx = 0; dx < s; ++dx) {
        for (int dy = 0; dy < s; ++dy) {
          int exact = 0;
          for (const Cell2& c : cells) exact += pm.marked(0, c.x() + dx, c.y() + dy);
          violations += exact > bound;
        }
      }
    }
  }
  EXPECT_EQ(violations, 0);
}

TEST(Pyramid, OneLevelIsDirectScoring) {
  std::mt19937_64 rng(5);
  const auto map = structured_map(rng, 10, 8);
  const auto q = subset(rng, map, 50);
  const PyramidMap one(map, 0.2, 0.3, 1);
  EXPECT_EQ(one.levels(), 1);
  SearchSpec s{0.05, 0.6, deg2rad(1.0), 1, 3};
  const Pose2 prior{0.1, -0.2, 0.0};
  const SearchResult a = coarse_search(q, one, s, prior);
  const SearchResult b = exhaustive_search(q, one, s, prior);
  ASSERT_TRUE(a.ok());
  EXPECT_EQ(a.candidates.front().score, b.candidates.front().score);
  EXPECT_EQ(a.level0_evaluations, b.level0_evaluations);
}

TEST(CoarseSearch, RecoversKnownTranslation) {
  std::mt19937_64 rng(6);
  const auto map = structured_map(rng, 25, 15);
  const PyramidMap pm(map, 0.2, 0.3, 4);
  const auto q = transformed(subset(rng, map, 100), Pose2{1.0, 0.0, 0.0});
  SearchSpec s = SearchSpec::tracking();
  s.translation_range = 2.0;
  const SearchResult r = coarse_search(q, pm, s, Pose2{});
  ASSERT_TRUE(r.ok());
  const Pose2& best = r.candidates.front().pose;
  EXPECT_NEAR(best.x, -1.0, 0.2 + 1e-9);
  EXPECT_NEAR(best.y, 0.0, 0.2 + 1e-9);
  EXPECT_NEAR(best.yaw, 0.0, deg2rad(1.0) + 1e-9);
}

TEST(CoarseSearch, MatchesExhaustiveLattice) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 25; ++t) {
    const auto map = structured_map(rng, 12, 8);
    const PyramidMap pm(map, 0.2, 0.3, 4);
    const Pose2 truth{0.8 * u(rng), 0.8 * u(rng), 0.15 * u(rng)};
    const auto q = transformed(subset(rng, map, 100), truth.inverse());
    const SearchSpec s{deg2rad(10.0), 1.2, deg2rad(1.0), 4, 5};
    const Pose2 prior{0.05 * u(rng), 0.05 * u(rng), 0.02 * u(rng)};
    const SearchResult a = coarse_search(q, pm, s, prior);
    const SearchResult b = exhaustive_search(q, pm, s, prior);
    ASSERT_TRUE(a.ok());
    ASSERT_EQ(a.candidates.size(), b.candidates.size());
    for (size_t i = 0; i < a.candidates.size(); ++i) {
      EXPECT_EQ(a.candidates[i].score, b.candidates[i].score);
      EXPECT_EQ(a.candidates[i].yaw_index, b.candidates[i].yaw_index);
      EXPECT_EQ(a.candidates[i].ix, b.candidates[i].ix);
      EXPECT_EQ(a.candidates[i].iy, b.candidates[i].iy);
    }
    EXPECT_LT(a.level0_evaluations, b.level0_evaluations);
    // Candidate scores are exact.
    for (const Candidate& c : a.candidates) EXPECT_EQ(c.score, score_alignment(q, pm, c.pose));
  }
}

TEST(CoarseSearch, TrackingNeedsFarFewerEvaluations) {
  std::mt19937_64 rng(8);
  const auto map = structured_map(rng, 40, 20);
  const PyramidMap pm(map, 0.2, 0.3, 4);
  const Pose2 truth{0.4, -0.6, 0.1};
  const auto q = transformed(subset(rng, map, 150), truth.inverse());
  const SearchResult full = coarse_search(q, pm, SearchSpec::full(), truth);
  const SearchResult track = coarse_search(q, pm, SearchSpec::tracking(), truth);
  ASSERT_TRUE(full.ok());
  ASSERT_TRUE(track.ok());
  EXPECT_EQ(full.candidates.front().score, track.candidates.front().score);
  EXPECT_NEAR(track.candidates.front().pose.x, truth.x, 0.2 + 1e-9);
  EXPECT_NEAR(track.candidates.front().pose.y, truth.y, 0.2 + 1e-9);
  // Branch and bound descends straight to the optimum in both cases, so the
  // work shows up in the scorings at every level rather than at level 0.
  EXPECT_GE(full.bound_evaluations, 10 * track.bound_evaluations);
}

TEST(CoarseSearch, EmptyQuery) {
  const PyramidMap pm(std::vector<Vec2>{Vec2(0, 0)}, 0.2, 0.3, 2);
  const SearchResult r = coarse_search(std::vector<Vec2>{}, pm, SearchSpec::tracking(), Pose2{});
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(r.empty_query);
}

TEST(FitRigid, ExactForNoiseFreePairs) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-10, 10);
  const Pose2 T{1.5, -0.3, 2.5};
  std::vector<Vec2> src;
  for (int i = 0; i < 20; ++i) src.emplace_back(u(rng), u(rng));
  const Pose2 e = fit_rigid_2d(src, transformed(src, T));
  EXPECT_NEAR(e.x, T.x, 1e-10);
  EXPECT_NEAR(e.y, T.y, 1e-10);
  EXPECT_NEAR(wrap_angle(e.yaw - T.yaw), 0.0, 1e-12);
}

TEST(NearestNeighbor, MatchesLinearScan) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<Vec2> pts;
  for (int i = 0; i < 300; ++i) pts.emplace_back(u(rng), u(rng));
  const NearestNeighbor2 nn(pts, 0.7);
  for (int t = 0; t < 500; ++t) {
    const Vec2 p(u(rng) * 1.2, u(rng) * 1.2);
    int best = -1;
    double bd = 0.7;
    for (int i = 0; i < 300; ++i) {
      const double d = (pts[i] - p).norm();
      if (d < bd || (d == bd && best < 0)) {
        bd = d;
        best = i;
      }
    }
    EXPECT_EQ(nn.nearest(p, 0.7), best);
  }
}

TEST(Icp, AlreadyAligned) {
  std::mt19937_64 rng(11);
  const auto map = structured_map(rng, 20, 10);
  const IcpResult r = icp_refine(map, map, Pose2{}, IcpParams{});
  ASSERT_TRUE(r.ok);
  EXPECT_LE(r.iterations, 1);
  EXPECT_LT(std::hypot(r.pose.x, r.pose.y), 1e-12);
  EXPECT_LT(std::abs(r.pose.yaw), 1e-12);
  EXPECT_NEAR(r.mean_residual, 0.0, 1e-12);
}

TEST(Icp, RecoversSmallPerturbation) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 10; ++t) {
    const auto map = structured_map(rng, 25, 12);
    const Pose2 P{0.15, 0.1, deg2rad(2.0)};
    const auto query = transformed(map, P);
    IcpParams ip;
    ip.tolerance = 1e-9;
    ip.max_iterations = 100;
    const IcpResult r = icp_refine(query, map, Pose2{}, ip);
    ASSERT_TRUE(r.ok);
    const Pose2 inv = P.inverse();
    EXPECT_LT(std::hypot(r.pose.x - inv.x, r.pose.y - inv.y), 1e-3);
    EXPECT_LT(std::abs(wrap_angle(r.pose.yaw - inv.yaw)), deg2rad(0.05));
    for (size_t k = 1; k < r.residual_history.size(); ++k) {
      EXPECT_LE(r.residual_history[k], r.residual_history[k - 1]);
    }
  }
}

TEST(Icp, ResidualNeverIncreasesFromRoughStarts) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto map = structured_map(rng, 30, 12);
  for (int t = 0; t < 50; ++t) {
    const auto q = subset(rng, map, 120);
    const IcpResult r = icp_refine(q, map, Pose2{0.5 * u(rng), 0.5 * u(rng), 0.1 * u(rng)}, IcpParams{});
    for (size_t k = 1; k < r.residual_history.size(); ++k) EXPECT_LE(r.residual_history[k], r.residual_history[k - 1]);
  }
}

TEST(Icp, ZeroOverlapFails) {
  std::mt19937_64 rng(14);
  const auto map = structured_map(rng, 10, 5);
  const auto far = transformed(map, Pose2{500, 0, 0});
  EXPECT_FALSE(icp_refine(far, map, Pose2{}, IcpParams{}).ok);
}

class MatcherTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::mt19937_64 rng(15);
    pts = structured_map(rng, 60, 25);
    map = as_global(pts);
    MatcherParams p;
    p.timing = false;
    matcher = std::make_unique<Matcher>(map, p);
    // Query: the map around (3, 2) seen from a robot at (3, 2, 0.3) with odometry = truth.
    for (const Vec2& m : pts)
      if ((m - Vec2(3, 2)).norm() < 20) query.push_back(Vec3(m.x(), m.y(), 0.1));
  }
  std::vector<Vec2> pts;
  mapping::GlobalMap map;
  std::unique_ptr<Matcher> matcher;
  std::vector<Vec3> query;
  const Pose2 robot{3, 2, 0.3};
};

TEST_F(MatcherTest, FirstCallIsFullThenTracking) {
  EXPECT_EQ(matcher->next_mode(), MatchMode::Full);
  const MatchResult a = matcher->match(0.0, query, robot, Pose2{3.5, 1.6, 0.35});
  EXPECT_EQ(a.mode, MatchMode::Full);
  ASSERT_TRUE(a.success);
  EXPECT_NEAR(a.pose.x, 3.0, 1e-3);
  EXPECT_NEAR(a.pose.y, 2.0, 1e-3);
  EXPECT_NEAR(a.pose.yaw, 0.3, deg2rad(0.05));
  EXPECT_EQ(matcher->next_mode(), MatchMode::Tracking);
  const MatchResult b = matcher->match(1.0, query, robot);
  EXPECT_EQ(b.mode, MatchMode::Tracking);
  EXPECT_TRUE(b.success);
  EXPECT_EQ(matcher->next_mode(), MatchMode::Tracking);
  EXPECT_LT(b.evaluations * 10, a.evaluations);
}

TEST_F(MatcherTest, ReportedScoreIsAFreshEvaluation) {
  const MatchResult a = matcher->match(0.0, query, robot, robot);
  const auto q = matcher->robot_frame_query(query, robot);
  EXPECT_EQ(a.query_points, static_cast<int>(q.size()));
  std::vector<Vec2> map2;
  for (const Vec3& p : map.all_points()) map2.emplace_back(p.x(), p.y());
  const PyramidMap fresh(map2, 0.2, 0.3, 1);
  EXPECT_EQ(a.score, score_alignment(q, fresh, a.pose));
  EXPECT_EQ(a.success, a.score >= 0.35 * a.query_points);
}

TEST_F(MatcherTest, LowScoreFallsBackToFull) {
  matcher->force_mode(MatchMode::Tracking);
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(-15, 15);
  std::vector<Vec3> noise;
  for (int i = 0; i < 300; ++i) noise.emplace_back(3 + u(rng), 2 + u(rng), 0.0);
  const MatchResult r = matcher->match(0.0, noise, robot, robot);
  EXPECT_EQ(r.mode, MatchMode::Tracking);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(matcher->next_mode(), MatchMode::Full);
}

TEST_F(MatcherTest, NoChunksNearPriorIsUnavailable) {
  const MatchResult r = matcher->match(0.0, query, robot, Pose2{1000, 1000, 0});
  EXPECT_FALSE(r.available);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(matcher->next_mode(), MatchMode::Full);
}

TEST_F(MatcherTest, QueryIsDedupedPerCell) {
  std::vector<Vec3> stacked;
  for (int z = 0; z < 5; ++z) stacked.emplace_back(1.05, 1.05, 0.2 * z);
  EXPECT_EQ(matcher->robot_frame_query(stacked, Pose2{}).size(), 1u);
}
