#pragma once

#include "radloc/matching/pyramid.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace radloc::matching {

struct SearchSpec {
  double yaw_range = kPi / 2.0;       // half range, rad
  double translation_range = 5.0;     // half range, m
  double yaw_step = deg2rad(1.0);
  int levels = 4;                     // pyramid levels used
  int k = 8;                          // candidates returned

  static SearchSpec full() { return {}; }
  static SearchSpec tracking() { return {kPi / 4.0, 1.0, deg2rad(1.0), 4, 8}; }
  void validate() const;
};

/// One lattice alignment. Offsets are in lattice units relative to the prior.
struct Candidate {
  Pose2 pose;
  int score = 0;
  int yaw_index = 0;
  int ix = 0;
  int iy = 0;
};

struct SearchResult {
  std::vector<Candidate> candidates;  // best first, at most k
  std::int64_t level0_evaluations = 0;
  std::int64_t bound_evaluations = 0;
  bool empty_query = false;

  bool ok() const { return !candidates.empty(); }
};

/// coarse_search: best-first branch and bound over the (x, y, yaw) lattice
/// centered on `prior`, using the pyramid levels as admissible bounds.
/// Query points are in the robot frame; a lattice pose maps them to the map.
/// The first candidate is the exact lattice optimum; ties break toward the
/// smallest (yaw index, ix, iy).
SearchResult coarse_search(std::span<const Vec2> query, const PyramidMap& map, const SearchSpec& spec,
                           const Pose2& prior);

/// Scores every lattice alignment at level 0. Reference for coarse_search.
SearchResult exhaustive_search(std::span<const Vec2> query, const PyramidMap& map, const SearchSpec& spec,
                               const Pose2& prior);

}  // namespace radloc::matching
