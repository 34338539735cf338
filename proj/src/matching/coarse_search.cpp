#include "radloc/matching/coarse_search.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace radloc::matching {

void SearchSpec::validate() const {
  if (!(yaw_range >= 0.0 && yaw_range <= kPi)) throw std::invalid_argument("search.yaw_range must lie in [0, pi]");
  if (!(translation_range >= 0.0)) throw std::invalid_argument("search.translation_range must be non-negative");
  if (!(yaw_step > 0.0)) throw std::invalid_argument("search.yaw_step must be positive");
  if (levels < 1 || levels > 12) throw std::invalid_argument("search.levels must lie in [1, 12]");
  if (k < 1) throw std::invalid_argument("search.k must be positive");
}

namespace {

struct Lattice {
  int yaw_half = 0;
  int trans_half = 0;
  std::vector<double> yaws;
  std::vector<std::vector<Cell2>> base;  // per yaw: cell of each rotated query point at zero offset
};

Lattice make_lattice(std::span<const Vec2> query, const PyramidMap& map, const SearchSpec& spec,
                     const Pose2& prior) {
  Lattice L;
  L.yaw_half = static_cast<int>(std::floor(spec.yaw_range / spec.yaw_step + 1e-9));
  L.trans_half = static_cast<int>(std::lround(spec.translation_range / map.resolution()));
  for (int a = -L.yaw_half; a <= L.yaw_half; ++a) {
    const Pose2 T{prior.x, prior.y, prior.yaw + a * spec.yaw_step};
    L.yaws.push_back(T.yaw);
    std::vector<Cell2> cells;
    cells.reserve(query.size());
    for (const Vec2& p : query) cells.push_back(map.cell_of(T.apply(p)));
    L.base.push_back(std::move(cells));
  }
  return L;
}

int lattice_score(const std::vector<Cell2>& base, const PyramidMap& map, int level, int ix, int iy) {
  int n = 0;
  for (const Cell2& c : base) n += map.marked(level, c.x() + ix, c.y() + iy) ? 1 : 0;
  return n;
}

Candidate make_candidate(const Lattice& L, const PyramidMap& map, const Pose2& prior, int ya, int ix, int iy,
                         int score) {
  Candidate c;
  c.yaw_index = ya - L.yaw_half;
  c.ix = ix;
  c.iy = iy;
  c.score = score;
  c.pose = {prior.x + ix * map.resolution(), prior.y + iy * map.resolution(), L.yaws[ya]};
  return c;
}

// Orders candidates best first: score descending, then lattice key ascending.
bool better(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  return std::tie(a.yaw_index, a.ix, a.iy) < std::tie(b.yaw_index, b.ix, b.iy);
}

void keep_top(std::vector<Candidate>& top, const Candidate& c, int k) {
  const auto it = std::lower_bound(top.begin(), top.end(), c, better);
  top.insert(it, c);
  if (static_cast<int>(top.size()) > k) top.pop_back();
}

}  // namespace

SearchResult coarse_search(std::span<const Vec2> query, const PyramidMap& map, const SearchSpec& spec,
                           const Pose2& prior) {
  spec.validate();
  SearchResult res;
  if (query.empty()) {
    res.empty_query = true;
    return res;
  }
  const Lattice L = make_lattice(query, map, spec, prior);
  const int top_level = std::min(spec.levels, map.levels()) - 1;
  const int W = L.trans_half;

  struct Node {
    int bound;
    int ya, ix, iy, level;
  };
  // Max-heap on bound, then smallest lattice key first.
  const auto worse = [&](const Node& a, const Node& b) {
    if (a.bound != b.bound) return a.bound < b.bound;
    return std::tie(a.ya, a.ix, a.iy, a.level) > std::tie(b.ya, b.ix, b.iy, b.level);
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);

  const int block = 1 << top_level;
  for (int ya = 0; ya < static_cast<int>(L.yaws.size()); ++ya) {
    for (int ix = -W; ix <= W; ix += block) {
      for (int iy = -W; iy <= W; iy += block) {
        const int b = lattice_score(L.base[ya], map, top_level, ix, iy);
        ++res.bound_evaluations;
        if (top_level == 0) ++res.level0_evaluations;
        open.push({b, ya, ix, iy, top_level});
      }
    }
  }

  std::vector<Candidate> top;
  const int k = spec.k;
  // A node can still contribute while its bound beats the k-th best, or ties
  // it with a smaller lattice key.
  const auto admits = [&](const Node& n) {
    if (static_cast<int>(top.size()) < k) return true;
    const Candidate& worst = top.back();
    if (n.bound != worst.score) return n.bound > worst.score;
    return std::make_tuple(n.ya - L.yaw_half, n.ix, n.iy) < std::tie(worst.yaw_index, worst.ix, worst.iy);
  };

  while (!open.empty()) {
    const Node n = open.top();
    open.pop();
    if (!admits(n)) {
      if (static_cast<int>(top.size()) >= k && n.bound < top.back().score) break;
      continue;
    }
    if (n.level == 0) {
      keep_top(top, make_candidate(L, map, prior, n.ya, n.ix, n.iy, n.bound), k);
      continue;
    }
    const int h = 1 << (n.level - 1);
    for (int dx = 0; dx < 2; ++dx) {
      for (int dy = 0; dy < 2; ++dy) {
        const int cx = n.ix + dx * h;
        const int cy = n.iy + dy * h;
        if (cx > W || cy > W) continue;
        const Node c{lattice_score(L.base[n.ya], map, n.level - 1, cx, cy), n.ya, cx, cy, n.level - 1};
        ++res.bound_evaluations;
        if (c.level == 0) ++res.level0_evaluations;
        if (admits(c)) open.push(c);
      }
    }
  }
  res.candidates = std::move(top);
  return res;
}

SearchResult exhaustive_search(std::span<const Vec2> query, const PyramidMap& map, const SearchSpec& spec,
                               const Pose2& prior) {
  spec.validate();
  SearchResult res;
  if (query.empty()) {
    res.empty_query = true;
    return res;
  }
  const Lattice L = make_lattice(query, map, spec, prior);
  const int W = L.trans_half;
  std::vector<Candidate> top;
  for (int ya = 0; ya < static_cast<int>(L.yaws.size()); ++ya) {
    for (int ix = -W; ix <= W; ++ix) {
      for (int iy = -W; iy <= W; ++iy) {
        const int s = lattice_score(L.base[ya], map, 0, ix, iy);
        ++res.level0_evaluations;
        keep_top(top, make_candidate(L, map, prior, ya, ix, iy, s), spec.k);
      }
    }
  }
  res.bound_evaluations = res.level0_evaluations;
  res.candidates = std::move(top);
  return res;
}

}  // namespace radloc::matching
