#include "radloc/rio/landmark_tracker.hpp"

#include "radloc/rio/factors.hpp"
#include "radloc/rio/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace radloc::rio {
namespace {

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

Association associate_landmarks(std::span<const Vec3> dets, std::span<const Vec3> lms, double L,
                                double gate) {
  Association out;
  const int nd = static_cast<int>(dets.size());
  const int nl = static_cast<int>(lms.size());

  std::vector<double> det_range(nd), det_bearing(nd), lm_range(nl), lm_bearing(nl);
  std::vector<char> det_ok(nd), lm_ok(nl);
  for (int i = 0; i < nd; ++i) {
    det_ok[i] = has_bearing(dets[i]);
    det_range[i] = dets[i].norm();
    det_bearing[i] = det_ok[i] ? atan2_bearing(dets[i]) : 0.0;
  }
  for (int j = 0; j < nl; ++j) {
    lm_ok[j] = has_bearing(lms[j]);
    lm_range[j] = lms[j].norm();
    lm_bearing[j] = lm_ok[j] ? atan2_bearing(lms[j]) : 0.0;
  }

  struct Candidate {
    int d, l;
    double cost;
  };
  std::vector<Candidate> cands;
  for (int i = 0; i < nd; ++i) {
    if (!det_ok[i]) continue;
    for (int j = 0; j < nl; ++j) {
      if (!lm_ok[j]) continue;
      const double dr = det_range[i] - lm_range[j];
      if (std::abs(dr) > gate) continue;
      const double dphi = wrap_angle(det_bearing[i] - lm_bearing[j]);
      const double c = std::sqrt(L * L * dphi * dphi + dr * dr);
      if (c <= gate) cands.push_back({i, j, c});
    }
  }

  // Components of the gated bipartite graph (detections 0..nd-1, landmarks nd..).
  DisjointSet ds(nd + nl);
  for (const Candidate& c : cands) ds.unite(c.d, nd + c.l);

  std::vector<char> det_matched(nd, 0);
  std::vector<int> comp_of(nd + nl, -1);
  std::vector<std::vector<Candidate>> comp_cands;
  for (const Candidate& c : cands) {
    const int root = ds.find(c.d);
    if (comp_of[root] < 0) {
      comp_of[root] = static_cast<int>(comp_cands.size());
      comp_cands.emplace_back();
    }
    comp_cands[comp_of[root]].push_back(c);
  }

  constexpr double kForbidden = 1e9;
  for (const auto& cc : comp_cands) {
    std::vector<int> d_ids, l_ids;
    for (const Candidate& c : cc) {
      d_ids.push_back(c.d);
      l_ids.push_back(c.l);
    }
    std::sort(d_ids.begin(), d_ids.end());
    d_ids.erase(std::unique(d_ids.begin(), d_ids.end()), d_ids.end());
    std::sort(l_ids.begin(), l_ids.end());
    l_ids.erase(std::unique(l_ids.begin(), l_ids.end()), l_ids.end());

    if (d_ids.size() == 1 && l_ids.size() == 1) {
      out.matches.push_back({d_ids[0], l_ids[0], cc.front().cost});
      det_matched[d_ids[0]] = 1;
      continue;
    }
    Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(d_ids.size(), l_ids.size(), kForbidden);
    for (const Candidate& c : cc) {
      const auto r = std::lower_bound(d_ids.begin(), d_ids.end(), c.d) - d_ids.begin();
      const auto k = std::lower_bound(l_ids.begin(), l_ids.end(), c.l) - l_ids.begin();
      cost(r, k) = c.cost;
    }
    const std::vector<int> assignment = hungarian_assign(cost);
    for (size_t r = 0; r < assignment.size(); ++r) {
      const int k = assignment[r];
      if (k < 0 || cost(r, k) > gate) continue;
      out.matches.push_back({d_ids[r], l_ids[k], cost(r, k)});
      det_matched[d_ids[r]] = 1;
    }
  }
  std::sort(out.matches.begin(), out.matches.end(),
            [](const LandmarkMatch& a, const LandmarkMatch& b) { return a.detection < b.detection; });
  for (int i = 0; i < nd; ++i) {
    if (!det_matched[i]) out.unmatched_detections.push_back(i);
  }
  return out;
}

void LandmarkTracker::prune(double now) {
  std::erase_if(landmarks_, [&](const Landmark& l) { return now - l.t_last > params_.staleness; });
}

std::vector<ActiveMatch> LandmarkTracker::update(const Association& assoc, std::span<const Vec3> dets,
                                                 const Quat& q_OI, const Vec3& t_OI, double now) {
  std::vector<ActiveMatch> active;
  for (const LandmarkMatch& m : assoc.matches) {
    Landmark& l = landmarks_.at(m.landmark);
    const int previous = l.n_obs;
    l.n_obs += 1;
    l.max_err = std::max(l.max_err, m.distance);
    l.t_last = now;
    if (previous > params_.n_obs_min && l.max_err < params_.max_err_max) {
      active.push_back({m.detection, l.id, l.p_O});
    }
  }
  for (int idx : assoc.unmatched_detections) {
    const Vec3& p = dets[idx];
    if (p.norm() > params_.max_range) continue;
    Landmark l;
    l.id = next_id_++;
    l.p_O = t_OI + q_OI * p;
    l.n_obs = 1;
    l.max_err = 0.0;
    l.t_last = now;
    landmarks_.push_back(l);
  }
  return active;
}

std::vector<ActiveMatch> LandmarkTracker::process(std::span<const Vec3> dets, const Quat& q_OI,
                                                  const Vec3& t_OI, double now) {
  prune(now);
  std::vector<Vec3> projected;
  projected.reserve(landmarks_.size());
  const Quat q_IO = q_OI.conjugate();
  for (const Landmark& l : landmarks_) projected.push_back(q_IO * (l.p_O - t_OI));
  const Association assoc = associate_landmarks(dets, projected, params_.bearing_weight, params_.gate);
  return update(assoc, dets, q_OI, t_OI, now);
}

}  // namespace radloc::rio
