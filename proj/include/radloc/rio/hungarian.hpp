#pragma once

#include <Eigen/Core>

#include <vector>

namespace radloc::rio {

/// Minimum-cost one-to-one assignment on a rectangular cost matrix
/// (Kuhn-Munkres with shortest augmenting paths, O(n^2 m)). Returns, for each
/// row, the assigned column or -1. Every row is assigned when rows <= cols,
/// every column when cols < rows.
std::vector<int> hungarian_assign(const Eigen::MatrixXd& cost);

}  // namespace radloc::rio
