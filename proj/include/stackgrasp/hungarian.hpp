#pragma once

#include <vector>

#include <Eigen/Core>

namespace stackgrasp {

struct Assignment {
  // row_to_col[r] is the column assigned to row r, or -1.
  std::vector<int> row_to_col;
  double total_cost = 0.0;
};

// Minimum-cost assignment of a rectangular cost matrix (Kuhn-Munkres with
// potentials, O(n^2 m)). Exactly min(rows, cols) pairs are produced. Costs
// must be finite.
Assignment solve_assignment(const Eigen::MatrixXd &cost);

}  // namespace stackgrasp
