#include "stackgrasp/hungarian.hpp"

#include <limits>

#include "stackgrasp/error.hpp"

namespace stackgrasp {

namespace {

// Rows <= cols. 1-based arrays with a virtual column 0, following the
// shortest augmenting path formulation with dual potentials u, v.
std::vector<int> assign_rows(const Eigen::MatrixXd &a) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

Assignment solve_assignment(const Eigen::MatrixXd &cost) {
  if (!cost.allFinite()) {
    throw Error(ErrorKind::kInvalidArgument, "assignment costs must be finite");
  }
  Assignment out;
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  out.row_to_col.assign(rows, -1);
  if (rows == 0 || cols == 0) return out;
  if (rows <= cols) {
    out.row_to_col = assign_rows(cost);
  } else {
    const std::vector<int> col_to_row = assign_rows(cost.transpose());
    for (int c = 0; c < cols; ++c) out.row_to_col[col_to_row[c]] = c;
  }
  for (int r = 0; r < rows; ++r) {
    if (out.row_to_col[r] >= 0) out.total_cost += cost(r, out.row_to_col[r]);
  }
  return out;
}

}  // namespace stackgrasp
