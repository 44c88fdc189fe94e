#ifndef MARKPER_LINPROG_HPP
#define MARKPER_LINPROG_HPP

#include <vector>

namespace markper::lp {

enum class Status { kOptimal, kInfeasible, kUnbounded };

// max c.x  subject to  A x = b, x >= 0.  A is dense row-major, rows x cols.
// Row count stays tiny here (at most simplex dimension + 1), column count can
// reach the grid size, so the tableau is kept row-major and pivots touch whole
// rows.
struct Problem {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;  // rows*cols
  std::vector<double> b;  // rows
  std::vector<double> c;  // cols

  double& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

struct Solution {
  Status status = Status::kInfeasible;
  std::vector<double> x;
  double objective = 0.0;
  double infeasibility = 0.0;  // phase-one residual (sum of artificials)
};

// Two-phase primal simplex, Bland's rule on both phases (deterministic and
// cycle-free). Redundant rows are dropped after phase one, so rank-deficient
// constraint sets (the simplex sum row is dependent on the coordinate rows)
// are handled without special-casing.
Solution solve(const Problem& problem, double feas_tol = 1e-9);

}  // namespace markper::lp

#endif
