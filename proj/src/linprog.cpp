#include "markper/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace markper::lp {

namespace {

constexpr double kPivotTol = 1e-11;

// Tableau rows are [structural columns | rhs]. The objective row carries
// reduced costs in the same layout, with the current objective value in the
// rhs slot.
struct Tableau {
  int rows;
  int cols;  // structural columns (without rhs)
  std::vector<std::vector<double>> t;
  std::vector<double> z;
  std::vector<int> basis;

  double& rhs(int i) { return t[i][cols]; }

  void pivot(int pr, int pc) {
    const double piv = t[pr][pc];
    for (double& v : t[pr]) v /= piv;
    t[pr][pc] = 1.0;  // kill roundoff on the pivot itself
    for (int i = 0; i < rows; ++i) {
      if (i == pr) continue;
      const double f = t[i][pc];
      if (f == 0.0) continue;
      for (int j = 0; j <= cols; ++j) t[i][j] -= f * t[pr][j];
      t[i][pc] = 0.0;
    }
    const double f = z[pc];
    if (f != 0.0) {
      for (int j = 0; j <= cols; ++j) z[j] -= f * t[pr][j];
      z[pc] = 0.0;
    }
    basis[pr] = pc;
  }

  // Bland: smallest improving column, smallest basic variable on ratio ties.
  // Returns false at optimality, throws never; unbounded reported via flag.
  bool step(bool& unbounded) {
    int enter = -1;
    for (int j = 0; j < cols; ++j) {
      if (z[j] > kPivotTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) return false;
    int leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < rows; ++i) {
      if (t[i][enter] <= kPivotTol) continue;
      const double r = rhs(i) / t[i][enter];
      if (r < best - 1e-15 ||
          (r <= best + 1e-15 && (leave < 0 || basis[i] < basis[leave]))) {
        best = r;
        leave = i;
      }
    }
    if (leave < 0) {
      unbounded = true;
      return false;
    }
    pivot(leave, enter);
    return true;
  }
};

}  // namespace

Solution solve(const Problem& problem, double feas_tol) {
  const int m = problem.rows;
  const int n = problem.cols;
  if (m <= 0 || n <= 0) throw std::invalid_argument("empty linear program");

  Tableau tab;
  tab.rows = m;
  tab.cols = n + m;  // structural + artificial
  tab.t.assign(m, std::vector<double>(tab.cols + 1, 0.0));
  tab.basis.resize(m);
  for (int i = 0; i < m; ++i) {
    const double sign = problem.b[i] < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) tab.t[i][j] = sign * problem.at(i, j);
    tab.t[i][n + i] = 1.0;
    tab.rhs(i) = sign * problem.b[i];
    tab.basis[i] = n + i;
  }

  // Phase one: maximize -sum(artificials). Reduced costs against the
  // artificial basis are column sums for structural variables.
  tab.z.assign(tab.cols + 1, 0.0);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += tab.t[i][j];
    tab.z[j] = s;
  }
  // The rhs slot of the objective row carries the negated objective value;
  // the shared pivot update then keeps it consistent for free.
  double rhs_sum = 0.0;
  for (int i = 0; i < m; ++i) rhs_sum += tab.rhs(i);
  tab.z[tab.cols] = rhs_sum;

  bool unbounded = false;
  while (tab.step(unbounded)) {
  }

  Solution sol;
  sol.infeasibility = std::max(0.0, tab.z[tab.cols]);
  if (sol.infeasibility > feas_tol) {
    sol.status = Status::kInfeasible;
    return sol;
  }

  // Drive leftover zero-level artificials out of the basis; a row with no
  // structural pivot available is redundant and gets dropped.
  for (int i = tab.rows - 1; i >= 0; --i) {
    if (tab.basis[i] < n) continue;
    int pc = -1;
    for (int j = 0; j < n; ++j) {
      if (std::abs(tab.t[i][j]) > kPivotTol) {
        pc = j;
        break;
      }
    }
    if (pc >= 0) {
      tab.pivot(i, pc);
    } else {
      tab.t.erase(tab.t.begin() + i);
      tab.basis.erase(tab.basis.begin() + i);
      --tab.rows;
    }
  }

  // Chop artificial columns and rebuild the objective row for phase two.
  for (auto& row : tab.t) {
    row[n] = row[tab.cols];
    row.resize(n + 1);
  }
  tab.cols = n;
  tab.z.assign(n + 1, 0.0);
  for (int j = 0; j < n; ++j) tab.z[j] = problem.c[j];
  for (int i = 0; i < tab.rows; ++i) {
    const double cb = problem.c[tab.basis[i]];
    if (cb == 0.0) continue;
    for (int j = 0; j <= n; ++j) tab.z[j] -= cb * tab.t[i][j];
  }
  for (int i = 0; i < tab.rows; ++i) tab.z[tab.basis[i]] = 0.0;

  unbounded = false;
  while (tab.step(unbounded)) {
  }
  if (unbounded) {
    sol.status = Status::kUnbounded;
    return sol;
  }

  sol.status = Status::kOptimal;
  sol.x.assign(n, 0.0);
  for (int i = 0; i < tab.rows; ++i) {
    sol.x[tab.basis[i]] = std::max(0.0, tab.rhs(i));
  }
  sol.objective = -tab.z[n];
  return sol;
}

}  // namespace markper::lp
