#include "markper/simplex_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "markper/linprog.hpp"

namespace markper {

namespace {

void check_inputs(const Belief& point, const std::vector<Belief>& generators) {
  if (generators.empty()) throw std::invalid_argument("no generators");
  for (const auto& g : generators) {
    if (g.dim() != point.dim()) {
      throw std::invalid_argument("generator dimension mismatch");
    }
  }
}

// Feasibility LP: coordinates plus the unit-sum row. The sum row is linearly
// dependent on the others, which the solver tolerates.
lp::Solution membership_lp(const Belief& point,
                           const std::vector<Belief>& generators,
                           double tol_hull) {
  const int k = point.dim();
  const int n = static_cast<int>(generators.size());
  lp::Problem prob;
  prob.rows = k + 1;
  prob.cols = n;
  prob.a.assign(static_cast<size_t>(prob.rows) * n, 0.0);
  prob.b.assign(prob.rows, 0.0);
  prob.c.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < k; ++i) prob.at(i, j) = generators[j][i];
    prob.at(k, j) = 1.0;
  }
  for (int i = 0; i < k; ++i) prob.b[i] = point[i];
  prob.b[k] = 1.0;
  return lp::solve(prob, tol_hull * (k + 1));
}

bool lp_feasible(const Belief& point, const std::vector<Belief>& generators,
                 double tol_hull) {
  return membership_lp(point, generators, tol_hull).status ==
         lp::Status::kOptimal;
}

// Membership restricted to a generator subset given by indices.
bool lp_feasible_subset(const Belief& point,
                        const std::vector<Belief>& generators,
                        const std::vector<int>& subset, double tol_hull) {
  std::vector<Belief> sel;
  sel.reserve(subset.size());
  for (int idx : subset) sel.push_back(generators[idx]);
  return lp_feasible(point, sel, tol_hull);
}

IndexedSplit single_atom(int idx) { return IndexedSplit{{idx}, {1.0}}; }

// Two-state support search: exact generator hit first, then the
// lexicographically smallest bracketing pair.
IndexedSplit reduce_dim2(const Belief& point,
                         const std::vector<Belief>& generators,
                         double tol_hull) {
  const int n = static_cast<int>(generators.size());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& g : generators) {
    lo = std::min(lo, g.p());
    hi = std::max(hi, g.p());
  }
  double p = point.p();
  if (p < lo - tol_hull || p > hi + tol_hull) {
    throw std::invalid_argument("point outside generator hull");
  }
  p = std::clamp(p, lo, hi);
  for (int i = 0; i < n; ++i) {
    if (std::abs(generators[i].p() - p) <= tol_hull) return single_atom(i);
  }
  for (int i = 0; i < n; ++i) {
    const double a = generators[i].p() - p;
    for (int j = i + 1; j < n; ++j) {
      const double b = generators[j].p() - p;
      if (a * b < 0.0) {
        // w*gi + (1-w)*gj = p along the scalar coordinate
        const double w = b / (generators[j].p() - generators[i].p());
        return IndexedSplit{{i, j}, {w, 1.0 - w}};
      }
    }
  }
  throw std::invalid_argument("point outside generator hull");
}

bool try_pair(const Belief& point, const Belief& gi, const Belief& gj,
              double tol_hull, double* alpha) {
  const int k = point.dim();
  double num = 0.0, den = 0.0;
  for (int c = 0; c < k; ++c) {
    const double d = gi[c] - gj[c];
    num += (point[c] - gj[c]) * d;
    den += d * d;
  }
  if (den <= 1e-24) return false;
  const double a = num / den;
  if (a <= 1e-12 || a >= 1.0 - 1e-12) return false;
  for (int c = 0; c < k; ++c) {
    if (std::abs(a * gi[c] + (1.0 - a) * gj[c] - point[c]) > tol_hull) {
      return false;
    }
  }
  *alpha = a;
  return true;
}

bool try_triple(const Belief& point, const Belief& gi, const Belief& gj,
                const Belief& gl, double tol_hull, double w[3]) {
  // Solve on the first two coordinates plus the unit sum; verify the rest.
  const double a[3][3] = {{gi[0], gj[0], gl[0]},
                          {gi[1], gj[1], gl[1]},
                          {1.0, 1.0, 1.0}};
  const double rhs[3] = {point[0], point[1], 1.0};
  double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
               a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
               a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  if (std::abs(det) <= 1e-18) return false;
  auto minor = [&](int col, const double r[3]) {
    double m[3][3];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m[i][j] = (j == col) ? r[i] : a[i][j];
    }
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  for (int c = 0; c < 3; ++c) {
    w[c] = minor(c, rhs) / det;
    if (w[c] <= 1e-12) return false;
  }
  const int k = point.dim();
  for (int c = 0; c < k; ++c) {
    const double rec = w[0] * gi[c] + w[1] * gj[c] + w[2] * gl[c];
    if (std::abs(rec - point[c]) > tol_hull) return false;
  }
  return true;
}

IndexedSplit reduce_general(const Belief& point,
                            const std::vector<Belief>& generators,
                            double tol_hull) {
  const int n = static_cast<int>(generators.size());
  if (!lp_feasible(point, generators, tol_hull)) {
    throw std::invalid_argument("point outside generator hull");
  }
  for (int i = 0; i < n; ++i) {
    if (generators[i].linf_distance(point) <= tol_hull) return single_atom(i);
  }
  for (int i = 0; i < n; ++i) {
    double a = 0.0;
    for (int j = i + 1; j < n; ++j) {
      if (try_pair(point, generators[i], generators[j], tol_hull, &a)) {
        return IndexedSplit{{i, j}, {a, 1.0 - a}};
      }
    }
  }
  for (int i = 0; i < n - 2; ++i) {
    std::vector<int> tail_i;
    for (int t = i; t < n; ++t) tail_i.push_back(t);
    if (!lp_feasible_subset(point, generators, tail_i, tol_hull)) break;
    for (int j = i + 1; j < n - 1; ++j) {
      std::vector<int> tail_j = {i};
      for (int t = j; t < n; ++t) tail_j.push_back(t);
      if (!lp_feasible_subset(point, generators, tail_j, tol_hull)) break;
      double w[3];
      for (int l = j + 1; l < n; ++l) {
        if (try_triple(point, generators[i], generators[j], generators[l],
                       tol_hull, w)) {
          return IndexedSplit{{i, j, l}, {w[0], w[1], w[2]}};
        }
      }
    }
  }
  throw std::invalid_argument("no support of size <= 3 reconstructs the point");
}

}  // namespace

Membership convex_membership(const Belief& point,
                             const std::vector<Belief>& generators,
                             double tol_hull) {
  check_inputs(point, generators);
  const int n = static_cast<int>(generators.size());
  Membership result;
  if (point.dim() == 2) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& g : generators) {
      lo = std::min(lo, g.p());
      hi = std::max(hi, g.p());
    }
    if (point.p() < lo - tol_hull || point.p() > hi + tol_hull) return result;
    result.feasible = true;
    IndexedSplit s = reduce_dim2(point, generators, tol_hull);
    result.weights.assign(n, 0.0);
    for (size_t t = 0; t < s.indices.size(); ++t) {
      result.weights[s.indices[t]] = s.weights[t];
    }
    return result;
  }
  lp::Solution sol = membership_lp(point, generators, tol_hull);
  if (sol.status != lp::Status::kOptimal) return result;
  result.feasible = true;
  double sum = 0.0;
  for (double& w : sol.x) {
    w = std::max(0.0, w);
    sum += w;
  }
  for (double& w : sol.x) w /= sum;
  result.weights = std::move(sol.x);
  return result;
}

IndexedSplit caratheodory_reduce_indexed(const Belief& point,
                                         const std::vector<Belief>& generators,
                                         double tol_hull) {
  check_inputs(point, generators);
  if (point.dim() == 2) return reduce_dim2(point, generators, tol_hull);
  if (point.dim() == 3) return reduce_general(point, generators, tol_hull);
  throw std::invalid_argument("state spaces beyond three states unsupported");
}

Split caratheodory_reduce(const Belief& point,
                          const std::vector<Belief>& generators,
                          double tol_hull) {
  IndexedSplit s = caratheodory_reduce_indexed(point, generators, tol_hull);
  std::vector<SplitAtom> atoms;
  atoms.reserve(s.indices.size());
  for (size_t t = 0; t < s.indices.size(); ++t) {
    atoms.push_back(SplitAtom{generators[s.indices[t]], s.weights[t]});
  }
  return Split(std::move(atoms));
}

}  // namespace markper
