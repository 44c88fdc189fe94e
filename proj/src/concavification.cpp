#include "markper/concavification.hpp"

#include <algorithm>
#include <cmath>

#include "markper/linprog.hpp"

namespace markper {

namespace detail {

namespace {
inline double cross(double ax, double ay, double bx, double by, double cx,
                    double cy) {
  return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
}
}  // namespace

void upper_hull(const std::vector<double>& x, const std::vector<double>& y,
                std::vector<int>& hull) {
  const int n = static_cast<int>(x.size());
  hull.clear();
  for (int i = 0; i < n; ++i) {
    // Pop the middle point while it lies on or below the new chord.
    while (hull.size() >= 2) {
      const int a = hull[hull.size() - 2];
      const int b = hull[hull.size() - 1];
      if (cross(x[a], y[a], x[b], y[b], x[i], y[i]) >= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(i);
  }
}

void concavify_on_grid(const std::vector<double>& x, std::vector<double>& y,
                       std::vector<int>& scratch) {
  upper_hull(x, y, scratch);
  const auto& hull = scratch;
  for (size_t s = 0; s + 1 < hull.size(); ++s) {
    const int a = hull[s];
    const int b = hull[s + 1];
    const double slope = (y[b] - y[a]) / (x[b] - x[a]);
    for (int i = a + 1; i < b; ++i) y[i] = y[a] + slope * (x[i] - x[a]);
  }
}

}  // namespace

namespace {

// Hull linear program at one query point: the envelope value is the best
// convex combination of lifted grid points sitting above q.
lp::Solution envelope_lp(const SimplexGrid& grid,
                         const std::vector<double>& values, const Belief& q) {
  const int k = grid.dim();
  const int n = grid.size();
  lp::Problem prob;
  prob.rows = k + 1;
  prob.cols = n;
  prob.a.assign(static_cast<size_t>(prob.rows) * n, 0.0);
  prob.b.assign(prob.rows, 0.0);
  prob.c = values;
  for (int j = 0; j < n; ++j) {
    const Belief node = grid.node(j);
    for (int i = 0; i < k; ++i) prob.at(i, j) = node[i];
    prob.at(k, j) = 1.0;
  }
  for (int i = 0; i < k; ++i) prob.b[i] = q[i];
  prob.b[k] = 1.0;
  lp::Solution sol = lp::solve(prob, kEpsHull * (k + 1));
  if (sol.status != lp::Status::kOptimal) {
    throw std::logic_error("envelope linear program infeasible at a simplex point");
  }
  return sol;
}

std::vector<double> line_coordinates(const SimplexGrid& grid) {
  std::vector<double> x(grid.size());
  for (int i = 0; i < grid.size(); ++i) x[i] = grid.node_p(i);
  return x;
}

}  // namespace

Envelope Envelope::build(const UtilityFunction& u) {
  Envelope env(u.grid());
  env.source_ = u.values();
  if (u.grid().dim() == 2) {
    const std::vector<double> x = line_coordinates(u.grid());
    env.values_ = u.values();
    detail::concavify_on_grid(x, env.values_, env.hull_);
  } else {
    env.values_.resize(u.grid().size());
    for (int i = 0; i < u.grid().size(); ++i) {
      env.values_[i] =
          envelope_lp(u.grid(), u.values(), u.grid().node(i)).objective;
    }
  }
  return env;
}

double Envelope::at(const Belief& q) const {
  if (grid_.dim() == 2) return at_p(q.p());
  return envelope_lp(grid_, source_, q).objective;
}

int Envelope::segment_of(double p) const {
  // Largest s with node_p(hull[s]) <= p, clamped to a valid segment start.
  int lo = 0;
  int hi = static_cast<int>(hull_.size()) - 1;
  while (lo + 1 < hi) {
    const int mid = (lo + hi) / 2;
    if (grid_.node_p(hull_[mid]) <= p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double Envelope::at_p(double p) const {
  if (grid_.dim() != 2) throw std::invalid_argument("scalar eval is two-state only");
  p = std::clamp(p, 0.0, 1.0);
  const int s = segment_of(p);
  const int a = hull_[s];
  const int b = hull_[s + 1];
  const double xa = grid_.node_p(a);
  const double xb = grid_.node_p(b);
  const double t = (p - xa) / (xb - xa);
  return (1.0 - t) * values_[a] + t * values_[b];
}

const std::vector<int>& Envelope::hull() const {
  if (grid_.dim() != 2) throw std::invalid_argument("hull list is two-state only");
  return hull_;
}

double Envelope::slope_left(double p) const {
  if (grid_.dim() != 2) throw std::invalid_argument("slopes are two-state only");
  const int s = segment_of(p);
  const int a = hull_[s];
  const int b = hull_[s + 1];
  const double xa = grid_.node_p(a);
  // At a hull vertex the left slope comes from the previous segment.
  if (std::abs(p - xa) <= 1e-12 && s > 0) {
    const int a0 = hull_[s - 1];
    return (values_[a] - values_[a0]) / (xa - grid_.node_p(a0));
  }
  return (values_[b] - values_[a]) / (grid_.node_p(b) - xa);
}

double Envelope::slope_right(double p) const {
  if (grid_.dim() != 2) throw std::invalid_argument("slopes are two-state only");
  const int s = segment_of(p);
  const int a = hull_[s];
  const int b = hull_[s + 1];
  const double xb = grid_.node_p(b);
  // At the far vertex the right slope comes from the next segment.
  if (std::abs(p - xb) <= 1e-12 && s + 2 < static_cast<int>(hull_.size())) {
    const int c = hull_[s + 2];
    return (values_[c] - values_[b]) / (grid_.node_p(c) - xb);
  }
  return (values_[b] - values_[a]) / (xb - grid_.node_p(a));
}

IndexedSplit Envelope::split_at(const Belief& q) const {
  if (grid_.dim() == 2) {
    const double p = std::clamp(q.p(), 0.0, 1.0);
    const int s = segment_of(p);
    const int a = hull_[s];
    const int b = hull_[s + 1];
    const double xa = grid_.node_p(a);
    const double xb = grid_.node_p(b);
    if (std::abs(p - xa) <= 1e-12) return IndexedSplit{{a}, {1.0}};
    if (std::abs(p - xb) <= 1e-12) return IndexedSplit{{b}, {1.0}};
    const double w = (xb - p) / (xb - xa);
    return IndexedSplit{{a, b}, {w, 1.0 - w}};
  }
  lp::Solution sol = envelope_lp(grid_, source_, q);
  IndexedSplit split;
  double total = 0.0;
  for (int j = 0; j < grid_.size(); ++j) {
    if (sol.x[j] > 1e-12) {
      split.indices.push_back(j);
      split.weights.push_back(sol.x[j]);
      total += sol.x[j];
    }
  }
  for (double& w : split.weights) w /= total;
  return split;
}

UtilityFunction cav(const UtilityFunction& u) {
  Envelope env = Envelope::build(u);
  return UtilityFunction::from_values(u.grid(), env.node_values());
}

namespace {

// Deterministic incremental 2-variable LP: maximize obj.z subject to
// a_i . z <= b_i. Constraints are processed in order; on violation the
// optimum is re-solved on the violated line against everything before it.
// The first four constraints must be a bounding box containing the feasible
// set, so the box corner below is the optimum of the processed prefix and
// the incremental invariant holds from the start.
struct HalfPlane {
  double ax, ay, b;
};

bool solve_lp2(const std::vector<HalfPlane>& cons, double cx, double cy,
               double box, double* x, double* y) {
  double px = cx >= 0.0 ? box : -box;
  double py = cy >= 0.0 ? box : -box;
  for (size_t i = 0; i < cons.size(); ++i) {
    const auto& c = cons[i];
    if (c.ax * px + c.ay * py <= c.b + 1e-11) continue;
    // Re-solve on the line ax*x + ay*y = b against previous constraints.
    const double nx = c.ax, ny = c.ay;
    const double nn = nx * nx + ny * ny;
    if (nn <= 0.0) return false;
    // Parametrize z = z0 + t * d with d orthogonal to the normal.
    const double z0x = nx * c.b / nn, z0y = ny * c.b / nn;
    const double dx = -ny, dy = nx;
    double tlo = -1e30, thi = 1e30;
    for (size_t jj = 0; jj < i; ++jj) {
      const auto& o = cons[jj];
      const double dot_d = o.ax * dx + o.ay * dy;
      const double rest = o.b - (o.ax * z0x + o.ay * z0y);
      if (std::abs(dot_d) <= 1e-14) {
        if (rest < -1e-9) return false;
        continue;
      }
      const double t = rest / dot_d;
      if (dot_d > 0.0) {
        thi = std::min(thi, t);
      } else {
        tlo = std::max(tlo, t);
      }
    }
    if (tlo > thi + 1e-9) return false;
    const double cd = cx * dx + cy * dy;
    double t;
    if (cd > 0.0) {
      t = thi;
    } else if (cd < 0.0) {
      t = tlo;
    } else {
      t = std::clamp(0.0, tlo, thi);
    }
    t = std::clamp(t, tlo, thi);
    px = z0x + t * dx;
    py = z0y + t * dy;
  }
  *x = px;
  *y = py;
  return true;
}

}  // namespace

std::vector<SupportingHyperplane> supporting_hyperplanes(
    const UtilityFunction& u, const TransitionMatrix& m) {
  if (u.grid().dim() != m.dim()) {
    throw std::invalid_argument("utility and chain dimension mismatch");
  }
  const Belief pi = stationary_distribution(m);
  const Envelope env = Envelope::build(u);
  std::vector<SupportingHyperplane> result;

  if (u.grid().dim() == 2) {
    const double p = pi.p();
    const double level = env.at_p(p);
    const double sl = env.slope_left(p);
    const double sr = env.slope_right(p);
    auto make = [&](double slope) {
      // <z,(q-pi)> = slope * (q0 - pi0) with z = (slope, 0).
      return SupportingHyperplane{{slope, 0.0}, pi, level};
    };
    result.push_back(make(sl));
    if (std::abs(sl - sr) > 1e-10 * std::max(1.0, std::abs(sl))) {
      result.push_back(make(sr));
      result.push_back(make(0.5 * (sl + sr)));
    }
    return result;
  }

  // Three states: the subdifferential in the (z0, z1) chart (z2 = 0) is
  //   { z : <z, q_i - pi> >= u_i - level  for all grid nodes i }.
  const double level = env.at(pi);
  const double box =
      8.0 * (u.max_abs() + std::abs(level) + 1.0) * u.grid().resolution();
  std::vector<HalfPlane> cons;
  cons.reserve(u.grid().size() + 4);
  cons.push_back(HalfPlane{1.0, 0.0, box});
  cons.push_back(HalfPlane{-1.0, 0.0, box});
  cons.push_back(HalfPlane{0.0, 1.0, box});
  cons.push_back(HalfPlane{0.0, -1.0, box});
  for (int i = 0; i < u.grid().size(); ++i) {
    const Belief q = u.grid().node(i);
    // -(q-pi).z <= level - u_i
    cons.push_back(HalfPlane{pi[0] - q[0], pi[1] - q[1],
                             level - u.at_node(i)});
  }
  const double dirs[6][2] = {{1, 0},  {-1, 0}, {0, 1},
                             {0, -1}, {1, 1},  {-1, -1}};
  for (const auto& d : dirs) {
    // Tiny rotation so ties resolve to a unique vertex deterministically.
    const double cx = d[0] + 1e-7 * d[1];
    const double cy = d[1] - 1e-7 * d[0];
    double zx = 0.0, zy = 0.0;
    if (!solve_lp2(cons, cx, cy, box, &zx, &zy)) {
      throw std::logic_error("subdifferential polygon query failed");
    }
    SupportingHyperplane h{{zx, zy, 0.0}, pi, level};
    bool dup = false;
    for (const auto& prev : result) {
      if (std::abs(prev.z[0] - zx) <= 1e-7 && std::abs(prev.z[1] - zy) <= 1e-7) {
        dup = true;
        break;
      }
    }
    if (!dup) result.push_back(h);
  }
  return result;
}

ContactSet contact_set(const UtilityFunction& u,
                       const SupportingHyperplane& hyperplane,
                       double contact_rel) {
  const double scale = std::max(u.max_abs(), 1e-6);
  const double tol = contact_rel * scale;
  const Envelope env = Envelope::build(u);
  ContactSet cs{hyperplane, {}, {}};
  for (int i = 0; i < u.grid().size(); ++i) {
    const Belief q = u.grid().node(i);
    const double f = hyperplane.value(q);
    if (f < env.node_values()[i] - tol) {
      throw std::invalid_argument("hyperplane does not dominate the envelope");
    }
    if (std::abs(u.at_node(i) - f) <= tol) {
      cs.nodes.push_back(i);
      cs.points.push_back(q);
    }
  }
  if (cs.nodes.empty()) {
    throw std::logic_error("empty contact set for a supporting hyperplane");
  }
  return cs;
}

Split optimal_static_split(const Belief& p, const UtilityFunction& u) {
  if (p.dim() != u.grid().dim()) {
    throw std::invalid_argument("belief dimension mismatch");
  }
  const Envelope env = Envelope::build(u);
  const double scale = std::max(u.max_abs(), 1e-6);
  if (env.at(p) - u(p) <= 1e-6 * scale) return Split::trivial(p);
  IndexedSplit s = env.split_at(p);
  std::vector<SplitAtom> atoms;
  atoms.reserve(s.indices.size());
  for (size_t t = 0; t < s.indices.size(); ++t) {
    atoms.push_back(SplitAtom{u.grid().node(s.indices[t]), s.weights[t]});
  }
  return Split(std::move(atoms));
}

}  // namespace markper
