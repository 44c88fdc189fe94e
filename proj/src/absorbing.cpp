#include "markper/absorbing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace markper {
namespace {

using Point2 = std::array<double, 2>;

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Counterclockwise convex hull (Andrew's monotone chain); collinear interior
// points are dropped. Degenerate inputs yield one or two points.
std::vector<Point2> hull2d(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const int n = static_cast<int>(pts.size());
  if (n <= 2) return pts;
  std::vector<Point2> h(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  const int lower = k + 1;
  for (int i = n - 2; i >= 0; --i) {
    while (k >= lower && cross(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

double segment_distance(const Point2& a, const Point2& b, double x, double y) {
  const double dx = b[0] - a[0], dy = b[1] - a[1];
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = ((x - a[0]) * dx + (y - a[1]) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
  }
  const double px = a[0] + t * dx - x, py = a[1] + t * dy - y;
  return std::sqrt(px * px + py * py);
}

// Signed-distance containment test against a ccw hull; tol is a coordinate
// tolerance, matching the hull-membership slack elsewhere.
bool in_hull2d(const std::vector<Point2>& h, double x, double y, double tol) {
  if (h.empty()) return false;
  if (h.size() == 1) {
    return std::abs(x - h[0][0]) <= tol && std::abs(y - h[0][1]) <= tol;
  }
  if (h.size() == 2) return segment_distance(h[0], h[1], x, y) <= tol;
  const int n = static_cast<int>(h.size());
  for (int i = 0; i < n; ++i) {
    const Point2& a = h[i];
    const Point2& b = h[(i + 1) % n];
    const double ex = b[0] - a[0], ey = b[1] - a[1];
    const double len = std::sqrt(ex * ex + ey * ey);
    const double c = ex * (y - a[1]) - ey * (x - a[0]);
    if (c < -tol * std::max(len, 1e-12)) return false;
  }
  return true;
}

Point2 project(const Belief& q) { return {q[0], q[1]}; }

// Vertices of {q in the simplex : l1(q, center) <= r} in the (q0, q1) chart:
// the l1 ball cuts the simplex plane in a hexagon, clipped to the simplex.
std::vector<Point2> ball_polygon3(const Belief& center, double r) {
  const double cx = center[0], cy = center[1], s = r / 2.0;
  std::vector<Point2> poly = {{cx + s, cy},     {cx, cy + s},
                              {cx - s, cy + s}, {cx - s, cy},
                              {cx, cy - s},     {cx + s, cy - s}};
  // Clip against x >= 0, y >= 0, x + y <= 1 (half planes a*x + b*y <= c).
  const double planes[3][3] = {{-1, 0, 0}, {0, -1, 0}, {1, 1, 1}};
  for (const auto& pl : planes) {
    std::vector<Point2> next;
    const int n = static_cast<int>(poly.size());
    for (int i = 0; i < n; ++i) {
      const Point2& a = poly[i];
      const Point2& b = poly[(i + 1) % n];
      const double da = pl[0] * a[0] + pl[1] * a[1] - pl[2];
      const double db = pl[0] * b[0] + pl[1] * b[1] - pl[2];
      if (da <= 0.0) next.push_back(a);
      if ((da < 0.0) != (db < 0.0) && da != db) {
        const double t = da / (da - db);
        next.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
      }
    }
    poly = std::move(next);
    if (poly.empty()) break;
  }
  return poly;
}

struct Interval {
  double lo = 0.0, hi = 0.0;
};

// Merged component of the piece intervals containing p, if any.
bool merged_component(std::vector<Interval> iv, double p, Interval* out) {
  if (iv.empty()) return false;
  std::sort(iv.begin(), iv.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& i : iv) {
    if (!merged.empty() && i.lo <= merged.back().hi + 1e-12) {
      merged.back().hi = std::max(merged.back().hi, i.hi);
    } else {
      merged.push_back(i);
    }
  }
  for (const auto& i : merged) {
    if (p >= i.lo - 1e-12 && p <= i.hi + 1e-12) {
      *out = i;
      return true;
    }
  }
  return false;
}

void require_supported_dim(int dim) {
  if (dim != 2 && dim != 3) {
    throw std::invalid_argument("state spaces beyond three states unsupported");
  }
}

}  // namespace

std::vector<std::vector<double>> AbsorbingCheck::weight_matrix() const {
  const int n = static_cast<int>(points.size());
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    const IndexedSplit& d = decompositions[i];
    for (size_t j = 0; j < d.indices.size(); ++j) {
      w[i][d.indices[j]] = d.weights[j];
    }
  }
  return w;
}

AbsorbingCheck is_absorbing(const std::vector<Belief>& c,
                            const TransitionMatrix& m, double tol_hull) {
  if (c.empty()) throw std::invalid_argument("empty candidate set");
  require_supported_dim(m.dim());
  AbsorbingCheck out;
  out.points = c;
  for (int i = 0; i < static_cast<int>(c.size()); ++i) {
    if (c[i].dim() != m.dim()) {
      throw std::invalid_argument("belief dimension mismatch");
    }
    const Belief image = m.advance(c[i]);
    if (!convex_membership(image, c, tol_hull).feasible) {
      out.failing_index = i;
      out.decompositions.clear();
      return out;
    }
    out.decompositions.push_back(caratheodory_reduce_indexed(image, c, tol_hull));
  }
  out.absorbing = true;
  return out;
}

std::vector<int> maximal_absorbing_subset(const std::vector<Belief>& a,
                                          const TransitionMatrix& m,
                                          double tol_hull) {
  const int n = static_cast<int>(a.size());
  if (n == 0) return {};
  require_supported_dim(m.dim());
  std::vector<Belief> images;
  images.reserve(n);
  for (const Belief& q : a) {
    if (q.dim() != m.dim()) {
      throw std::invalid_argument("belief dimension mismatch");
    }
    images.push_back(m.advance(q));
  }

  std::vector<char> alive(n, 1);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> current;
    for (int i = 0; i < n; ++i) {
      if (alive[i]) current.push_back(i);
    }
    if (current.empty()) break;

    std::vector<char> keep(n, 0);
    if (m.dim() == 2) {
      double lo = 1.0, hi = 0.0;
      for (int i : current) {
        lo = std::min(lo, a[i].p());
        hi = std::max(hi, a[i].p());
      }
      for (int i : current) {
        const double p = images[i].p();
        keep[i] = (p >= lo - tol_hull && p <= hi + tol_hull);
      }
    } else {
      std::vector<Point2> pts;
      pts.reserve(current.size());
      for (int i : current) pts.push_back(project(a[i]));
      const std::vector<Point2> h = hull2d(std::move(pts));
      for (int i : current) {
        keep[i] = in_hull2d(h, images[i][0], images[i][1], tol_hull);
      }
    }
    // Simultaneous removal: every violator of this round's hull goes at once.
    for (int i : current) {
      if (!keep[i]) {
        alive[i] = 0;
        changed = true;
      }
    }
  }

  std::vector<int> result;
  for (int i = 0; i < n; ++i) {
    if (alive[i]) result.push_back(i);
  }
  return result;
}

std::vector<int> orbit_absorbing(const Belief& q, const TransitionMatrix& m,
                                 const std::vector<Belief>& c,
                                 double tol_hull) {
  int start = -1;
  for (int i = 0; i < static_cast<int>(c.size()); ++i) {
    if (c[i].linf_distance(q) <= 1e-12) {
      start = i;
      break;
    }
  }
  if (start < 0) throw std::invalid_argument("point is not in the ambient set");
  const AbsorbingCheck cert = is_absorbing(c, m, tol_hull);
  if (!cert.absorbing) {
    throw std::invalid_argument("ambient set is not absorbing");
  }

  std::vector<char> seen(c.size(), 0);
  std::vector<int> queue = {start};
  seen[start] = 1;
  while (!queue.empty()) {
    const int i = queue.back();
    queue.pop_back();
    for (int j : cert.decompositions[i].indices) {
      if (!seen[j]) {
        seen[j] = 1;
        queue.push_back(j);
      }
    }
  }
  std::vector<int> result;
  for (int i = 0; i < static_cast<int>(c.size()); ++i) {
    if (seen[i]) result.push_back(i);
  }
  return result;
}

bool RegionD::empty() const {
  for (const auto& piece : pieces) {
    if (!piece.absorbing_nodes.empty()) return false;
  }
  return true;
}

bool RegionD::contains(const Belief& q, double tol) const {
  for (const auto& piece : pieces) {
    const auto& v = piece.hull_vertices;
    if (v.empty()) continue;
    if (q.dim() == 2) {
      double lo = 1.0, hi = 0.0;
      for (const Belief& b : v) {
        lo = std::min(lo, b.p());
        hi = std::max(hi, b.p());
      }
      if (q.p() >= lo - tol && q.p() <= hi + tol) return true;
    } else {
      std::vector<Point2> h;
      h.reserve(v.size());
      for (const Belief& b : v) h.push_back(project(b));
      if (in_hull2d(h, q[0], q[1], tol)) return true;
    }
  }
  return false;
}

namespace {

// Largest r with the l1 ball around the stationary belief inside the region,
// located by bisection; the predicate is monotone in r.
double region_inradius(const RegionD& region) {
  const Belief& pi = region.stationary;
  const int dim = pi.dim();

  std::vector<Interval> intervals;
  std::vector<std::vector<Point2>> polys;
  for (const auto& piece : region.pieces) {
    if (piece.hull_vertices.empty()) continue;
    if (dim == 2) {
      Interval iv{1.0, 0.0};
      for (const Belief& b : piece.hull_vertices) {
        iv.lo = std::min(iv.lo, b.p());
        iv.hi = std::max(iv.hi, b.p());
      }
      intervals.push_back(iv);
    } else {
      std::vector<Point2> h;
      for (const Belief& b : piece.hull_vertices) h.push_back(project(b));
      polys.push_back(std::move(h));
    }
  }

  auto fits = [&](double r) {
    if (dim == 2) {
      Interval comp;
      if (!merged_component(intervals, pi.p(), &comp)) return false;
      const double lo = std::max(0.0, pi.p() - r / 2.0);
      const double hi = std::min(1.0, pi.p() + r / 2.0);
      return lo >= comp.lo - 1e-9 && hi <= comp.hi + 1e-9;
    }
    // Three states: the ball must fit in a single convex piece. This is a
    // lower bound for the union, which is what the bound consumers need.
    const std::vector<Point2> ball = ball_polygon3(pi, r);
    if (ball.empty()) return false;
    for (const auto& poly : polys) {
      bool ok = true;
      for (const Point2& v : ball) {
        if (!in_hull2d(poly, v[0], v[1], 1e-9)) {
          ok = false;
          break;
        }
      }
      if (ok) return true;
    }
    return false;
  };

  if (!fits(0.0)) return 0.0;
  double lo = 0.0, hi = 2.0;  // l1 diameter of the simplex
  if (fits(hi)) return hi;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fits(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

RegionD build_region_D(const UtilityFunction& u, const TransitionMatrix& m,
                       const Tolerances& tol) {
  require_supported_dim(m.dim());
  if (u.grid().dim() != m.dim()) {
    throw std::invalid_argument("utility and chain dimension mismatch");
  }
  const Belief pi = stationary_distribution(m);
  RegionD region{pi, {}, 0.0};

  for (const auto& plane : supporting_hyperplanes(u, m)) {
    const ContactSet cs = contact_set(u, plane, tol.contact_rel);
    const std::vector<int> keep =
        maximal_absorbing_subset(cs.points, m, tol.eps_hull);
    RegionPiece piece{plane, cs.nodes, {}, {}};
    for (int j : keep) piece.absorbing_nodes.push_back(cs.nodes[j]);

    if (!keep.empty()) {
      if (m.dim() == 2) {
        double lo = 1.0, hi = 0.0;
        for (int j : keep) {
          lo = std::min(lo, cs.points[j].p());
          hi = std::max(hi, cs.points[j].p());
        }
        piece.hull_vertices.push_back(Belief({lo, 1.0 - lo}));
        if (hi > lo) piece.hull_vertices.push_back(Belief({hi, 1.0 - hi}));
      } else {
        std::vector<Point2> pts;
        for (int j : keep) pts.push_back(project(cs.points[j]));
        for (const Point2& v : hull2d(std::move(pts))) {
          piece.hull_vertices.push_back(
              Belief({v[0], v[1], 1.0 - v[0] - v[1]}));
        }
      }
    }
    region.pieces.push_back(std::move(piece));
  }

  region.inradius = region_inradius(region);
  return region;
}

}  // namespace markper
