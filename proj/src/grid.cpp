#include "markper/grid.hpp"

#include <algorithm>
#include <cmath>

namespace markper {

SimplexGrid::SimplexGrid(int dim, int resolution)
    : dim_(dim), resolution_(resolution) {
  if (dim == 2) {
    if (resolution < 2) throw std::invalid_argument("line grid needs >= 2 points");
    size_ = resolution;
  } else if (dim == 3) {
    if (resolution < 1) throw std::invalid_argument("triangle grid needs >= 1 subdivision");
    size_ = (resolution + 1) * (resolution + 2) / 2;
  } else {
    throw std::invalid_argument("state spaces beyond three states unsupported");
  }
}

SimplexGrid SimplexGrid::line(int points) { return SimplexGrid(2, points); }

SimplexGrid SimplexGrid::triangle(int subdivisions) {
  return SimplexGrid(3, subdivisions);
}

SimplexGrid SimplexGrid::standard(int dim, int resolution) {
  return SimplexGrid(dim, resolution);
}

Belief SimplexGrid::node(int idx) const {
  if (idx < 0 || idx >= size_) throw std::invalid_argument("node index out of range");
  if (dim_ == 2) {
    const double p = node_p(idx);
    return Belief({p, 1.0 - p});
  }
  // Row i holds resolution+1-i nodes; idx = offset(i) + j.
  const int m = resolution_;
  int i = 0;
  int rest = idx;
  while (rest > m - i) {
    rest -= m - i + 1;
    ++i;
  }
  const int j = rest;
  const double qi = static_cast<double>(i) / m;
  const double qj = static_cast<double>(j) / m;
  return Belief({qi, qj, 1.0 - qi - qj});
}

double SimplexGrid::node_p(int idx) const {
  if (dim_ != 2) throw std::invalid_argument("scalar coordinate is two-state only");
  return static_cast<double>(idx) / (resolution_ - 1);
}

SimplexGrid::Location SimplexGrid::locate_p(double p) const {
  if (dim_ != 2) throw std::invalid_argument("scalar locate is two-state only");
  Location loc;
  const int spans = resolution_ - 1;
  double x = std::clamp(p, 0.0, 1.0) * spans;
  int i = std::min(static_cast<int>(x), spans - 1);
  const double f = x - i;
  if (f <= 1e-14) {
    loc.count = 1;
    loc.idx[0] = i;
    loc.w[0] = 1.0;
  } else if (f >= 1.0 - 1e-14) {
    loc.count = 1;
    loc.idx[0] = i + 1;
    loc.w[0] = 1.0;
  } else {
    loc.count = 2;
    loc.idx[0] = i;
    loc.idx[1] = i + 1;
    loc.w[0] = 1.0 - f;
    loc.w[1] = f;
  }
  return loc;
}

SimplexGrid::Location SimplexGrid::locate(const Belief& q) const {
  if (q.dim() != dim_) throw std::invalid_argument("belief dimension mismatch");
  if (dim_ == 2) return locate_p(q.p());

  const int m = resolution_;
  auto node_index = [&](int i, int j) {
    // offset of row i is i*(m+1) - i*(i-1)/2
    return i * (m + 1) - i * (i - 1) / 2 + j;
  };
  double x = std::clamp(q[0], 0.0, 1.0) * m;
  double y = std::clamp(q[1], 0.0, 1.0) * m;
  int i = std::min(static_cast<int>(x), m - 1);
  int j = std::min(static_cast<int>(y), m - 1);
  double fx = x - i;
  double fy = y - j;
  // Stay inside the simplex: push back onto the diagonal when rounding
  // overshoots it.
  if (i + j >= m) {
    const int over = i + j - (m - 1);
    const int di = std::min(over, i);
    i -= di;
    fx += di;
    const int dj = over - di;
    j -= dj;
    fy += dj;
  }
  // The last diagonal cell has no upper triangle; project roundoff overshoot
  // back onto the diagonal edge.
  if (fx + fy > 1.0 && i + j == m - 1) {
    const double s = fx + fy;
    fx /= s;
    fy /= s;
  }
  Location loc;
  if (fx + fy <= 1.0) {
    loc.count = 3;
    loc.idx[0] = node_index(i, j);
    loc.idx[1] = node_index(i + 1, j);
    loc.idx[2] = node_index(i, j + 1);
    loc.w[0] = 1.0 - fx - fy;
    loc.w[1] = fx;
    loc.w[2] = fy;
  } else {
    loc.count = 3;
    loc.idx[0] = node_index(i + 1, j);
    loc.idx[1] = node_index(i, j + 1);
    loc.idx[2] = node_index(i + 1, j + 1);
    loc.w[0] = 1.0 - fy;
    loc.w[1] = 1.0 - fx;
    loc.w[2] = fx + fy - 1.0;
  }
  // Drop numerically empty corners so callers see exact node hits as such.
  Location out;
  for (int t = 0; t < loc.count; ++t) {
    if (loc.w[t] > 1e-14) {
      out.idx[out.count] = loc.idx[t];
      out.w[out.count] = loc.w[t];
      ++out.count;
    }
  }
  double total = 0.0;
  for (int t = 0; t < out.count; ++t) total += out.w[t];
  for (int t = 0; t < out.count; ++t) out.w[t] /= total;
  return out;
}

double SimplexGrid::interpolate(const std::vector<double>& values,
                                const Belief& q) const {
  if (static_cast<int>(values.size()) != size_) {
    throw std::invalid_argument("value table does not match grid");
  }
  const Location loc = locate(q);
  double v = 0.0;
  for (int t = 0; t < loc.count; ++t) v += loc.w[t] * values[loc.idx[t]];
  return v;
}

}  // namespace markper
