#ifndef MARKPER_GRID_HPP
#define MARKPER_GRID_HPP

#include <vector>

#include "markper/belief.hpp"

namespace markper {

/**
 * Fixed discretization of the belief simplex.
 *
 * Two states: uniform points on [0,1] in the state-0 mass, `resolution`
 * nodes. Three states: the triangular lattice with `resolution` subdivisions
 * per edge, nodes (i,j) -> ((m-i-j)/m scaled) enumerated lexicographically in
 * (i,j) where i indexes state-0 mass and j state-1 mass.
 *
 * Evaluation between nodes is piecewise linear: segment interpolation on the
 * line, triangle interpolation on the standard lattice triangulation. The
 * grid therefore represents exactly the continuous piecewise-linear extension
 * of any node function.
 */
class SimplexGrid {
 public:
  static SimplexGrid line(int points = 2001);
  static SimplexGrid triangle(int subdivisions = 50);
  static SimplexGrid standard(int dim, int resolution);

  int dim() const { return dim_; }
  int resolution() const { return resolution_; }
  int size() const { return size_; }

  Belief node(int idx) const;
  double node_p(int idx) const;  // two-state scalar coordinate

  struct Location {
    int idx[3] = {0, 0, 0};
    double w[3] = {0.0, 0.0, 0.0};
    int count = 0;
  };
  Location locate(const Belief& q) const;
  Location locate_p(double p) const;  // two-state fast path

  double interpolate(const std::vector<double>& values, const Belief& q) const;

  bool operator==(const SimplexGrid& other) const {
    return dim_ == other.dim_ && resolution_ == other.resolution_;
  }

 private:
  SimplexGrid(int dim, int resolution);
  int dim_;
  int resolution_;
  int size_;
};

}  // namespace markper

#endif
