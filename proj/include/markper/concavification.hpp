#ifndef MARKPER_CONCAVIFICATION_HPP
#define MARKPER_CONCAVIFICATION_HPP

#include <vector>

#include "markper/markov_chain.hpp"
#include "markper/simplex_geometry.hpp"
#include "markper/utility.hpp"

namespace markper {

namespace detail {

// Indices of the upper concave hull vertices of (x[i], y[i]); x strictly
// increasing. First and last points are always vertices.
void upper_hull(const std::vector<double>& x, const std::vector<double>& y,
                std::vector<int>& hull);

// Replace y by its least concave majorant on the grid, reusing `scratch` as
// hull storage. This is the value-iteration hot path.
void concavify_on_grid(const std::vector<double>& x, std::vector<double>& y,
                       std::vector<int>& scratch);

}  // namespace detail

/**
 * Least concave majorant of a grid utility. On the line this is the exact
 * upper hull of the sampled points; on the triangle each node value is the
 * optimum of the hull linear program, which evaluates the same lifted upper
 * hull by facets without constructing it.
 */
class Envelope {
 public:
  static Envelope build(const UtilityFunction& u);

  const SimplexGrid& grid() const { return grid_; }
  const std::vector<double>& node_values() const { return values_; }
  double at(const Belief& q) const;
  double at_p(double p) const;

  // Hull vertex indices (two states only).
  const std::vector<int>& hull() const;

  // One-sided envelope slopes in the scalar coordinate (two states only).
  double slope_left(double p) const;
  double slope_right(double p) const;

  // Decomposition of q over the contact points of the envelope facet above q.
  // Atoms are grid nodes unless the decomposition is trivial.
  IndexedSplit split_at(const Belief& q) const;

 private:
  Envelope(SimplexGrid grid) : grid_(grid) {}
  int segment_of(double p) const;
  SimplexGrid grid_;
  std::vector<double> values_;
  std::vector<int> hull_;
  std::vector<double> source_;  // original utility values (facet search)
};

// Envelope restricted to the inputs' grid, as a UtilityFunction.
UtilityFunction cav(const UtilityFunction& u);

/**
 * Affine majorant of u touching the envelope at the anchor:
 * f(q) = level + <z, q - anchor>. The gradient z is reported with its last
 * coordinate zero; adding a constant to all coordinates of z does not change
 * f on the simplex, so this pins a unique representative.
 */
struct SupportingHyperplane {
  std::vector<double> z;
  Belief anchor;
  double level = 0.0;

  double value(const Belief& q) const {
    double v = level;
    for (int i = 0; i < q.dim(); ++i) v += z[i] * (q[i] - anchor[i]);
    return v;
  }
};

// Extreme supporting hyperplanes of the envelope at the stationary belief.
// Two states: the left and right envelope slopes, plus their midpoint when
// they differ. Three states: vertices of the subdifferential polygon in six
// fixed directions, deduplicated (a representative finite family).
std::vector<SupportingHyperplane> supporting_hyperplanes(
    const UtilityFunction& u, const TransitionMatrix& m);

struct ContactSet {
  SupportingHyperplane hyperplane;
  std::vector<int> nodes;      // grid node indices, ascending
  std::vector<Belief> points;  // the same nodes as beliefs
};

// Grid nodes where u touches the hyperplane within
// contact_rel * max(|u|, 1e-6). Throws std::logic_error when empty, and
// std::invalid_argument when the hyperplane fails to dominate the envelope.
ContactSet contact_set(const UtilityFunction& u,
                       const SupportingHyperplane& hyperplane,
                       double contact_rel = 1e-6);

// One-shot optimal split at p: trivial when u already meets its envelope at
// p, otherwise the decomposition over the supporting facet's contact nodes.
Split optimal_static_split(const Belief& p, const UtilityFunction& u);

}  // namespace markper

#endif
