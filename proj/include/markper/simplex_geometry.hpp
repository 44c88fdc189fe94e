#ifndef MARKPER_SIMPLEX_GEOMETRY_HPP
#define MARKPER_SIMPLEX_GEOMETRY_HPP

#include <vector>

#include "markper/belief.hpp"

namespace markper {

struct Membership {
  bool feasible = false;
  // Convex weights over the generator list (same length, zeros allowed)
  // reconstructing the queried point within the hull tolerance.
  std::vector<double> weights;
};

// Is `point` in the convex hull of `generators`, within tol_hull per
// coordinate? Two-state problems reduce to an interval check; otherwise a
// phase-one simplex decides feasibility.
Membership convex_membership(const Belief& point,
                             const std::vector<Belief>& generators,
                             double tol_hull = kEpsHull);

struct IndexedSplit {
  std::vector<int> indices;    // generator indices, strictly increasing
  std::vector<double> weights;  // positive, sum to one
};

// Writes `point` as a convex combination of at most k generators.
// Deterministic tie-breaking: smallest support size first, then the
// lexicographically smallest index set of that size. Throws
// std::invalid_argument if the point is not in the hull, and for k > 3
// (larger state spaces are out of scope).
IndexedSplit caratheodory_reduce_indexed(const Belief& point,
                                         const std::vector<Belief>& generators,
                                         double tol_hull = kEpsHull);

Split caratheodory_reduce(const Belief& point,
                          const std::vector<Belief>& generators,
                          double tol_hull = kEpsHull);

}  // namespace markper

#endif
