#ifndef MARKPER_ABSORBING_HPP
#define MARKPER_ABSORBING_HPP

#include <vector>

#include "markper/concavification.hpp"
#include "markper/markov_chain.hpp"
#include "markper/simplex_geometry.hpp"

namespace markper {

/**
 * Verification record for a candidate absorbing set C. Either every one-step
 * image q_i M decomposes back over C (the per-point decompositions whose
 * weights form a row-stochastic matrix W with W * points = points * M), or
 * `failing_index` names the first point in index order whose image leaves
 * conv(C).
 */
struct AbsorbingCheck {
  bool absorbing = false;
  int failing_index = -1;
  std::vector<Belief> points;
  std::vector<IndexedSplit> decompositions;  // empty unless absorbing

  // Dense W: row i holds the decomposition weights of points[i] * M over C.
  std::vector<std::vector<double>> weight_matrix() const;
};

AbsorbingCheck is_absorbing(const std::vector<Belief>& c,
                            const TransitionMatrix& m,
                            double tol_hull = kEpsHull);

// Greatest fixed point of the deletion operator on A: each round removes all
// points whose image leaves the hull of the current survivors, until stable.
// Every absorbing subset of A survives every round, so the result is the
// union of all of them. Returns ascending indices into A; possibly empty.
std::vector<int> maximal_absorbing_subset(const std::vector<Belief>& a,
                                          const TransitionMatrix& m,
                                          double tol_hull = kEpsHull);

// Closure of {q} under the supports of the stored decompositions of one-step
// images over the absorbing ambient set C. Returns ascending indices into C.
// Throws if q is not a member of C or C fails certification.
std::vector<int> orbit_absorbing(const Belief& q, const TransitionMatrix& m,
                                 const std::vector<Belief>& c,
                                 double tol_hull = kEpsHull);

struct RegionPiece {
  SupportingHyperplane hyperplane;
  std::vector<int> contact_nodes;     // grid nodes touching the hyperplane
  std::vector<int> absorbing_nodes;   // surviving subset, ascending
  std::vector<Belief> hull_vertices;  // conv of the survivors: interval ends
                                      // (two states) or a ccw polygon
};

/**
 * Union over the extreme supporting hyperplanes z of conv(B_z), where B_z is
 * the maximal absorbing subset of the contact set of z, together with the
 * radius of the largest l1 ball around the stationary belief that fits
 * inside. Pieces with empty survivors are kept for reporting; they contribute
 * nothing to membership.
 */
struct RegionD {
  Belief stationary;
  std::vector<RegionPiece> pieces;
  double inradius = 0.0;

  bool empty() const;
  bool contains(const Belief& q, double tol = 1e-9) const;
};

RegionD build_region_D(const UtilityFunction& u, const TransitionMatrix& m,
                       const Tolerances& tol = Tolerances{});

}  // namespace markper

#endif
