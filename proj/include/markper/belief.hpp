#ifndef MARKPER_BELIEF_HPP
#define MARKPER_BELIEF_HPP

#include <vector>

#include "markper/common.hpp"

namespace markper {

/**
 * Point of the probability simplex over k states, k >= 2.
 *
 * Construction accepts entries down to -eps_num and a total mass within
 * eps_num of one; anything worse is an input error. Stored weights are
 * clamped to [0,1] and renormalized, so downstream code can rely on an
 * exact unit sum.
 */
class Belief {
 public:
  explicit Belief(std::vector<double> weights, double eps = kEpsNum);

  static Belief vertex(int dim, int state);
  static Belief uniform(int dim);

  int dim() const { return static_cast<int>(w_.size()); }
  double operator[](int i) const { return w_[i]; }
  const std::vector<double>& weights() const { return w_; }

  // Mass on state 0. For two-state problems this is the usual scalar
  // coordinate of the simplex.
  double p() const { return w_[0]; }

  double l1_distance(const Belief& other) const;
  double linf_distance(const Belief& other) const;
  bool approx_equal(const Belief& other, double tol) const;

 private:
  std::vector<double> w_;
};

struct SplitAtom {
  Belief posterior;
  double weight;  // in (0, 1]
};

/**
 * Finite lottery over posteriors. The barycenter is the belief the split
 * decomposes; a split of p is admissible when its atoms average back to p.
 * Reductions keep at most k atoms (Caratheodory inside the simplex).
 */
class Split {
 public:
  explicit Split(std::vector<SplitAtom> atoms, double eps = kEpsNum);

  static Split trivial(const Belief& p);

  const std::vector<SplitAtom>& atoms() const { return atoms_; }
  int size() const { return static_cast<int>(atoms_.size()); }
  int dim() const { return atoms_.front().posterior.dim(); }

  Belief barycenter() const;
  bool averages_to(const Belief& p, double tol = kEpsNum) const;

 private:
  std::vector<SplitAtom> atoms_;
};

}  // namespace markper

#endif
