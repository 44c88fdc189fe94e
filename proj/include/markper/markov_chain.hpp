#ifndef MARKPER_MARKOV_CHAIN_HPP
#define MARKPER_MARKOV_CHAIN_HPP

#include <Eigen/Dense>
#include <vector>

#include "markper/belief.hpp"
#include "markper/common.hpp"

namespace markper {

/**
 * Row-stochastic transition matrix. Beliefs act on the right: row vector p
 * becomes pM after one stage. Rows are validated and clamped like beliefs.
 * Irreducibility and aperiodicity are decided once at construction from the
 * positive-entry digraph.
 */
class TransitionMatrix {
 public:
  explicit TransitionMatrix(const std::vector<std::vector<double>>& rows,
                            double eps = kEpsNum);

  int dim() const { return static_cast<int>(m_.rows()); }
  double entry(int i, int j) const { return m_(i, j); }
  const Eigen::MatrixXd& matrix() const { return m_; }

  bool irreducible() const { return irreducible_; }
  bool aperiodic() const { return aperiodic_; }
  int period() const { return period_; }

  Belief row(int i) const;
  Belief advance(const Belief& p, long n = 1) const;

 private:
  Eigen::MatrixXd m_;
  bool irreducible_ = false;
  bool aperiodic_ = false;
  int period_ = 0;
};

// Unique stationary distribution of an irreducible aperiodic chain, from the
// linear fixed-point system. Rejects unsupported chains.
Belief stationary_distribution(const TransitionMatrix& m);

// Smallest n >= 1 with max_i || e_i M^n - pi ||_1 <= eps. Convexity makes the
// vertex beliefs sufficient. Throws NonConvergenceError past the cap.
long mixing_time(const TransitionMatrix& m, double eps, long cap = kMixingCap);

struct OperatorNorms {
  double l1 = 0.0;    // max column sum
  double l2 = 0.0;    // largest singular value
  double linf = 0.0;  // max row sum, 1 for stochastic matrices
  bool l2_exceeds_one = false;
};

OperatorNorms operator_norms(const TransitionMatrix& m);

struct HomothetyReport {
  bool is_homothety = false;
  double ratio = 0.0;  // meaningful when is_homothety
  std::vector<double> per_state_ratios;
};

// Tests whether every vertex row contracts toward the stationary belief with
// one common ratio in [0,1): e_i M = beta e_i + (1-beta) pi for all i.
HomothetyReport homothety_test(const TransitionMatrix& m);

Belief advance_belief(const Belief& p, const TransitionMatrix& m, long n = 1);

}  // namespace markper

#endif
