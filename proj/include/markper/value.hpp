#ifndef MARKPER_VALUE_HPP
#define MARKPER_VALUE_HPP

#include <vector>

#include "markper/absorbing.hpp"
#include "markper/concavification.hpp"
#include "markper/markov_chain.hpp"
#include "markper/utility.hpp"

namespace markper {

/**
 * Grid value function: either the discounted value for `lambda` or the
 * N-stage average value for `horizon` (exactly one is meaningful per
 * producer). `residual` is the final sup-norm change of the producing
 * iteration; `iterations` its step count.
 */
struct ValueFunction {
  SimplexGrid grid;
  std::vector<double> values;
  double lambda = 0.0;
  int horizon = 0;
  double residual = 0.0;
  long iterations = 0;

  double at(const Belief& q) const { return grid.interpolate(values, q); }
  double at_p(double p) const;
};

// Discounted occupation measure (1-lambda) * p * (Id - lambda*M)^{-1},
// computed by a linear solve; equals the series (1-lambda) sum over n >= 1 of
// lambda^{n-1} p M^{n-1}.
Belief effective_belief(const Belief& p, const TransitionMatrix& m,
                        double lambda);

// Exact discounted value on the region: the envelope of u evaluated at the
// effective belief. Throws std::domain_error off the region.
double closed_form_value(const Belief& p, const UtilityFunction& u,
                         const TransitionMatrix& m, double lambda,
                         const RegionD& region);

// Fixed point of T(v)(p) = Cav[(1-lambda) u(.) + lambda v(. M)](p) on the
// grid, iterated from v = u until the sup-norm change drops below tol. T is a
// lambda-contraction, so the residual decays geometrically.
ValueFunction value_iteration(const UtilityFunction& u,
                              const TransitionMatrix& m, double lambda,
                              double tol = 1e-9,
                              long max_iterations = kValueIterationCap);

// Average values v_1 .. v_n of the 1..n-stage games, by the backward
// recursion N v_N(p) = Cav[u(.) + (N-1) v_{N-1}(. M)](p), v_1 = Cav u.
std::vector<ValueFunction> finite_horizon_value(const UtilityFunction& u,
                                                const TransitionMatrix& m,
                                                int n);

/**
 * Silent-prefix sandwich around the discounted value: `steps` is the horizon
 * after which every vertex row has mixed into the region's inner ball, and
 * `tail` the exactly-valued continuation collected at that point.
 */
struct ValueBounds {
  long steps = 0;
  double lower = 0.0;
  double upper = 0.0;
  double tail = 0.0;
};

// Bounds via a silent prefix of length `steps` followed by the closed form at
// the mixed belief. Requires a region with positive inradius.
ValueBounds sandwich_bounds(const Belief& p, const UtilityFunction& u,
                            const TransitionMatrix& m, double lambda,
                            const RegionD& region);

/**
 * Limit-value estimate: Richardson-style extrapolation of v_N at the
 * stationary belief over doubling horizons, optionally cross-checked against
 * discounted values near 1 at spread-out beliefs.
 */
struct LimitValueEstimate {
  double value = 0.0;
  std::vector<std::pair<int, double>> horizon_values;  // (N, v_N(pi))
  std::vector<double> lambda_values;  // discounted checks at the same beliefs
  double spread = 0.0;                // max pairwise gap of the checks
};

LimitValueEstimate estimate_limit_value(const UtilityFunction& u,
                                        const TransitionMatrix& m,
                                        bool cross_check = true);

}  // namespace markper

#endif
