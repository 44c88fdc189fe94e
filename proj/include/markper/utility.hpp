#ifndef MARKPER_UTILITY_HPP
#define MARKPER_UTILITY_HPP

#include <functional>
#include <vector>

#include "markper/grid.hpp"

namespace markper {

/**
 * Stage payoff u as a function of the posterior belief, represented by its
 * values on a SimplexGrid and extended piecewise linearly. The grid values
 * are the ground truth every other module works against.
 */
class UtilityFunction {
 public:
  static UtilityFunction from_values(SimplexGrid grid,
                                     std::vector<double> values);
  static UtilityFunction from_function(
      SimplexGrid grid, const std::function<double(const Belief&)>& fn);

  // Built-in "example1" payoff on two states (H = state 0, L = state 1):
  // the receiver matches the posterior, the sender collects
  //   u(p) = p * (2 - 3|p - 1/2|) + (1 - p) * (p / 10).
  static UtilityFunction example1(int points = 2001);

  const SimplexGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double at_node(int idx) const { return values_[idx]; }
  double operator()(const Belief& q) const {
    return grid_.interpolate(values_, q);
  }
  double at_p(double p) const;  // two-state convenience
  double max_abs() const { return max_abs_; }

 private:
  UtilityFunction(SimplexGrid grid, std::vector<double> values);
  SimplexGrid grid_;
  std::vector<double> values_;
  double max_abs_;
};

}  // namespace markper

#endif
