#include "markper/utility.hpp"

#include <cmath>

namespace markper {

UtilityFunction::UtilityFunction(SimplexGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)), max_abs_(0.0) {
  if (static_cast<int>(values_.size()) != grid_.size()) {
    throw std::invalid_argument("utility table does not match grid");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("utility value not finite");
    max_abs_ = std::max(max_abs_, std::abs(v));
  }
}

UtilityFunction UtilityFunction::from_values(SimplexGrid grid,
                                             std::vector<double> values) {
  return UtilityFunction(grid, std::move(values));
}

UtilityFunction UtilityFunction::from_function(
    SimplexGrid grid, const std::function<double(const Belief&)>& fn) {
  std::vector<double> values(grid.size());
  for (int i = 0; i < grid.size(); ++i) values[i] = fn(grid.node(i));
  return UtilityFunction(grid, std::move(values));
}

UtilityFunction UtilityFunction::example1(int points) {
  return from_function(SimplexGrid::line(points), [](const Belief& q) {
    const double p = q.p();
    return p * (2.0 - 3.0 * std::abs(p - 0.5)) + (1.0 - p) * (p / 10.0);
  });
}

double UtilityFunction::at_p(double p) const {
  return grid_.interpolate(values_, Belief({p, 1.0 - p}));
}

}  // namespace markper
