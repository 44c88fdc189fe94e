#include "markper/value.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace markper {
namespace {

void require_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("discount factor must lie in [0, 1)");
  }
}

// Interpolation stencils for p -> p * M at every grid node; M is fixed for
// the whole iteration, so the locations are computed once.
std::vector<SimplexGrid::Location> shift_stencil(const SimplexGrid& grid,
                                                 const TransitionMatrix& m) {
  std::vector<SimplexGrid::Location> loc(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    loc[i] = grid.locate(m.advance(grid.node(i)));
  }
  return loc;
}

double apply_stencil(const std::vector<double>& v,
                     const SimplexGrid::Location& loc) {
  double s = 0.0;
  for (int k = 0; k < loc.count; ++k) s += loc.w[k] * v[loc.idx[k]];
  return s;
}

// In-place least concave majorant of grid values.
struct Concavifier {
  explicit Concavifier(const SimplexGrid& grid) : grid_(grid) {
    if (grid.dim() == 2) {
      x_.resize(grid.size());
      for (int i = 0; i < grid.size(); ++i) x_[i] = grid.node_p(i);
    }
  }

  void operator()(std::vector<double>& values) {
    if (grid_.dim() == 2) {
      detail::concavify_on_grid(x_, values, scratch_);
    } else {
      values = Envelope::build(UtilityFunction::from_values(grid_, values))
                   .node_values();
    }
  }

  SimplexGrid grid_;
  std::vector<double> x_;
  std::vector<int> scratch_;
};

}  // namespace

double ValueFunction::at_p(double p) const {
  if (grid.dim() != 2) {
    throw std::logic_error("scalar evaluation requires two states");
  }
  const auto loc = grid.locate_p(p);
  double s = 0.0;
  for (int k = 0; k < loc.count; ++k) s += loc.w[k] * values[loc.idx[k]];
  return s;
}

Belief effective_belief(const Belief& p, const TransitionMatrix& m,
                        double lambda) {
  require_lambda(lambda);
  if (p.dim() != m.dim()) {
    throw std::invalid_argument("belief dimension mismatch");
  }
  const int k = m.dim();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) a(i, j) -= lambda * m.entry(j, i);
  }
  Eigen::VectorXd rhs(k);
  for (int i = 0; i < k; ++i) rhs(i) = (1.0 - lambda) * p[i];
  const Eigen::VectorXd x = a.fullPivLu().solve(rhs);
  std::vector<double> w(k);
  for (int i = 0; i < k; ++i) w[i] = x(i);
  return Belief(w, 1e-9);
}

double closed_form_value(const Belief& p, const UtilityFunction& u,
                         const TransitionMatrix& m, double lambda,
                         const RegionD& region) {
  require_lambda(lambda);
  if (!region.contains(p)) {
    throw std::domain_error("belief outside the absorbing region");
  }
  const Envelope env = Envelope::build(u);
  return env.at(effective_belief(p, m, lambda));
}

ValueFunction value_iteration(const UtilityFunction& u,
                              const TransitionMatrix& m, double lambda,
                              double tol, long max_iterations) {
  require_lambda(lambda);
  const SimplexGrid& grid = u.grid();
  if (grid.dim() != m.dim()) {
    throw std::invalid_argument("utility and chain dimension mismatch");
  }
  const auto stencil = shift_stencil(grid, m);
  Concavifier cav(grid);

  std::vector<double> base(grid.size());
  for (int i = 0; i < grid.size(); ++i) base[i] = (1.0 - lambda) * u.at_node(i);

  std::vector<double> v = u.values();
  std::vector<double> next(grid.size());
  for (long it = 1; it <= max_iterations; ++it) {
    for (int i = 0; i < grid.size(); ++i) {
      next[i] = base[i] + lambda * apply_stencil(v, stencil[i]);
    }
    cav(next);
    double residual = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
      residual = std::max(residual, std::abs(next[i] - v[i]));
    }
    v.swap(next);
    if (residual <= tol) {
      return ValueFunction{grid, std::move(v), lambda, 0, residual, it};
    }
  }
  char msg[128];
  std::snprintf(msg, sizeof msg,
                "value iteration missed tolerance %.3e after %ld steps", tol,
                max_iterations);
  throw NonConvergenceError(msg);
}

std::vector<ValueFunction> finite_horizon_value(const UtilityFunction& u,
                                                const TransitionMatrix& m,
                                                int n) {
  if (n < 1) throw std::invalid_argument("horizon must be positive");
  const SimplexGrid& grid = u.grid();
  if (grid.dim() != m.dim()) {
    throw std::invalid_argument("utility and chain dimension mismatch");
  }
  const auto stencil = shift_stencil(grid, m);
  Concavifier cav(grid);

  std::vector<ValueFunction> out;
  out.reserve(n);

  // `sum` carries N * v_N, the undivided N-stage payoff sum.
  std::vector<double> sum = u.values();
  cav(sum);
  out.push_back(ValueFunction{grid, sum, 0.0, 1, 0.0, 1});

  std::vector<double> next(grid.size());
  for (int stage = 2; stage <= n; ++stage) {
    for (int i = 0; i < grid.size(); ++i) {
      next[i] = u.at_node(i) + apply_stencil(sum, stencil[i]);
    }
    cav(next);
    sum = next;
    std::vector<double> avg(grid.size());
    for (int i = 0; i < grid.size(); ++i) avg[i] = sum[i] / stage;
    out.push_back(ValueFunction{grid, std::move(avg), 0.0, stage, 0.0, stage});
  }
  return out;
}

ValueBounds sandwich_bounds(const Belief& p, const UtilityFunction& u,
                            const TransitionMatrix& m, double lambda,
                            const RegionD& region) {
  require_lambda(lambda);
  if (region.empty() || region.inradius <= 0.0) {
    throw std::domain_error("region has no inner ball around the stationary belief");
  }
  // Shade the radius slightly so the mixed beliefs land strictly inside.
  const double eps = region.inradius * (1.0 - 1e-3);
  const long steps = mixing_time(m, eps);

  const Envelope env = Envelope::build(u);
  double lower = 0.0, upper = 0.0;
  double w = 1.0 - lambda;
  Belief cur = p;
  for (long i = 0; i < steps; ++i) {
    lower += w * u(cur);
    upper += w * env.at(cur);
    w *= lambda;
    cur = m.advance(cur);
  }
  // cur = p M^steps lies in the inner ball, hence in the region; its
  // continuation value is exact by the closed form.
  const double tail =
      std::pow(lambda, static_cast<double>(steps)) *
      env.at(effective_belief(cur, m, lambda));
  return ValueBounds{steps, lower + tail, upper + tail, tail};
}

LimitValueEstimate estimate_limit_value(const UtilityFunction& u,
                                        const TransitionMatrix& m,
                                        bool cross_check) {
  const Belief pi = stationary_distribution(m);
  const int top = 1024;
  const auto tables = finite_horizon_value(u, m, top);

  LimitValueEstimate est;
  for (int n = 16; n <= top; n *= 2) {
    est.horizon_values.push_back({n, tables[n - 1].at(pi)});
  }
  // One Richardson step on the last doubling: v_N ~ v + c / N.
  const double vh = est.horizon_values.back().second;
  const double vhalf = est.horizon_values[est.horizon_values.size() - 2].second;
  est.value = 2.0 * vh - vhalf;

  if (cross_check) {
    std::vector<Belief> checks = {Belief::vertex(m.dim(), 0),
                                  Belief::vertex(m.dim(), m.dim() - 1),
                                  Belief::uniform(m.dim()), pi};
    for (double lambda : {0.9, 0.99, 0.999}) {
      const ValueFunction vf = value_iteration(u, m, lambda);
      for (const Belief& b : checks) {
        est.lambda_values.push_back(vf.at(b));
      }
    }
    // Spread of the near-one discounted values: a constancy diagnostic.
    const size_t tail_start = est.lambda_values.size() - checks.size();
    double lo = est.lambda_values[tail_start], hi = lo;
    for (size_t i = tail_start; i < est.lambda_values.size(); ++i) {
      lo = std::min(lo, est.lambda_values[i]);
      hi = std::max(hi, est.lambda_values[i]);
    }
    est.spread = hi - lo;
  }
  return est;
}

}  // namespace markper
