#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "markper/value.hpp"

using namespace markper;

namespace {

TransitionMatrix m1() { return TransitionMatrix({{0.1, 0.9}, {0.6, 0.4}}); }
TransitionMatrix m2() {
  return TransitionMatrix({{0.5, 0.5}, {1.0 / 6.0, 5.0 / 6.0}});
}

Belief b2(double p) { return Belief({p, 1.0 - p}); }

// Oracle: effective belief by the truncated series.
Belief series_effective(const Belief& p, const TransitionMatrix& m,
                        double lambda) {
  std::vector<double> acc(p.dim(), 0.0);
  Belief cur = p;
  double w = 1.0 - lambda;
  while (w > 1e-18) {
    for (int i = 0; i < p.dim(); ++i) acc[i] += w * cur[i];
    w *= lambda;
    cur = m.advance(cur);
  }
  return Belief(acc, 1e-9);
}

}  // namespace

TEST_CASE("effective belief closed form and series agree") {
  CHECK(effective_belief(b2(0.7), m2(), 0.0).p() == doctest::Approx(0.7).epsilon(1e-12));

  for (double lambda : {0.3, 0.9, 0.999}) {
    const Belief pi = stationary_distribution(m2());
    CHECK(effective_belief(pi, m2(), lambda).l1_distance(pi) < 1e-12);
  }

  const Belief eff = effective_belief(b2(0.5), m2(), 0.5);
  CHECK(eff[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(eff[1] == doctest::Approx(0.6).epsilon(1e-12));

  std::mt19937_64 gen(55);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double lambda = 0.98 * unif(gen);
    const Belief p = b2(unif(gen));
    for (const auto& m : {m1(), m2()}) {
      const Belief a = effective_belief(p, m, lambda);
      const Belief b = series_effective(p, m, lambda);
      CHECK(a.l1_distance(b) < 1e-10);
    }
  }
}

TEST_CASE("closed form on the region") {
  const UtilityFunction u = UtilityFunction::example1();
  const RegionD region = build_region_D(u, m2());
  const Belief pi = stationary_distribution(m2());

  for (double lambda : {0.0, 0.3, 0.5, 0.9, 0.99}) {
    CHECK(closed_form_value(pi, u, m2(), lambda, region) ==
          doctest::Approx(0.5125).epsilon(1e-10));
  }
  CHECK(closed_form_value(b2(0.5), u, m2(), 0.5, region) ==
        doctest::Approx(0.82).epsilon(1e-10));

  // Static case: the envelope itself.
  const Envelope env = Envelope::build(u);
  for (double p : {0.1, 0.25, 0.49}) {
    CHECK(closed_form_value(b2(p), u, m2(), 0.0, region) ==
          doctest::Approx(env.at_p(p)).epsilon(1e-12));
  }

  CHECK_THROWS_AS(closed_form_value(b2(0.7), u, m2(), 0.5, region),
                  std::domain_error);
}

TEST_CASE("value iteration at zero discount is the envelope") {
  const UtilityFunction u = UtilityFunction::example1();
  const UtilityFunction c = cav(u);
  const ValueFunction vf = value_iteration(u, m1(), 0.0);
  CHECK(vf.iterations <= 2);
  for (int i = 0; i < u.grid().size(); ++i) {
    CHECK(vf.values[i] == doctest::Approx(c.at_node(i)).epsilon(1e-12));
  }
}

TEST_CASE("value iteration matches the closed form on the region") {
  const UtilityFunction u = UtilityFunction::example1();
  const RegionD region = build_region_D(u, m2());
  for (double lambda : {0.5, 0.9}) {
    const ValueFunction vf = value_iteration(u, m2(), lambda);
    for (int i = 0; i <= 10; ++i) {
      const double p = 0.05 * i;  // sweep of the region [0, 0.5]
      const double exact = closed_form_value(b2(p), u, m2(), lambda, region);
      CHECK(vf.at_p(p) == doctest::Approx(exact).epsilon(2e-3));
    }
  }
}

TEST_CASE("value iteration invariants") {
  const UtilityFunction u = UtilityFunction::example1();
  const UtilityFunction c = cav(u);
  const double umin = 0.0;  // min of the built-in payoff

  for (const auto& m : {m1(), m2()}) {
    const Belief pi = stationary_distribution(m);
    for (double lambda : {0.3, 0.9}) {
      const ValueFunction vf = value_iteration(u, m, lambda);

      // Jensen cap at the stationary belief.
      CHECK(vf.at(pi) <= c(pi) + 1e-6);

      // Bounded by the payoff range; concave along the grid.
      for (int i = 0; i < u.grid().size(); ++i) {
        CHECK(vf.values[i] >= umin - 1e-9);
        CHECK(vf.values[i] <= u.max_abs() + 1e-9);
        if (i > 0 && i + 1 < u.grid().size()) {
          CHECK(vf.values[i] >=
                0.5 * (vf.values[i - 1] + vf.values[i + 1]) - 1e-9);
        }
      }

      // Two-sided stage inequality and the no-reveal deviation, on nodes.
      for (int i = 0; i < u.grid().size(); i += 7) {
        const Belief q = u.grid().node(i);
        const double cont = lambda * vf.at(m.advance(q));
        const double v = vf.values[i];
        CHECK(v >= (1.0 - lambda) * umin + cont - 1e-7);
        CHECK(v <= (1.0 - lambda) * c(q) + cont + 1e-7);
        CHECK(v >= (1.0 - lambda) * u(q) + cont - 1e-7);
      }
    }
  }
}

TEST_CASE("finite horizon recursion") {
  const UtilityFunction u = UtilityFunction::example1();
  const UtilityFunction c = cav(u);
  const Belief pi = stationary_distribution(m2());

  const auto tables = finite_horizon_value(u, m2(), 32);
  REQUIRE(tables.size() == 32);

  // First stage is the envelope.
  for (int i = 0; i < u.grid().size(); i += 13) {
    CHECK(tables[0].values[i] == doctest::Approx(c.at_node(i)).epsilon(1e-12));
  }

  // At the stationary belief of the contraction chain the average value is
  // flat across horizons: the optimal split lands on exact grid nodes.
  for (const auto& vf : tables) {
    CHECK(vf.at(pi) == doctest::Approx(0.5125).epsilon(1e-10));
  }

  // Sub-additivity of the payoff sums at the stationary belief.
  for (int nn = 1; nn <= 16; ++nn) {
    for (int ll = 1; ll <= 16; ++ll) {
      const double lhs = (nn + ll) * tables[nn + ll - 1].at(pi);
      const double rhs = nn * tables[nn - 1].at(pi) + ll * tables[ll - 1].at(pi);
      CHECK(lhs <= rhs + 1e-9);
    }
  }

  // Dyadic horizons are non-increasing.
  for (int n = 2; n <= 32; n *= 2) {
    CHECK(tables[n - 1].at(pi) <= tables[n / 2 - 1].at(pi) + 1e-10);
  }

  // Lipschitz in l1 with constant max|u|, checked on adjacent nodes.
  const double lip = u.max_abs();
  const double h = 1.0 / (u.grid().resolution() - 1);
  for (const auto& vf : {tables[3], tables[15], tables[31]}) {
    for (int i = 0; i + 1 < u.grid().size(); ++i) {
      CHECK(std::abs(vf.values[i + 1] - vf.values[i]) <= lip * 2.0 * h + 1e-12);
    }
  }
}

TEST_CASE("sandwich bounds around the discounted value") {
  const UtilityFunction u = UtilityFunction::example1();
  const RegionD region = build_region_D(u, m2());

  for (double lambda : {0.5, 0.9}) {
    const ValueFunction vf = value_iteration(u, m2(), lambda);
    for (double p : {1.0, 0.0, 0.7, 0.25}) {
      const ValueBounds b = sandwich_bounds(b2(p), u, m2(), lambda, region);
      CHECK(b.lower <= b.upper + 1e-12);
      CHECK(vf.at_p(p) >= b.lower - 1e-6);
      CHECK(vf.at_p(p) <= b.upper + 1e-6);
      const double cap = 1.5 * (1.0 - std::pow(lambda, double(b.steps))) * u.max_abs();
      CHECK(b.upper - b.lower <= cap + 1e-12);
    }
  }

  // The stationary belief is in the region: bounds bracket the closed form.
  const Belief pi = stationary_distribution(m2());
  const ValueBounds at_pi = sandwich_bounds(pi, u, m2(), 0.9, region);
  const double exact = closed_form_value(pi, u, m2(), 0.9, region);
  CHECK(at_pi.lower <= exact + 1e-12);
  CHECK(at_pi.upper >= exact - 1e-12);

  // Near one the prefix weight vanishes.
  const ValueBounds tight = sandwich_bounds(b2(1.0), u, m2(), 0.999, region);
  CHECK(tight.upper - tight.lower <= 0.01);

  // No inner ball, no bounds.
  const RegionD none = build_region_D(u, m1());
  CHECK_THROWS_AS(sandwich_bounds(pi, u, m1(), 0.9, none), std::domain_error);
}

TEST_CASE("limit value estimates for the running chains") {
  const UtilityFunction u = UtilityFunction::example1();

  const LimitValueEstimate good = estimate_limit_value(u, m2());
  CHECK(good.value == doctest::Approx(0.5125).epsilon(1e-6));
  CHECK(good.spread <= 1e-2);
  for (const auto& [n, v] : good.horizon_values) {
    CHECK(v == doctest::Approx(0.5125).epsilon(1e-8));
  }

  const LimitValueEstimate bad = estimate_limit_value(u, m1());
  CHECK(bad.value < 0.82 - 0.01);
  CHECK(bad.spread <= 1e-2);

  const UtilityFunction flat = UtilityFunction::from_function(
      SimplexGrid::line(101), [](const Belief&) { return 0.25; });
  const LimitValueEstimate constant = estimate_limit_value(flat, m2());
  CHECK(constant.value == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(constant.spread <= 1e-12);
}

TEST_CASE("discounted sums decompose over running averages") {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double lambda = 0.97;
  const int n = 1100;  // lambda^n < 1e-14

  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(n);
    for (double& v : a) v = unif(gen);
    double lhs = 0.0, w = 1.0 - lambda;
    double prefix = 0.0, rhs = 0.0, wr = (1.0 - lambda) * (1.0 - lambda);
    for (int i = 0; i < n; ++i) {
      lhs += w * a[i];
      w *= lambda;
      prefix += a[i];
      rhs += wr * (i + 1) * (prefix / (i + 1));
      wr *= lambda;
    }
    CHECK(std::abs(lhs - rhs) <= 1e-10);
  }
}
