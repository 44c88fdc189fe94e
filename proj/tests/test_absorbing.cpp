#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "markper/absorbing.hpp"

using namespace markper;

namespace {

TransitionMatrix m1() { return TransitionMatrix({{0.1, 0.9}, {0.6, 0.4}}); }
TransitionMatrix m2() {
  return TransitionMatrix({{0.5, 0.5}, {1.0 / 6.0, 5.0 / 6.0}});
}

Belief b2(double p) { return Belief({p, 1.0 - p}); }

// Oracle: union of all absorbing subsets by exhaustive enumeration.
std::vector<int> brute_maximal(const std::vector<Belief>& a,
                               const TransitionMatrix& m) {
  const int n = static_cast<int>(a.size());
  std::set<int> keep;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<Belief> sub;
    std::vector<int> idx;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        sub.push_back(a[i]);
        idx.push_back(i);
      }
    }
    bool ok = true;
    for (const Belief& q : sub) {
      if (!convex_membership(m.advance(q), sub).feasible) {
        ok = false;
        break;
      }
    }
    if (ok) keep.insert(idx.begin(), idx.end());
  }
  return {keep.begin(), keep.end()};
}

TransitionMatrix random_chain(std::mt19937_64& gen, int dim) {
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  std::vector<std::vector<double>> rows(dim, std::vector<double>(dim));
  for (auto& row : rows) {
    double s = 0.0;
    for (double& v : row) {
      v = unif(gen);
      s += v;
    }
    for (double& v : row) v /= s;
  }
  return TransitionMatrix(rows);
}

}  // namespace

TEST_CASE("certification of the running examples") {
  const std::vector<Belief> c = {b2(0.0), b2(0.5)};

  auto bad = is_absorbing(c, m1());
  CHECK_FALSE(bad.absorbing);
  CHECK(bad.failing_index == 0);  // (0,1) M1 = (0.6, 0.4) leaves [0, 0.5]
  CHECK(bad.decompositions.empty());

  auto good = is_absorbing(c, m2());
  REQUIRE(good.absorbing);
  auto w = good.weight_matrix();
  CHECK(w[0][0] == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(w[0][1] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(w[1][0] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(w[1][1] == doctest::Approx(2.0 / 3.0).epsilon(1e-9));

  // Soundness: W rows reconstruct the one-step images.
  for (int i = 0; i < 2; ++i) {
    const Belief img = m2().advance(c[i]);
    double rec = 0.0, mass = 0.0;
    for (int j = 0; j < 2; ++j) {
      rec += w[i][j] * c[j].p();
      mass += w[i][j];
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rec == doctest::Approx(img.p()).epsilon(1e-9));
  }

  // The stationary belief is in the hull of any certified set.
  CHECK(convex_membership(stationary_distribution(m2()), c).feasible);
}

TEST_CASE("singleton stationary set certifies for any chain") {
  for (const auto& m : {m1(), m2()}) {
    const Belief pi = stationary_distribution(m);
    auto cert = is_absorbing({pi}, m);
    REQUIRE(cert.absorbing);
    REQUIRE(cert.decompositions.size() == 1);
    CHECK(cert.decompositions[0].indices == std::vector<int>{0});
    CHECK(cert.decompositions[0].weights[0] == 1.0);
  }
}

TEST_CASE("union closure and stationary membership over random certified sets") {
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Belief pi2 = stationary_distribution(m2());

  for (int trial = 0; trial < 200; ++trial) {
    // Under the contraction chain, any finite set plus the stationary point
    // is absorbing (segments toward the center stay in the hull).
    std::vector<Belief> c1 = {pi2}, c2 = {pi2};
    const int n1 = 1 + static_cast<int>(gen() % 4);
    const int n2 = 1 + static_cast<int>(gen() % 4);
    for (int i = 0; i < n1; ++i) c1.push_back(b2(unif(gen)));
    for (int i = 0; i < n2; ++i) c2.push_back(b2(unif(gen)));
    REQUIRE(is_absorbing(c1, m2()).absorbing);
    REQUIRE(is_absorbing(c2, m2()).absorbing);

    std::vector<Belief> both = c1;
    both.insert(both.end(), c2.begin(), c2.end());
    auto cert = is_absorbing(both, m2());
    CHECK(cert.absorbing);
    CHECK(convex_membership(pi2, both).feasible);
  }

  // The first running chain reflects around its stationary point with ratio
  // one half, so {0.4 - a, 0.4 + b} is absorbing whenever a <= 2b, b <= 2a.
  std::mt19937_64 gen2(102);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_real_distribution<double> side(0.05, 0.35);
    const double a = side(gen2);
    std::uniform_real_distribution<double> ratio(0.55, 1.9);
    const double b = std::min(ratio(gen2) * a, 0.55);
    std::vector<Belief> c1 = {b2(0.4 - a), b2(0.4 + b)};
    REQUIRE(is_absorbing(c1, m1()).absorbing);
    CHECK(convex_membership(stationary_distribution(m1()), c1).feasible);
  }
}

TEST_CASE("maximal subset of the running examples") {
  const std::vector<Belief> a = {b2(0.0), b2(0.5)};
  CHECK(maximal_absorbing_subset(a, m2()) == std::vector<int>{0, 1});
  CHECK(maximal_absorbing_subset(a, m1()).empty());

  // A set containing the stationary point never empties.
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (const auto& m : {m1(), m2()}) {
    const Belief pi = stationary_distribution(m);
    std::vector<Belief> withpi = {b2(unif(gen)), b2(unif(gen)), pi};
    auto keep = maximal_absorbing_subset(withpi, m);
    CHECK(std::find(keep.begin(), keep.end(), 2) != keep.end());
  }
}

TEST_CASE("maximal subset equals the exhaustive-enumeration oracle") {
  std::mt19937_64 gen(2026);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (int trial = 0; trial < 60; ++trial) {
    const TransitionMatrix m =
        (trial % 3 == 0) ? m1() : (trial % 3 == 1) ? m2() : random_chain(gen, 2);
    const int n = 2 + static_cast<int>(gen() % 9);  // up to 10 points
    std::vector<Belief> a;
    for (int i = 0; i < n; ++i) a.push_back(b2(unif(gen)));
    CHECK(maximal_absorbing_subset(a, m) == brute_maximal(a, m));
  }

  for (int trial = 0; trial < 40; ++trial) {
    const TransitionMatrix m = random_chain(gen, 3);
    const int n = 2 + static_cast<int>(gen() % 7);  // up to 8 points
    std::vector<Belief> a;
    for (int i = 0; i < n; ++i) {
      double x = unif(gen), y = unif(gen);
      if (x + y > 1.0) {
        x = 1.0 - x;
        y = 1.0 - y;
      }
      a.push_back(Belief({x, y, 1.0 - x - y}));
    }
    CHECK(maximal_absorbing_subset(a, m) == brute_maximal(a, m));
  }
}

TEST_CASE("orbit closure") {
  const std::vector<Belief> c = {b2(0.0), b2(0.5)};
  CHECK(orbit_absorbing(b2(0.0), m2(), c) == std::vector<int>{0, 1});
  CHECK(orbit_absorbing(b2(0.5), m2(), c) == std::vector<int>{0, 1});

  // The stationary point is an exact fixed point: its orbit is itself even
  // inside a larger ambient set.
  const Belief pi = stationary_distribution(m2());
  const std::vector<Belief> big = {b2(0.9), pi, b2(0.6)};
  REQUIRE(is_absorbing(big, m2()).absorbing);
  auto orbit = orbit_absorbing(pi, m2(), big);
  CHECK(orbit == std::vector<int>{1});

  CHECK_THROWS_AS(orbit_absorbing(b2(0.123), m2(), c), std::invalid_argument);
  CHECK_THROWS_AS(orbit_absorbing(b2(0.0), m1(), c), std::invalid_argument);
}

TEST_CASE("orbit of an exact forward chain includes the successor's orbit") {
  // Build the chain q, qM, qM^2 with the exact floating-point images, plus
  // the stationary point to make the ambient set absorbing.
  const TransitionMatrix m = m2();
  const Belief q0 = b2(0.55);
  const Belief q1 = m.advance(q0);
  const Belief q2 = m.advance(q1);
  const std::vector<Belief> c = {q0, q1, q2, stationary_distribution(m)};
  REQUIRE(is_absorbing(c, m).absorbing);

  auto o0 = orbit_absorbing(q0, m, c);
  auto o1 = orbit_absorbing(q1, m, c);
  // o0 = {q0} union o1: the exact image forces the singleton step.
  std::set<int> expect(o1.begin(), o1.end());
  expect.insert(0);
  CHECK(o0 == std::vector<int>(expect.begin(), expect.end()));
  CHECK(std::find(o1.begin(), o1.end(), 1) != o1.end());
  CHECK(std::find(o1.begin(), o1.end(), 2) != o1.end());
}

TEST_CASE("region of the second running chain: the contact segment") {
  const UtilityFunction u = UtilityFunction::example1();
  const RegionD region = build_region_D(u, m2());
  CHECK_FALSE(region.empty());
  REQUIRE(region.pieces.size() == 1);
  const RegionPiece& piece = region.pieces[0];
  CHECK(piece.contact_nodes == std::vector<int>{0, 1000});
  CHECK(piece.absorbing_nodes == std::vector<int>{0, 1000});
  REQUIRE(piece.hull_vertices.size() == 2);
  CHECK(piece.hull_vertices[0].p() == 0.0);
  CHECK(piece.hull_vertices[1].p() == doctest::Approx(0.5).epsilon(1e-15));

  CHECK(region.inradius == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(region.contains(b2(0.3)));
  CHECK(region.contains(b2(0.0)));
  CHECK(region.contains(b2(0.5)));
  CHECK(region.contains(region.stationary));
  CHECK_FALSE(region.contains(b2(0.6)));
  CHECK_FALSE(region.contains(b2(1.0)));
}

TEST_CASE("region of the first running chain is empty") {
  const UtilityFunction u = UtilityFunction::example1();
  const RegionD region = build_region_D(u, m1());
  CHECK(region.empty());
  CHECK(region.inradius == 0.0);
  CHECK_FALSE(region.contains(region.stationary));
  for (const auto& piece : region.pieces) {
    CHECK(piece.absorbing_nodes.empty());
    CHECK(piece.hull_vertices.empty());
  }
}

TEST_CASE("sharply peaked payoff with a reflecting chain pins the region") {
  // The stationary point 0.5 is a grid node of the coarse grid; curvature
  // separates neighbors beyond the contact tolerance, and the reflecting
  // chain expels every contact node except the stationary point itself.
  const UtilityFunction u = UtilityFunction::from_function(
      SimplexGrid::line(101),
      [](const Belief& q) { return 1.0 - 4.0 * (q[0] - 0.5) * (q[0] - 0.5); });
  const TransitionMatrix m({{0.1, 0.9}, {0.9, 0.1}});
  const RegionD region = build_region_D(u, m);
  CHECK_FALSE(region.empty());
  for (const auto& piece : region.pieces) {
    REQUIRE(piece.absorbing_nodes.size() == 1);
    CHECK(piece.absorbing_nodes[0] == 50);
  }
  CHECK(region.inradius <= 1e-6);
  CHECK(region.contains(b2(0.5)));
  CHECK_FALSE(region.contains(b2(0.4)));
}

TEST_CASE("three-state region from an affine payoff covers the simplex") {
  const SimplexGrid g = SimplexGrid::triangle(20);
  const UtilityFunction u = UtilityFunction::from_function(
      g, [](const Belief& q) { return 0.3 * q[0] + 0.7 * q[1] + 0.2 * q[2]; });
  // Homothety toward (0.2, 0.3, 0.5) with ratio 0.4.
  const double beta = 0.4;
  const std::vector<double> pi = {0.2, 0.3, 0.5};
  std::vector<std::vector<double>> rows(3, std::vector<double>(3));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      rows[i][j] = (i == j ? beta : 0.0) + (1.0 - beta) * pi[j];
    }
  }
  const TransitionMatrix m(rows);

  const RegionD region = build_region_D(u, m);
  REQUIRE(region.pieces.size() == 1);
  // Every node touches an affine payoff's plane; all survive the contraction.
  CHECK(static_cast<int>(region.pieces[0].contact_nodes.size()) == g.size());
  CHECK(region.pieces[0].absorbing_nodes == region.pieces[0].contact_nodes);
  // conv of the whole lattice is the simplex: the corner count may pick up a
  // near-collinear lattice point at roundoff scale, but stays small.
  CHECK(region.pieces[0].hull_vertices.size() >= 3);
  CHECK(region.pieces[0].hull_vertices.size() <= 6);
  // The ball is intrinsically clipped to the simplex, and the region is the
  // whole simplex, so every radius fits up to the l1 diameter.
  CHECK(region.inradius == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(region.contains(Belief({0.05, 0.15, 0.8})));
  CHECK(region.contains(Belief::uniform(3)));
}
