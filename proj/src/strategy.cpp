#include "markper/strategy.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "markper/concavification.hpp"
#include "markper/rng.hpp"
#include "markper/value.hpp"

namespace markper {

namespace {

Split split_over(const std::vector<Belief>& generators,
                 const IndexedSplit& is) {
  std::vector<SplitAtom> atoms;
  atoms.reserve(is.indices.size());
  for (std::size_t j = 0; j < is.indices.size(); ++j) {
    atoms.push_back({generators[is.indices[j]], is.weights[j]});
  }
  return Split(std::move(atoms));
}

}  // namespace

Belief SignalRule::bayes_posterior(const Belief& prior, int signal) const {
  std::vector<double> post(prior.dim(), 0.0);
  double total = 0.0;
  for (int i = 0; i < prior.dim(); ++i) {
    post[i] = prior[i] * rows[i][signal];
    total += post[i];
  }
  if (total <= 0.0) {
    throw std::invalid_argument("signal has zero probability under the prior");
  }
  for (double& v : post) v /= total;
  return Belief(std::move(post), 1e-9);
}

SignalRule signal_rule_from_split(const Belief& p, const Split& split) {
  // 1e-8 absorbs the hull tolerance of Caratheodory-produced splits.
  if (!split.averages_to(p, 1e-8)) {
    throw std::invalid_argument("split does not average to the prior");
  }
  const auto& atoms = split.atoms();
  const int live = split.size();
  const int signals = std::max(live, p.dim());

  SignalRule rule;
  rule.posteriors.reserve(signals);
  rule.weights.assign(signals, 0.0);
  for (int l = 0; l < live; ++l) {
    rule.posteriors.push_back(atoms[l].posterior);
    rule.weights[l] = atoms[l].weight;
  }
  for (int l = live; l < signals; ++l) rule.posteriors.push_back(p);

  rule.rows.assign(p.dim(), std::vector<double>(signals, 0.0));
  for (int i = 0; i < p.dim(); ++i) {
    auto& row = rule.rows[i];
    if (p[i] <= 0.0) {
      row[0] = 1.0;  // unreachable state, fixed dead letter
      continue;
    }
    double total = 0.0;
    for (int l = 0; l < live; ++l) {
      row[l] = atoms[l].weight * atoms[l].posterior[i] / p[i];
      total += row[l];
    }
    // total is barycenter(i)/p(i), one up to rounding.
    for (int l = 0; l < live; ++l) row[l] /= total;
  }
  return rule;
}

namespace {

class BabblingStrategy final : public Strategy {
 public:
  Split act(const Belief& stage_prior) override {
    return Split::trivial(stage_prior);
  }
};

class FullRevelationStrategy final : public Strategy {
 public:
  Split act(const Belief& stage_prior) override {
    std::vector<SplitAtom> atoms;
    for (int i = 0; i < stage_prior.dim(); ++i) {
      if (stage_prior[i] > 0.0) {
        atoms.push_back(
            {Belief::vertex(stage_prior.dim(), i), stage_prior[i]});
      }
    }
    return Split(std::move(atoms));
  }
};

class ConfinedStrategy final : public Strategy {
 public:
  ConfinedStrategy(std::vector<Belief> c, const TransitionMatrix& m,
                   double tol_hull)
      : check_(is_absorbing(c, m, tol_hull)), tol_hull_(tol_hull) {
    if (!check_.absorbing) {
      throw std::invalid_argument(
          "confined strategy needs a certified absorbing set");
    }
    images_.reserve(check_.points.size());
    for (const Belief& point : check_.points) {
      images_.push_back(m.advance(point));
    }
  }

  Split act(const Belief& stage_prior) override {
    // Shifted images of set points reproduce bitwise along a confined
    // trace; their stored decompositions keep the posterior in the set
    // without fresh hull arithmetic.
    for (std::size_t i = 0; i < images_.size(); ++i) {
      if (stage_prior.linf_distance(images_[i]) <= 1e-12) {
        return split_over(check_.points, check_.decompositions[i]);
      }
    }
    if (!convex_membership(stage_prior, check_.points, tol_hull_).feasible) {
      return Split::trivial(stage_prior);
    }
    return caratheodory_reduce(stage_prior, check_.points, tol_hull_);
  }

 private:
  AbsorbingCheck check_;
  std::vector<Belief> images_;
  double tol_hull_;
};

class BlockStrategy final : public Strategy {
 public:
  BlockStrategy(const UtilityFunction& u, const TransitionMatrix& m,
                double eps)
      : grid_(u.grid()) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    silent_ = mixing_time(m, eps);

    const int cap = 1024;
    const auto tables = finite_horizon_value(u, m, cap);
    const Belief pi = stationary_distribution(m);
    const double limit =
        2.0 * tables[cap - 1].at(pi) - tables[cap / 2 - 1].at(pi);
    int settled = cap;
    for (int n = 1; n <= cap; ++n) {
      if (std::abs(tables[n - 1].at(pi) - limit) <= eps) {
        settled = n;
        break;
      }
    }
    play_ = std::min(
        cap,
        std::max(static_cast<int>(std::ceil(double(silent_) / eps)), settled));

    // Stage objectives, innermost first: with l stages remaining the split
    // follows the envelope of u + a_{l-1}(. M), a_0 = 0.
    std::vector<double> prev(grid_.size(), 0.0);
    std::vector<double> g(grid_.size());
    envelopes_.reserve(play_);
    for (int l = 1; l <= play_; ++l) {
      for (int i = 0; i < grid_.size(); ++i) {
        g[i] = u.at_node(i);
        if (l > 1) {
          g[i] += grid_.interpolate(prev, m.advance(grid_.node(i)));
        }
      }
      Envelope env = Envelope::build(UtilityFunction::from_values(grid_, g));
      prev = env.node_values();
      envelopes_.push_back(std::move(env));
    }
  }

  void reset() override { pos_ = 0; }

  Split act(const Belief& stage_prior) override {
    const int at = pos_ % (play_ + silent_);
    ++pos_;
    if (at >= play_) return Split::trivial(stage_prior);
    const Envelope& env = envelopes_[play_ - 1 - at];
    const IndexedSplit is = env.split_at(stage_prior);
    std::vector<SplitAtom> atoms;
    atoms.reserve(is.indices.size());
    for (std::size_t j = 0; j < is.indices.size(); ++j) {
      atoms.push_back({grid_.node(is.indices[j]), is.weights[j]});
    }
    return Split(std::move(atoms));
  }

  int play_stages() const { return play_; }
  int silent_stages() const { return silent_; }

 private:
  SimplexGrid grid_;
  std::vector<Envelope> envelopes_;  // [l-1] serves l stages remaining
  int play_ = 0;
  int silent_ = 0;
  long pos_ = 0;
};

}  // namespace

std::unique_ptr<Strategy> babbling_strategy() {
  return std::make_unique<BabblingStrategy>();
}

std::unique_ptr<Strategy> full_revelation_strategy() {
  return std::make_unique<FullRevelationStrategy>();
}

std::unique_ptr<Strategy> confined_strategy(std::vector<Belief> c,
                                            const TransitionMatrix& m,
                                            double tol_hull) {
  return std::make_unique<ConfinedStrategy>(std::move(c), m, tol_hull);
}

std::unique_ptr<Strategy> block_strategy(const UtilityFunction& u,
                                         const TransitionMatrix& m,
                                         double eps) {
  return std::make_unique<BlockStrategy>(u, m, eps);
}

double SimTrace::cesaro() const {
  if (steps.empty()) return 0.0;
  double sum = 0.0;
  for (const SimStep& s : steps) sum += s.payoff;
  return sum / double(steps.size());
}

double SimTrace::abel(double lambda) const {
  if (steps.empty()) return 0.0;
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("abel weight must lie in [0, 1)");
  }
  double sum = 0.0;
  double w = 1.0;
  for (const SimStep& s : steps) {
    sum += w * s.payoff;
    w *= lambda;
  }
  const double n = double(steps.size());
  return (1.0 - lambda) * sum / (1.0 - std::pow(lambda, n));
}

SimTrace simulate(const Belief& p, Strategy& strategy,
                  const TransitionMatrix& m, const UtilityFunction& u,
                  int horizon, std::uint64_t seed) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  strategy.reset();
  Rng rng(seed);

  SimTrace trace;
  trace.seed = seed;
  trace.steps.reserve(horizon);

  int state = rng.categorical(p.weights());
  Belief prior = p;
  for (int n = 0; n < horizon; ++n) {
    const Split split = strategy.act(prior);
    const SignalRule rule = signal_rule_from_split(prior, split);
    const int signal = rng.categorical(rule.rows[state]);
    const Belief& posterior = rule.posteriors[signal];
    trace.steps.push_back({state, signal, prior, posterior, u(posterior)});
    state = rng.categorical(m.row(state).weights());
    prior = m.advance(posterior);
  }
  return trace;
}

namespace {

// Strongly connected components of the positive-weight digraph, Kosaraju
// with explicit stacks. Returns component ids.
std::vector<int> components(const std::vector<std::vector<int>>& fwd,
                            const std::vector<std::vector<int>>& rev) {
  const int n = static_cast<int>(fwd.size());
  std::vector<int> order;
  order.reserve(n);
  std::vector<char> seen(n, 0);
  for (int root = 0; root < n; ++root) {
    if (seen[root]) continue;
    std::vector<std::pair<int, int>> stack{{root, 0}};
    seen[root] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < static_cast<int>(fwd[v].size())) {
        const int to = fwd[v][next++];
        if (!seen[to]) {
          seen[to] = 1;
          stack.push_back({to, 0});
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }

  std::vector<int> comp(n, -1);
  int id = 0;
  for (int i = n - 1; i >= 0; --i) {
    const int root = order[i];
    if (comp[root] >= 0) continue;
    std::vector<int> stack{root};
    comp[root] = id;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int to : rev[v]) {
        if (comp[to] < 0) {
          comp[to] = id;
          stack.push_back(to);
        }
      }
    }
    ++id;
  }
  return comp;
}

}  // namespace

double PosteriorChain::long_run_payoff(const UtilityFunction& u) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) sum += nu[i] * u(q[i]);
  return sum;
}

PosteriorChain posterior_chain(const std::vector<Belief>& c,
                               const TransitionMatrix& m, double tol_hull) {
  AbsorbingCheck check = is_absorbing(c, m, tol_hull);
  if (!check.absorbing) {
    throw std::invalid_argument("posterior chain needs an absorbing set");
  }

  PosteriorChain chain;
  chain.w = check.weight_matrix();
  chain.points = std::move(check.points);
  const int n = static_cast<int>(chain.points.size());

  // Weights below 1e-12 are solver dust, not edges.
  std::vector<std::vector<int>> fwd(n), rev(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (chain.w[i][j] > 1e-12) {
        fwd[i].push_back(j);
        rev[j].push_back(i);
      }
    }
  }
  const std::vector<int> comp = components(fwd, rev);
  const int classes = 1 + *std::max_element(comp.begin(), comp.end());

  // Closed classes have no edge leaving them; recurrence needs nothing more
  // in a finite chain. Pick the one holding the smallest original index.
  std::vector<char> closed(classes, 1);
  for (int i = 0; i < n; ++i) {
    for (int j : fwd[i]) {
      if (comp[j] != comp[i]) closed[comp[i]] = 0;
    }
  }
  int pick = -1;
  for (int i = 0; i < n && pick < 0; ++i) {
    if (closed[comp[i]]) pick = comp[i];
  }

  for (int i = 0; i < n; ++i) {
    if (comp[i] == pick) {
      chain.recurrent.push_back(i);
      chain.q.push_back(chain.points[i]);
    }
  }
  const int r = static_cast<int>(chain.recurrent.size());
  chain.w_r.assign(r, std::vector<double>(r, 0.0));
  for (int a = 0; a < r; ++a) {
    double total = 0.0;
    for (int b = 0; b < r; ++b) {
      chain.w_r[a][b] = chain.w[chain.recurrent[a]][chain.recurrent[b]];
      total += chain.w_r[a][b];
    }
    // Rows of a closed class only lose dust edges; renormalize them away.
    for (int b = 0; b < r; ++b) chain.w_r[a][b] /= total;
  }

  // Stationary row of w_r: (W^T - I) nu = 0 with unit sum, no aperiodicity
  // needed. Least squares on the stacked system.
  Eigen::MatrixXd a(r + 1, r);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(r + 1);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      a(i, j) = chain.w_r[j][i] - (i == j ? 1.0 : 0.0);
    }
  }
  a.row(r).setOnes();
  b(r) = 1.0;
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
  chain.nu.assign(r, 0.0);
  double total = 0.0;
  for (int i = 0; i < r; ++i) {
    chain.nu[i] = std::max(0.0, x(i));
    total += chain.nu[i];
  }
  for (double& v : chain.nu) v /= total;

  // The class barycenter must be the stationary belief; anything else means
  // the certificate and the chain disagree.
  const Belief pi = stationary_distribution(m);
  std::vector<double> bary(m.dim(), 0.0);
  for (int i = 0; i < r; ++i) {
    for (int s = 0; s < m.dim(); ++s) bary[s] += chain.nu[i] * chain.q[i][s];
  }
  double err = 0.0;
  for (int s = 0; s < m.dim(); ++s) err += std::abs(bary[s] - pi[s]);
  if (err > 1e-9) {
    char msg[128];
    std::snprintf(msg, sizeof msg,
                  "recurrent-class barycenter misses the stationary belief "
                  "by %.3e",
                  err);
    throw std::logic_error(msg);
  }
  return chain;
}

double ErgodicStats::mean_abel(int lambda_index) const {
  const auto& row = abel.at(lambda_index);
  double sum = 0.0;
  for (double v : row) sum += v;
  return row.empty() ? 0.0 : sum / double(row.size());
}

ErgodicStats ergodic_check(const PosteriorChain& chain,
                           const UtilityFunction& u, int steps,
                           const std::vector<std::uint64_t>& seeds) {
  if (steps < 1) throw std::invalid_argument("steps must be at least 1");
  const int r = static_cast<int>(chain.q.size());
  std::vector<double> payoff(r);
  for (int i = 0; i < r; ++i) payoff[i] = u(chain.q[i]);

  ErgodicStats stats;
  stats.target = chain.long_run_payoff(u);
  stats.abel_lambdas = {0.99, 0.999};
  stats.abel.assign(stats.abel_lambdas.size(), {});

  for (std::uint64_t seed : seeds) {
    Rng rng(seed);
    int state = 0;  // the class's first point, fixed for reproducibility
    double sum = 0.0;
    std::vector<double> wsum(stats.abel_lambdas.size(), 0.0);
    std::vector<double> w(stats.abel_lambdas.size(), 1.0);
    for (int n = 0; n < steps; ++n) {
      sum += payoff[state];
      for (std::size_t li = 0; li < wsum.size(); ++li) {
        wsum[li] += w[li] * payoff[state];
        w[li] *= stats.abel_lambdas[li];
      }
      state = rng.categorical(chain.w_r[state]);
    }
    stats.cesaro.push_back(sum / double(steps));
    for (std::size_t li = 0; li < wsum.size(); ++li) {
      const double lambda = stats.abel_lambdas[li];
      stats.abel[li].push_back((1.0 - lambda) * wsum[li] /
                               (1.0 - std::pow(lambda, double(steps))));
    }
    stats.max_cesaro_deviation =
        std::max(stats.max_cesaro_deviation,
                 std::abs(stats.cesaro.back() - stats.target));
  }
  return stats;
}

}  // namespace markper
