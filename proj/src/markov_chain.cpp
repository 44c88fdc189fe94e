#include "markper/markov_chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace markper {

namespace {

std::vector<std::vector<int>> adjacency(const Eigen::MatrixXd& m) {
  const int k = static_cast<int>(m.rows());
  std::vector<std::vector<int>> adj(k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (m(i, j) > 0.0) adj[i].push_back(j);
    }
  }
  return adj;
}

std::vector<char> reachable_from(const std::vector<std::vector<int>>& adj,
                                 int source) {
  std::vector<char> seen(adj.size(), 0);
  std::queue<int> q;
  q.push(source);
  seen[source] = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        q.push(v);
      }
    }
  }
  return seen;
}

// Period of an irreducible chain: gcd of (level[u] + 1 - level[v]) over all
// edges, levels from a breadth-first search rooted at state 0.
int chain_period(const std::vector<std::vector<int>>& adj) {
  const int k = static_cast<int>(adj.size());
  std::vector<int> level(k, -1);
  std::queue<int> q;
  q.push(0);
  level[0] = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[u]) {
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        q.push(v);
      }
    }
  }
  int g = 0;
  for (int u = 0; u < k; ++u) {
    for (int v : adj[u]) {
      g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
    }
  }
  return g == 0 ? 1 : g;
}

}  // namespace

TransitionMatrix::TransitionMatrix(const std::vector<std::vector<double>>& rows,
                                   double eps) {
  const int k = static_cast<int>(rows.size());
  if (k < 2) throw std::invalid_argument("chain needs at least two states");
  m_.resize(k, k);
  for (int i = 0; i < k; ++i) {
    if (static_cast<int>(rows[i].size()) != k) {
      throw std::invalid_argument("transition matrix is not square");
    }
    Belief r(rows[i], eps);  // validates and renormalizes the row
    for (int j = 0; j < k; ++j) m_(i, j) = r[j];
  }
  auto adj = adjacency(m_);
  irreducible_ = true;
  for (int s = 0; s < k && irreducible_; ++s) {
    auto seen = reachable_from(adj, s);
    irreducible_ = std::all_of(seen.begin(), seen.end(),
                               [](char c) { return c != 0; });
  }
  period_ = irreducible_ ? chain_period(adj) : 0;
  aperiodic_ = irreducible_ && period_ == 1;
}

Belief TransitionMatrix::row(int i) const {
  std::vector<double> r(dim());
  for (int j = 0; j < dim(); ++j) r[j] = m_(i, j);
  return Belief(std::move(r));
}

Belief TransitionMatrix::advance(const Belief& p, long n) const {
  if (p.dim() != dim()) throw std::invalid_argument("belief dimension mismatch");
  if (n < 0) throw std::invalid_argument("negative step count");
  Eigen::RowVectorXd v(dim());
  for (int i = 0; i < dim(); ++i) v(i) = p[i];
  for (long s = 0; s < n; ++s) v = v * m_;
  std::vector<double> out(v.data(), v.data() + dim());
  return Belief(std::move(out));
}

Belief stationary_distribution(const TransitionMatrix& m) {
  if (!m.irreducible() || !m.aperiodic()) {
    throw UnsupportedChainError(
        "stationary distribution requires an irreducible aperiodic chain");
  }
  const int k = m.dim();
  Eigen::MatrixXd a = m.matrix().transpose() - Eigen::MatrixXd::Identity(k, k);
  a.row(k - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  b(k - 1) = 1.0;
  Eigen::VectorXd pi = a.fullPivLu().solve(b);
  Eigen::RowVectorXd residual = pi.transpose() * m.matrix() - pi.transpose();
  if (residual.cwiseAbs().maxCoeff() > 1e-12) {
    throw std::logic_error("stationary fixed point residual too large");
  }
  std::vector<double> w(pi.data(), pi.data() + k);
  return Belief(std::move(w));
}

long mixing_time(const TransitionMatrix& m, double eps, long cap) {
  if (!m.irreducible() || !m.aperiodic()) {
    throw UnsupportedChainError("mixing time requires irreducible aperiodic chain");
  }
  if (eps <= 0.0) throw std::invalid_argument("mixing tolerance must be positive");
  const Belief pi = stationary_distribution(m);
  const int k = m.dim();
  Eigen::MatrixXd power = m.matrix();
  for (long n = 1; n <= cap; ++n) {
    double worst = 0.0;
    for (int i = 0; i < k; ++i) {
      double d = 0.0;
      for (int j = 0; j < k; ++j) d += std::abs(power(i, j) - pi[j]);
      worst = std::max(worst, d);
    }
    if (worst <= eps) return n;
    power = power * m.matrix();
  }
  throw NonConvergenceError("mixing time cap exceeded");
}

OperatorNorms operator_norms(const TransitionMatrix& m) {
  OperatorNorms norms;
  const int k = m.dim();
  for (int j = 0; j < k; ++j) {
    norms.l1 = std::max(norms.l1, m.matrix().col(j).sum());
  }
  for (int i = 0; i < k; ++i) {
    norms.linf = std::max(norms.linf, m.matrix().row(i).sum());
  }
  // Power iteration on M^T M; the all-ones start has positive overlap with
  // the Perron direction of a nonnegative matrix.
  Eigen::MatrixXd mtm = m.matrix().transpose() * m.matrix();
  Eigen::VectorXd v = Eigen::VectorXd::Ones(k).normalized();
  double prev = 0.0;
  for (int it = 0; it < 100000; ++it) {
    Eigen::VectorXd w = mtm * v;
    const double lam = v.dot(w);
    v = w.normalized();
    if (std::abs(lam - prev) <= 1e-15 * std::max(1.0, std::abs(lam))) {
      prev = lam;
      break;
    }
    prev = lam;
  }
  norms.l2 = std::sqrt(std::max(0.0, prev));
  norms.l2_exceeds_one = norms.l2 > 1.0 + 1e-12;
  return norms;
}

HomothetyReport homothety_test(const TransitionMatrix& m) {
  HomothetyReport report;
  if (!m.irreducible() || !m.aperiodic()) return report;
  const Belief pi = stationary_distribution(m);
  const int k = m.dim();
  report.per_state_ratios.resize(k);
  bool rows_match = true;
  for (int i = 0; i < k; ++i) {
    const double beta = (m.entry(i, i) - pi[i]) / (1.0 - pi[i]);
    report.per_state_ratios[i] = beta;
    for (int j = 0; j < k; ++j) {
      const double expect = (i == j) ? beta + (1.0 - beta) * pi[j]
                                     : (1.0 - beta) * pi[j];
      if (std::abs(m.entry(i, j) - expect) > kEpsNum) rows_match = false;
    }
  }
  double lo = *std::min_element(report.per_state_ratios.begin(),
                                report.per_state_ratios.end());
  double hi = *std::max_element(report.per_state_ratios.begin(),
                                report.per_state_ratios.end());
  if (rows_match && hi - lo <= kEpsNum && lo >= 0.0 && hi < 1.0) {
    report.is_homothety = true;
    report.ratio = 0.5 * (lo + hi);
  }
  return report;
}

Belief advance_belief(const Belief& p, const TransitionMatrix& m, long n) {
  return m.advance(p, n);
}

}  // namespace markper
