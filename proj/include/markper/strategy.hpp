#ifndef MARKPER_STRATEGY_HPP
#define MARKPER_STRATEGY_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "markper/absorbing.hpp"
#include "markper/belief.hpp"
#include "markper/markov_chain.hpp"
#include "markper/utility.hpp"

namespace markper {

/**
 * Signal lottery implementing a split: in state i, signal l is sent with
 * probability weight_l * atom_l(i) / prior(i). Bayes inversion of the rows
 * recovers the split, so `posteriors` stores the atoms verbatim and a
 * simulation records them bit-exactly instead of re-deriving them with
 * fresh rounding. States the prior rules out send signal 0 surely; they
 * cannot be realized anyway.
 */
struct SignalRule {
  std::vector<std::vector<double>> rows;  // rows[state][signal]
  std::vector<Belief> posteriors;         // one per signal
  std::vector<double> weights;            // signal probabilities, sum 1

  int states() const { return static_cast<int>(rows.size()); }
  int signals() const { return static_cast<int>(posteriors.size()); }

  // Fresh Bayes update of `prior` on seeing `signal`; agrees with the
  // stored posterior to rounding. Exposed for consistency checks.
  Belief bayes_posterior(const Belief& prior, int signal) const;
};

// Throws std::invalid_argument when the split does not average to p. Splits
// with fewer atoms than states are padded with dead signals (probability
// zero everywhere, posterior = p) so a two-state rule always offers at
// least two signal labels.
SignalRule signal_rule_from_split(const Belief& p, const Split& split);

/**
 * Sender behavior: a map from the current stage prior (last posterior
 * shifted by M) to a split of that prior. Stateful strategies track their
 * own phase; reset() rewinds to stage one.
 */
class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual void reset() {}
  virtual Split act(const Belief& stage_prior) = 0;
};

// Trivial split every stage: no information ever leaves the sender.
std::unique_ptr<Strategy> babbling_strategy();

// Splits every stage prior into the vertices of its support: the receiver
// learns the state outright.
std::unique_ptr<Strategy> full_revelation_strategy();

/**
 * Keeps every posterior inside the certified absorbing set c. A stage prior
 * that is the shifted image of c[i] gets the certificate's stored
 * decomposition row; any other prior in conv(c) gets its Caratheodory
 * decomposition; priors outside conv(c) get the trivial split. Throws
 * std::invalid_argument when c fails certification.
 */
std::unique_ptr<Strategy> confined_strategy(std::vector<Belief> c,
                                            const TransitionMatrix& m,
                                            double tol_hull = kEpsHull);

/**
 * Alternates optimal finite-horizon play with silent mixing periods. Each
 * cycle plays n_eps stages of greedy splits against the stored average-value
 * tables (with l stages remaining, the split of the envelope of
 * u + a_{l-1}(. M)), then stays silent for t_eps = mixing_time(m, eps)
 * stages so the prior returns to within eps of the stationary belief.
 * n_eps = max(ceil(t_eps / eps), first horizon whose average value at the
 * stationary belief is within eps of its limit).
 */
std::unique_ptr<Strategy> block_strategy(const UtilityFunction& u,
                                         const TransitionMatrix& m,
                                         double eps);

struct SimStep {
  int state;           // realized state before the stage signal
  int signal;
  Belief stage_prior;  // public belief entering the stage
  Belief posterior;    // public belief after the signal
  double payoff;       // u(posterior)
};

struct SimTrace {
  std::uint64_t seed = 0;
  std::vector<SimStep> steps;

  double cesaro() const;
  // Truncated Abel average: (1-l) sum l^(n-1) u_n, renormalized by
  // (1 - l^N) so the weights sum to one over a finite trace.
  double abel(double lambda) const;
};

/**
 * Runs one seeded trace: the state starts from p and follows M privately;
 * each stage the strategy splits the public prior, a signal is drawn from
 * the realized state's row of the rule, the stored atom becomes the public
 * posterior, u(posterior) accrues, and the posterior shifts by M into the
 * next prior. Draw order per stage: signal, then next state.
 */
SimTrace simulate(const Belief& p, Strategy& strategy,
                  const TransitionMatrix& m, const UtilityFunction& u,
                  int horizon, std::uint64_t seed);

/**
 * The closed recurrent piece of the weight matrix of an absorbing set.
 * `w` is the full decomposition matrix of c under m (row i decomposes
 * c[i]*M over c). `recurrent` selects the closed communicating class with
 * the lowest original index; `w_r`, `nu`, `q` restrict to it. nu is the
 * stationary row of w_r, and the beliefs of the class average back to the
 * stationary belief: sum nu_i q_i = pi. Payoffs along the class follow the
 * strong law with mean long_run_payoff(u).
 */
struct PosteriorChain {
  std::vector<Belief> points;
  std::vector<std::vector<double>> w;
  std::vector<int> recurrent;            // ascending indices into points
  std::vector<std::vector<double>> w_r;  // |recurrent| x |recurrent|
  std::vector<double> nu;
  std::vector<Belief> q;                 // points[recurrent[i]]

  double long_run_payoff(const UtilityFunction& u) const;
};

// Throws std::invalid_argument when c is not certified absorbing and
// std::logic_error when the recurrent class's stationary barycenter misses
// the stationary belief by more than 1e-9 (a certificate inconsistency).
PosteriorChain posterior_chain(const std::vector<Belief>& c,
                               const TransitionMatrix& m,
                               double tol_hull = kEpsHull);

struct ErgodicStats {
  double target = 0.0;                 // sum nu_i u(q_i)
  std::vector<double> abel_lambdas;    // {0.99, 0.999}
  std::vector<double> cesaro;          // per seed
  std::vector<std::vector<double>> abel;  // [lambda index][seed]
  double max_cesaro_deviation = 0.0;

  double mean_abel(int lambda_index) const;
};

// Simulates the recurrent-class index chain per seed, starting from the
// class's first point, and accumulates Cesaro and Abel payoff averages.
ErgodicStats ergodic_check(const PosteriorChain& chain,
                           const UtilityFunction& u, int steps,
                           const std::vector<std::uint64_t>& seeds);

}  // namespace markper

#endif
