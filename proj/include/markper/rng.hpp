#ifndef MARKPER_RNG_HPP
#define MARKPER_RNG_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace markper {

/**
 * The one random source of the project. Reproducibility contract:
 *
 *   engine     std::mt19937_64, whose seeding and output sequence the
 *              standard pins down exactly;
 *   seeding    the user seed passes through one SplitMix64 step before it
 *              reaches the engine, so seeds 1,2,3,... do not start in
 *              correlated states;
 *   uniform01  top 53 bits of one engine draw, scaled to [0,1);
 *   categorical one uniform01 draw against the cumulative weights.
 *
 * No std::*_distribution is used anywhere (their mappings are
 * implementation-defined). Identical seeds give identical traces on every
 * platform.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed)
      : base_seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const { return base_seed_; }

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Index i with probability weights[i] / sum. Weights must be nonnegative
  // with a positive sum; zero-weight entries are never selected.
  int categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("negative categorical weight");
      total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("empty categorical support");
    const double x = uniform01() * total;
    double cum = 0.0;
    int last_positive = -1;
    for (int i = 0; i < static_cast<int>(weights.size()); ++i) {
      if (weights[i] <= 0.0) continue;
      cum += weights[i];
      last_positive = i;
      if (x < cum) return i;
    }
    return last_positive;  // x landed in the rounding slack at the top
  }

  // Independent stream derived from (base seed, stream index); used when one
  // logical seed has to feed several components without sharing state.
  Rng derived(std::uint64_t stream) const {
    return Rng(splitmix64(base_seed_ + 0x9e3779b97f4a7c15ull * (stream + 1)));
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::uint64_t base_seed_;
  std::mt19937_64 engine_;
};

}  // namespace markper

#endif
