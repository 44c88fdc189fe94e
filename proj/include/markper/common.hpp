#ifndef MARKPER_COMMON_HPP
#define MARKPER_COMMON_HPP

#include <stdexcept>
#include <string>

namespace markper {

// Numerical defaults used across the library. All of them can be overridden
// per call or through a Scenario; the values here are the documented contract.
struct Tolerances {
  double eps_num = 1e-9;      // simplex membership / stochasticity slack
  double eps_hull = 1e-8;     // convex hull reconstruction slack (per coordinate)
  double contact_rel = 1e-6;  // contact set threshold, relative to max |u|
  double vi_tol = 1e-9;       // sup-norm stopping rule for value iteration
};

inline constexpr double kEpsNum = 1e-9;
inline constexpr double kEpsHull = 1e-8;
inline constexpr long kMixingCap = 1000000;
inline constexpr long kValueIterationCap = 100000;

// Chain is reducible, periodic, or otherwise outside the supported class.
class UnsupportedChainError : public std::runtime_error {
 public:
  explicit UnsupportedChainError(const std::string& what)
      : std::runtime_error(what) {}
};

// An iteration cap was exceeded before reaching the requested tolerance.
class NonConvergenceError : public std::runtime_error {
 public:
  explicit NonConvergenceError(const std::string& what)
      : std::runtime_error(what) {}
};

// Scenario file could not be parsed or failed validation.
class ScenarioParseError : public std::runtime_error {
 public:
  explicit ScenarioParseError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace markper

#endif
