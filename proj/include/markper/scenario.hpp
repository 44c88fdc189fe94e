#ifndef MARKPER_SCENARIO_HPP
#define MARKPER_SCENARIO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "markper/common.hpp"
#include "markper/grid.hpp"
#include "markper/markov_chain.hpp"
#include "markper/utility.hpp"

namespace markper {

/**
 * One reproducible experiment: chain, payoff, discount grid, seed set, and
 * numeric tolerances. Scenarios live as schema-versioned JSON; parsing
 * resolves every default, so a parsed scenario serializes back to the same
 * bytes. Two built-in presets cover the running two-state examples.
 */
struct Scenario {
  int schema_version = 1;
  std::string name;
  int states = 2;
  std::vector<std::vector<double>> m;   // row-major transition rows
  std::string utility_builder;          // "example1", or empty for values
  std::vector<double> utility_values;   // node values when no builder
  std::vector<double> lambdas;
  int grid_resolution = 0;
  std::vector<std::uint64_t> seeds;
  Tolerances tolerances;

  TransitionMatrix matrix() const;
  SimplexGrid grid() const;
  UtilityFunction utility() const;

  bool operator==(const Scenario& other) const;
};

// "example1-M1" (reflecting chain, no absorbing contact set) and
// "example1-M2" (contraction chain, full confinement). Unknown names throw
// ScenarioParseError.
bool is_preset_scenario(const std::string& name);
Scenario preset_scenario(const std::string& name);

// Throws ScenarioParseError naming the offending field.
Scenario parse_scenario(const std::string& json_text);

// Accepts a preset name or a path to a scenario JSON file.
Scenario load_scenario(const std::string& path_or_preset);

std::string scenario_to_json(const Scenario& s);

}  // namespace markper

#endif
