#ifndef MARKPER_PIPELINE_HPP
#define MARKPER_PIPELINE_HPP

#include <string>
#include <utility>
#include <vector>

#include "markper/absorbing.hpp"
#include "markper/markov_chain.hpp"
#include "markper/scenario.hpp"

namespace markper {

/**
 * Everything the analyze command reports: chain diagnostics, the absorbing
 * region with its inner radius, and the verdict of the central question,
 * whether some contact set holds an absorbing set so the long-run value
 * reaches the static optimum Cav u at the stationary belief. The same
 * analysis rerun at half resolution guards against grid artifacts.
 */
struct AnalysisReport {
  Belief stationary;
  OperatorNorms norms;
  HomothetyReport homothety;
  std::vector<std::pair<double, int>> mixing_profile;  // (eps, steps)
  RegionD region;
  double cav_at_stationary = 0.0;
  bool optimum_attainable = false;

  int coarse_resolution = 0;
  bool coarse_verdict = false;
  double coarse_inradius = 0.0;
};

AnalysisReport analyze_scenario(const Scenario& s);

// Commands write deterministic artifacts (no timestamps, fixed float
// formatting) under <out_dir>/<scenario name>/<command>/ and return the
// paths written. Reruns produce byte-identical files.
std::vector<std::string> run_analyze(const Scenario& s,
                                     const std::string& out_dir);
std::vector<std::string> run_value(const Scenario& s,
                                   const std::string& out_dir);
// mode: one of babbling, reveal, confined, block, ergodic; empty runs every
// mode the scenario supports (confined and ergodic need a nonempty region).
std::vector<std::string> run_simulate(const Scenario& s,
                                      const std::string& out_dir,
                                      const std::string& mode = "");
std::vector<std::string> emit_figures(const Scenario& s,
                                      const std::string& out_dir);

}  // namespace markper

#endif
