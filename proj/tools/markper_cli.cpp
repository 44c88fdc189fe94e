#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "markper/pipeline.hpp"

using namespace markper;

int main(int argc, char** argv) {
  CLI::App app{
      "Dynamic persuasion toolkit: absorbing-region analysis, value tables, "
      "seeded simulations, plot data"};
  app.require_subcommand(1);

  std::string scenario_arg;
  std::string out_dir = "out";
  std::string mode;
  int grid = 0;
  std::vector<double> lambdas;
  std::vector<std::uint64_t> seeds;
  double tol_hull = 0.0, tol_contact = 0.0, tol_vi = 0.0;

  app.add_option("--scenario", scenario_arg,
                 "Scenario JSON path or preset (example1-M1, example1-M2)")
      ->required();
  app.add_option("--out", out_dir, "Output root directory")
      ->capture_default_str();
  app.add_option("--grid", grid, "Override the grid resolution");
  app.add_option("--seeds", seeds, "Override the seed list")->delimiter(',');
  app.add_option("--lambda", lambdas, "Override the discount list")
      ->delimiter(',');
  app.add_option("--tol-hull", tol_hull, "Hull reconstruction tolerance");
  app.add_option("--tol-contact", tol_contact, "Contact set tolerance");
  app.add_option("--tol-vi", tol_vi, "Value iteration stopping tolerance");

  auto* cmd_analyze = app.add_subcommand(
      "analyze", "Chain and region diagnostics with the attainability verdict");
  auto* cmd_value = app.add_subcommand(
      "value", "Per-discount value tables: iteration, closed form, bounds");
  auto* cmd_simulate =
      app.add_subcommand("simulate", "Seeded strategy and chain simulations");
  cmd_simulate->add_option(
      "--mode", mode,
      "babbling|reveal|confined|block|ergodic (default: every supported mode)");
  auto* cmd_figures = app.add_subcommand(
      "figures", "Plot data: payoff and envelope, region, discount sweep");
  auto* cmd_all =
      app.add_subcommand("all", "analyze, value, simulate, and figures");
  for (auto* cmd : {cmd_analyze, cmd_value, cmd_simulate, cmd_figures, cmd_all}) {
    cmd->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  // The orchestration is single-threaded, so any positive cap is already
  // honored; a malformed value is still an input error.
  if (const char* cap = std::getenv("MP_THREADS")) {
    if (std::atoi(cap) < 1) {
      std::cerr << "error: MP_THREADS must be a positive integer\n";
      return 2;
    }
  }

  try {
    Scenario scenario = load_scenario(scenario_arg);
    if (grid != 0) {
      if (grid < 2) {
        throw ScenarioParseError("--grid must be at least 2");
      }
      scenario.grid_resolution = grid;
    }
    if (!seeds.empty()) scenario.seeds = seeds;
    if (!lambdas.empty()) {
      for (double lambda : lambdas) {
        if (!(lambda >= 0.0 && lambda < 1.0)) {
          throw ScenarioParseError("--lambda values live in [0, 1)");
        }
      }
      scenario.lambdas = lambdas;
    }
    if (tol_hull > 0.0) scenario.tolerances.eps_hull = tol_hull;
    if (tol_contact > 0.0) scenario.tolerances.contact_rel = tol_contact;
    if (tol_vi > 0.0) scenario.tolerances.vi_tol = tol_vi;

    std::vector<std::string> written;
    const auto append = [&written](std::vector<std::string> more) {
      for (std::string& path : more) written.push_back(std::move(path));
    };
    const bool all = cmd_all->parsed();
    if (all || cmd_analyze->parsed()) append(run_analyze(scenario, out_dir));
    if (all || cmd_value->parsed()) append(run_value(scenario, out_dir));
    if (all || cmd_simulate->parsed()) {
      append(run_simulate(scenario, out_dir, mode));
    }
    if (all || cmd_figures->parsed()) append(emit_figures(scenario, out_dir));

    for (const std::string& path : written) std::cout << path << "\n";
    return 0;
  } catch (const ScenarioParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedChainError& e) {
    std::cerr << "error: unsupported chain: " << e.what() << "\n";
    return 3;
  } catch (const NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
