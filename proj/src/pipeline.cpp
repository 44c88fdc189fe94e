#include "markper/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "markper/concavification.hpp"
#include "markper/strategy.hpp"
#include "markper/value.hpp"

namespace markper {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Fixed artifact sizes: strategy traces stay short enough to ship per seed,
// the index chain of the ergodic mode is cheap enough for long-run law
// checks. Documented constants, not knobs.
constexpr int kTraceSteps = 2000;
constexpr int kChainSteps = 100000;
constexpr double kBlockEps = 0.05;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string lambda_tag(double lambda) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", lambda);
  std::string tag(buf);
  for (char& c : tag) {
    if (c == '.') c = 'p';
  }
  return tag;
}

fs::path command_dir(const Scenario& s, const std::string& out_dir,
                     const std::string& command) {
  const fs::path dir = fs::path(out_dir) / s.name / command;
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() +
                             "' for writing");
  }
  out << content;
  if (!out) throw std::runtime_error("short write to '" + path.string() + "'");
}

json belief_json(const Belief& b) {
  json arr = json::array();
  for (int i = 0; i < b.dim(); ++i) arr.push_back(b[i]);
  return arr;
}

// The point set confined and ergodic simulations live on: the surviving
// contact nodes of the first supporting hyperplane whose contact set holds
// an absorbing subset.
std::vector<Belief> confinement_points(const UtilityFunction& u,
                                       const RegionD& region) {
  for (const RegionPiece& piece : region.pieces) {
    if (piece.absorbing_nodes.empty()) continue;
    std::vector<Belief> points;
    points.reserve(piece.absorbing_nodes.size());
    for (int idx : piece.absorbing_nodes) points.push_back(u.grid().node(idx));
    return points;
  }
  return {};
}

}  // namespace

AnalysisReport analyze_scenario(const Scenario& s) {
  const TransitionMatrix m = s.matrix();
  const UtilityFunction u = s.utility();
  const Belief pi = stationary_distribution(m);

  std::vector<std::pair<double, int>> profile;
  for (double eps : {0.5, 0.1, 0.05, 0.01}) {
    profile.emplace_back(eps, static_cast<int>(mixing_time(m, eps)));
  }

  RegionD region = build_region_D(u, m, s.tolerances);
  bool verdict = false;
  for (const RegionPiece& piece : region.pieces) {
    verdict = verdict || !piece.absorbing_nodes.empty();
  }

  Scenario coarse = s;
  coarse.grid_resolution =
      s.states == 2 ? s.grid_resolution / 2 + 1 : std::max(2, s.grid_resolution / 2);
  const RegionD coarse_region =
      build_region_D(coarse.utility(), m, coarse.tolerances);
  bool coarse_verdict = false;
  for (const RegionPiece& piece : coarse_region.pieces) {
    coarse_verdict = coarse_verdict || !piece.absorbing_nodes.empty();
  }

  return AnalysisReport{pi,
                        operator_norms(m),
                        homothety_test(m),
                        std::move(profile),
                        std::move(region),
                        Envelope::build(u).at(pi),
                        verdict,
                        coarse.grid_resolution,
                        coarse_verdict,
                        coarse_region.inradius};
}

std::vector<std::string> run_analyze(const Scenario& s,
                                     const std::string& out_dir) {
  const AnalysisReport rep = analyze_scenario(s);
  const fs::path dir = command_dir(s, out_dir, "analyze");

  json j;
  j["name"] = s.name;
  j["states"] = s.states;
  j["grid_resolution"] = s.grid_resolution;
  j["stationary"] = belief_json(rep.stationary);
  j["norms"] = {{"l1", rep.norms.l1},
                {"l2", rep.norms.l2},
                {"linf", rep.norms.linf},
                {"l2_exceeds_one", rep.norms.l2_exceeds_one}};
  j["homothety"] = {{"is_homothety", rep.homothety.is_homothety},
                    {"ratio", rep.homothety.ratio},
                    {"per_state_ratios", rep.homothety.per_state_ratios}};
  j["mixing"] = json::array();
  for (const auto& [eps, steps] : rep.mixing_profile) {
    j["mixing"].push_back({{"eps", eps}, {"steps", steps}});
  }
  j["cav_at_stationary"] = rep.cav_at_stationary;
  j["optimum_attainable"] = rep.optimum_attainable;

  json pieces = json::array();
  for (const RegionPiece& piece : rep.region.pieces) {
    json hull = json::array();
    for (const Belief& v : piece.hull_vertices) hull.push_back(belief_json(v));
    pieces.push_back(
        {{"level", piece.hyperplane.level},
         {"z", piece.hyperplane.z},
         {"contact_count", piece.contact_nodes.size()},
         {"absorbing_count", piece.absorbing_nodes.size()},
         {"hull_vertices", std::move(hull)}});
  }
  j["region"] = {{"inradius", rep.region.inradius},
                 {"pieces", std::move(pieces)}};
  j["coarse"] = {{"resolution", rep.coarse_resolution},
                 {"optimum_attainable", rep.coarse_verdict},
                 {"inradius", rep.coarse_inradius}};

  const fs::path path = dir / "analysis.json";
  write_file(path, j.dump(2) + "\n");
  return {path.generic_string()};
}

std::vector<std::string> run_value(const Scenario& s,
                                   const std::string& out_dir) {
  const TransitionMatrix m = s.matrix();
  const UtilityFunction u = s.utility();
  const Belief pi = stationary_distribution(m);
  const RegionD region = build_region_D(u, m, s.tolerances);
  const Envelope env = Envelope::build(u);
  const bool bounded = !region.empty() && region.inradius > 0.0;
  const fs::path dir = command_dir(s, out_dir, "value");
  const SimplexGrid& grid = u.grid();

  std::vector<std::string> written;
  std::string summary = "lambda,value_at_stationary,closed_form_at_stationary,"
                        "iterations,residual\n";
  for (double lambda : s.lambdas) {
    const ValueFunction vf =
        value_iteration(u, m, lambda, s.tolerances.vi_tol);

    std::string csv = s.states == 2 ? "p,value_iteration,closed_form,lower,upper\n"
                                    : "q0,q1,q2,value_iteration,closed_form,lower,upper\n";
    for (int i = 0; i < grid.size(); ++i) {
      const Belief q = grid.node(i);
      if (s.states == 2) {
        csv += num(q.p());
      } else {
        csv += num(q[0]) + "," + num(q[1]) + "," + num(q[2]);
      }
      csv += "," + num(vf.values[i]);
      csv += ",";
      if (region.contains(q)) {
        csv += num(closed_form_value(q, u, m, lambda, region));
      }
      if (bounded) {
        const ValueBounds b = sandwich_bounds(q, u, m, lambda, region);
        csv += "," + num(b.lower) + "," + num(b.upper);
      } else {
        csv += ",,";
      }
      csv += "\n";
    }
    const fs::path table = dir / ("table_lambda_" + lambda_tag(lambda) + ".csv");
    write_file(table, csv);
    written.push_back(table.generic_string());

    summary += num(lambda) + "," + num(vf.at(pi)) + ",";
    if (region.contains(pi)) {
      summary += num(closed_form_value(pi, u, m, lambda, region));
    }
    summary += "," + std::to_string(vf.iterations) + "," + num(vf.residual) +
               "\n";
  }
  const fs::path spath = dir / "summary.csv";
  write_file(spath, summary);
  written.push_back(spath.generic_string());
  return written;
}

namespace {

std::string trace_csv(const SimTrace& trace, int states) {
  std::string csv = states == 2 ? "step,state,signal,q0,q1,payoff\n"
                                : "step,state,signal,q0,q1,q2,payoff\n";
  for (std::size_t n = 0; n < trace.steps.size(); ++n) {
    const SimStep& step = trace.steps[n];
    csv += std::to_string(n + 1) + "," + std::to_string(step.state) + "," +
           std::to_string(step.signal);
    for (int i = 0; i < states; ++i) csv += "," + num(step.posterior[i]);
    csv += "," + num(step.payoff) + "\n";
  }
  return csv;
}

}  // namespace

std::vector<std::string> run_simulate(const Scenario& s,
                                      const std::string& out_dir,
                                      const std::string& mode) {
  const TransitionMatrix m = s.matrix();
  const UtilityFunction u = s.utility();
  const Belief pi = stationary_distribution(m);
  const RegionD region = build_region_D(u, m, s.tolerances);
  const std::vector<Belief> confinement = confinement_points(u, region);

  std::vector<std::string> modes;
  if (mode.empty()) {
    modes = {"babbling", "reveal", "block"};
    if (!confinement.empty()) {
      modes.push_back("confined");
      modes.push_back("ergodic");
    }
  } else {
    modes = {mode};
  }

  std::vector<std::string> written;
  for (const std::string& current : modes) {
    const fs::path dir = command_dir(s, out_dir, "simulate") / current;
    fs::create_directories(dir);

    if (current == "ergodic") {
      if (confinement.empty()) {
        throw std::runtime_error(
            "ergodic mode needs an absorbing contact set and this scenario "
            "has none");
      }
      const PosteriorChain chain =
          posterior_chain(confinement, m, s.tolerances.eps_hull);
      const ErgodicStats stats =
          ergodic_check(chain, u, kChainSteps, s.seeds);

      std::string csv = "seed,cesaro,abel_0p99,abel_0p999\n";
      double mean_cesaro = 0.0;
      for (std::size_t i = 0; i < s.seeds.size(); ++i) {
        csv += std::to_string(s.seeds[i]) + "," + num(stats.cesaro[i]) + "," +
               num(stats.abel[0][i]) + "," + num(stats.abel[1][i]) + "\n";
        mean_cesaro += stats.cesaro[i];
      }
      mean_cesaro /= double(s.seeds.size());
      const fs::path stats_path = dir / "stats.csv";
      write_file(stats_path, csv);
      written.push_back(stats_path.generic_string());

      json j;
      j["mode"] = current;
      j["steps"] = kChainSteps;
      j["seeds"] = s.seeds.size();
      j["target"] = stats.target;
      j["mean_cesaro"] = mean_cesaro;
      j["max_cesaro_deviation"] = stats.max_cesaro_deviation;
      j["mean_abel_0p99"] = stats.mean_abel(0);
      j["mean_abel_0p999"] = stats.mean_abel(1);
      const fs::path sum_path = dir / "summary.json";
      write_file(sum_path, j.dump(2) + "\n");
      written.push_back(sum_path.generic_string());
      continue;
    }

    std::unique_ptr<Strategy> strategy;
    if (current == "babbling") {
      strategy = babbling_strategy();
    } else if (current == "reveal") {
      strategy = full_revelation_strategy();
    } else if (current == "block") {
      strategy = block_strategy(u, m, kBlockEps);
    } else if (current == "confined") {
      if (confinement.empty()) {
        throw std::runtime_error(
            "confined mode needs an absorbing contact set and this scenario "
            "has none");
      }
      strategy = confined_strategy(confinement, m, s.tolerances.eps_hull);
    } else {
      throw ScenarioParseError("unknown simulate mode '" + current + "'");
    }

    std::string csv = "seed,cesaro,abel_0p99,abel_0p999\n";
    double mean_cesaro = 0.0, lo = 0.0, hi = 0.0;
    bool first = true;
    for (std::uint64_t seed : s.seeds) {
      const SimTrace trace = simulate(pi, *strategy, m, u, kTraceSteps, seed);
      const fs::path tpath = dir / ("trace_seed" + std::to_string(seed) + ".csv");
      write_file(tpath, trace_csv(trace, s.states));
      written.push_back(tpath.generic_string());
      const double c = trace.cesaro();
      csv += std::to_string(seed) + "," + num(c) + "," +
             num(trace.abel(0.99)) + "," + num(trace.abel(0.999)) + "\n";
      mean_cesaro += c;
      lo = first ? c : std::min(lo, c);
      hi = first ? c : std::max(hi, c);
      first = false;
    }
    mean_cesaro /= double(s.seeds.size());
    const fs::path stats_path = dir / "stats.csv";
    write_file(stats_path, csv);
    written.push_back(stats_path.generic_string());

    json j;
    j["mode"] = current;
    j["steps"] = kTraceSteps;
    j["seeds"] = s.seeds.size();
    j["mean_cesaro"] = mean_cesaro;
    j["min_cesaro"] = lo;
    j["max_cesaro"] = hi;
    const fs::path sum_path = dir / "summary.json";
    write_file(sum_path, j.dump(2) + "\n");
    written.push_back(sum_path.generic_string());
  }
  return written;
}

std::vector<std::string> emit_figures(const Scenario& s,
                                      const std::string& out_dir) {
  const TransitionMatrix m = s.matrix();
  const UtilityFunction u = s.utility();
  const Belief pi = stationary_distribution(m);
  const RegionD region = build_region_D(u, m, s.tolerances);
  const Envelope env = Envelope::build(u);
  const SimplexGrid& grid = u.grid();
  const fs::path dir = command_dir(s, out_dir, "figures");
  std::vector<std::string> written;

  // Payoff and its envelope, one row per node.
  {
    std::string csv = s.states == 2 ? "p,u,cav\n" : "q0,q1,q2,u,cav\n";
    for (int i = 0; i < grid.size(); ++i) {
      if (s.states == 2) {
        csv += num(grid.node_p(i));
      } else {
        const Belief q = grid.node(i);
        csv += num(q[0]) + "," + num(q[1]) + "," + num(q[2]);
      }
      csv += "," + num(u.at_node(i)) + "," + num(env.node_values()[i]) + "\n";
    }
    const fs::path path = dir / "payoff_envelope.csv";
    write_file(path, csv);
    written.push_back(path.generic_string());
  }

  // Region pieces: one summary row per supporting hyperplane, plus the hull
  // vertices for drawing.
  {
    std::string summary = "piece,level";
    for (int i = 0; i < s.states; ++i) summary += ",z" + std::to_string(i);
    summary += ",contact_count,absorbing_count,inradius\n";
    std::string vertices = s.states == 2 ? "piece,vertex,q0,q1\n"
                                         : "piece,vertex,q0,q1,q2\n";
    for (std::size_t k = 0; k < region.pieces.size(); ++k) {
      const RegionPiece& piece = region.pieces[k];
      summary += std::to_string(k) + "," + num(piece.hyperplane.level);
      for (int i = 0; i < s.states; ++i) {
        summary += "," + num(piece.hyperplane.z[i]);
      }
      summary += "," + std::to_string(piece.contact_nodes.size()) + "," +
                 std::to_string(piece.absorbing_nodes.size()) + "," +
                 num(region.inradius) + "\n";
      for (std::size_t v = 0; v < piece.hull_vertices.size(); ++v) {
        vertices += std::to_string(k) + "," + std::to_string(v);
        for (int i = 0; i < s.states; ++i) {
          vertices += "," + num(piece.hull_vertices[v][i]);
        }
        vertices += "\n";
      }
    }
    const fs::path spath = dir / "region_summary.csv";
    write_file(spath, summary);
    written.push_back(spath.generic_string());
    const fs::path vpath = dir / "region_pieces.csv";
    write_file(vpath, vertices);
    written.push_back(vpath.generic_string());
  }

  // Discounted values as the discount approaches one, at the simplex
  // vertices, the uniform belief, and the stationary belief.
  {
    std::vector<std::pair<std::string, Belief>> probes;
    for (int i = 0; i < s.states; ++i) {
      probes.emplace_back("vertex" + std::to_string(i),
                          Belief::vertex(s.states, i));
    }
    probes.emplace_back("uniform", Belief::uniform(s.states));
    probes.emplace_back("stationary", pi);

    std::string csv = "lambda,probe,value\n";
    for (double lambda : {0.9, 0.99, 0.999}) {
      const ValueFunction vf =
          value_iteration(u, m, lambda, s.tolerances.vi_tol);
      for (const auto& [label, q] : probes) {
        csv += num(lambda) + "," + label + "," + num(vf.at(q)) + "\n";
      }
    }
    const fs::path path = dir / "lambda_sweep.csv";
    write_file(path, csv);
    written.push_back(path.generic_string());
  }
  return written;
}

}  // namespace markper
