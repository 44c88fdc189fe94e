#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "markper/pipeline.hpp"

using namespace markper;
namespace fs = std::filesystem;

namespace {

Scenario small_m2() {
  Scenario s = preset_scenario("example1-M2");
  s.grid_resolution = 201;
  s.lambdas = {0.0, 0.5};
  s.seeds = {1, 2};
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> fields_of(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

const std::string& find_written(const std::vector<std::string>& written,
                                const std::string& suffix) {
  for (const std::string& path : written) {
    if (path.size() >= suffix.size() &&
        path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
      return path;
    }
  }
  REQUIRE_MESSAGE(false, "no artifact ends with ", suffix);
  static const std::string none;
  return none;
}

}  // namespace

TEST_CASE("analysis verdicts for the running chains") {
  const AnalysisReport yes = analyze_scenario(small_m2());
  CHECK(yes.stationary[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(yes.cav_at_stationary == doctest::Approx(0.5125).epsilon(1e-12));
  CHECK(yes.optimum_attainable);
  CHECK(yes.region.inradius == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(yes.coarse_verdict);
  CHECK(yes.coarse_inradius == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(yes.homothety.is_homothety);
  CHECK(yes.homothety.ratio == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(yes.norms.l1 == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(yes.norms.l2_exceeds_one);
  CHECK(yes.norms.l2 > 1.0);
  REQUIRE(yes.mixing_profile.size() == 4);
  CHECK(yes.mixing_profile[2].second == 4);  // eps = 0.05

  Scenario m1 = preset_scenario("example1-M1");
  m1.grid_resolution = 201;
  const AnalysisReport no = analyze_scenario(m1);
  CHECK(no.stationary[0] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(!no.optimum_attainable);
  CHECK(no.region.inradius == 0.0);
  CHECK(!no.coarse_verdict);
  CHECK(!no.homothety.is_homothety);
}

TEST_CASE("analyze artifact holds the report") {
  const Scenario s = small_m2();
  const auto written = run_analyze(s, "pipeline_out/a1");
  REQUIRE(written.size() == 1);

  const auto j = nlohmann::json::parse(read_file(written[0]));
  CHECK(j["name"] == "example1-M2");
  CHECK(j["optimum_attainable"] == true);
  CHECK(double(j["cav_at_stationary"]) == doctest::Approx(0.5125));
  CHECK(double(j["stationary"][0]) == doctest::Approx(0.25));
  CHECK(double(j["region"]["inradius"]) == doctest::Approx(0.5).epsilon(1e-4));
  REQUIRE(j["region"]["pieces"].size() >= 1);
  CHECK(int(j["region"]["pieces"][0]["absorbing_count"]) == 2);
  CHECK(j["coarse"]["optimum_attainable"] == true);
  CHECK(j["homothety"]["is_homothety"] == true);

  // Rerun is byte-identical.
  const std::string before = read_file(written[0]);
  run_analyze(s, "pipeline_out/a1");
  CHECK(read_file(written[0]) == before);
}

TEST_CASE("value tables: iteration, closed form, bounds") {
  const Scenario s = small_m2();
  const auto written = run_value(s, "pipeline_out/v1");

  const auto& zero_table = find_written(written, "table_lambda_0.csv");
  const auto& half_table = find_written(written, "table_lambda_0p5.csv");
  const auto& summary = find_written(written, "summary.csv");

  const auto zero_lines = lines_of(read_file(zero_table));
  REQUIRE(zero_lines.size() == 202);  // header + one row per node
  CHECK(zero_lines[0] == "p,value_iteration,closed_form,lower,upper");

  // lambda = 0 row at the stationary belief: everything is Cav u.
  {
    const auto f = fields_of(zero_lines[51]);  // node 50 is p = 0.25
    REQUIRE(f.size() == 5);
    CHECK(std::stod(f[0]) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(std::stod(f[1]) == doctest::Approx(0.5125).epsilon(1e-9));
    CHECK(std::stod(f[2]) == doctest::Approx(0.5125).epsilon(1e-9));
  }

  // lambda = 0.5 at p = 0.5: the closed-form point value.
  {
    const auto f = fields_of(lines_of(read_file(half_table))[101]);
    REQUIRE(f.size() == 5);
    CHECK(std::stod(f[0]) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::stod(f[1]) == doctest::Approx(0.82).epsilon(3e-3));
    CHECK(std::stod(f[2]) == doctest::Approx(0.82).epsilon(1e-9));
    CHECK(std::stod(f[3]) <= std::stod(f[1]) + 1e-6);
    CHECK(std::stod(f[4]) >= std::stod(f[1]) - 1e-6);
  }

  // Off the region the closed-form column is empty.
  {
    const auto f = fields_of(lines_of(read_file(half_table))[200]);  // p close to 1
    REQUIRE(f.size() == 5);
    CHECK(f[2].empty());
    CHECK(!f[3].empty());
  }

  const auto sum_lines = lines_of(read_file(summary));
  REQUIRE(sum_lines.size() == 3);
  const auto sum_half = fields_of(sum_lines[2]);
  CHECK(std::stod(sum_half[0]) == 0.5);
  CHECK(std::stod(sum_half[1]) == doctest::Approx(0.5125).epsilon(1e-6));
  CHECK(std::stod(sum_half[2]) == doctest::Approx(0.5125).epsilon(1e-9));

  // Determinism: a rerun into a fresh root matches byte for byte.
  const auto again = run_value(s, "pipeline_out/v2");
  REQUIRE(again.size() == written.size());
  for (std::size_t i = 0; i < written.size(); ++i) {
    CHECK(read_file(again[i]) == read_file(written[i]));
  }
}

TEST_CASE("value tables without an absorbing region") {
  Scenario s = preset_scenario("example1-M1");
  s.grid_resolution = 201;
  s.lambdas = {0.5};
  const auto written = run_value(s, "pipeline_out/v3");
  const auto lines = lines_of(read_file(find_written(written, "table_lambda_0p5.csv")));
  REQUIRE(lines.size() == 202);
  // No closed form anywhere, no bounds: the region is empty.
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = fields_of(lines[i]);
    REQUIRE(f.size() == 5);
    CHECK(f[2].empty());
    CHECK(f[3].empty());
    CHECK(f[4].empty());
  }
}

TEST_CASE("simulation artifacts cover every supported mode") {
  const Scenario s = small_m2();
  const auto written = run_simulate(s, "pipeline_out/s1");

  for (const std::string mode :
       {"babbling", "reveal", "block", "confined", "ergodic"}) {
    const auto& stats = find_written(written, mode + std::string("/stats.csv"));
    const auto stat_lines = lines_of(read_file(stats));
    REQUIRE(stat_lines.size() == 3);  // header + 2 seeds
    CHECK(stat_lines[0] == "seed,cesaro,abel_0p99,abel_0p999");
    const auto& summary = find_written(written, mode + std::string("/summary.json"));
    const auto j = nlohmann::json::parse(read_file(summary));
    CHECK(j["mode"] == mode);
    CHECK(int(j["seeds"]) == 2);
  }

  // Strategy modes ship one trace per seed.
  const auto trace = lines_of(
      read_file(find_written(written, "confined/trace_seed1.csv")));
  REQUIRE(trace.size() == 2001);
  CHECK(trace[0] == "step,state,signal,q0,q1,payoff");
  const auto row = fields_of(trace[1]);
  REQUIRE(row.size() == 6);
  CHECK(std::stoi(row[0]) == 1);

  // The ergodic chain hits its long-run target.
  const auto j = nlohmann::json::parse(
      read_file(find_written(written, "ergodic/summary.json")));
  CHECK(double(j["target"]) == doctest::Approx(0.5125).epsilon(1e-9));
  CHECK(std::abs(double(j["mean_cesaro"]) - 0.5125) <= 0.01);
  CHECK(double(j["max_cesaro_deviation"]) <= 0.01);

  // Rerun determinism across every artifact.
  const auto again = run_simulate(s, "pipeline_out/s2");
  REQUIRE(again.size() == written.size());
  for (std::size_t i = 0; i < written.size(); ++i) {
    CHECK(read_file(again[i]) == read_file(written[i]));
  }

  // Mode restriction and unsupported requests.
  const auto only = run_simulate(s, "pipeline_out/s3", "babbling");
  CHECK(only.size() == 4);  // 2 traces + stats + summary
  CHECK_THROWS_AS(run_simulate(s, "pipeline_out/s4", "bogus"),
                  ScenarioParseError);

  Scenario m1 = preset_scenario("example1-M1");
  m1.grid_resolution = 201;
  m1.seeds = {1};
  CHECK_THROWS_AS(run_simulate(m1, "pipeline_out/s5", "ergodic"),
                  std::runtime_error);
  const auto fallback = run_simulate(m1, "pipeline_out/s6");
  for (const std::string& path : fallback) {
    CHECK(path.find("ergodic") == std::string::npos);
    CHECK(path.find("confined") == std::string::npos);
  }
}

TEST_CASE("figure data reproduces the headline numbers") {
  const Scenario s = preset_scenario("example1-M2");  // full grid
  const auto written = emit_figures(s, "pipeline_out/f1");

  const auto env_lines =
      lines_of(read_file(find_written(written, "payoff_envelope.csv")));
  REQUIRE(env_lines.size() == 2002);
  CHECK(env_lines[0] == "p,u,cav");
  {
    const auto f = fields_of(env_lines[1]);  // p = 0
    CHECK(std::stod(f[1]) == 0.0);
    CHECK(std::stod(f[2]) == 0.0);
  }
  {
    const auto f = fields_of(env_lines[1163]);  // node 1162, p = 0.581
    CHECK(std::stod(f[0]) == doctest::Approx(0.581).epsilon(1e-12));
    CHECK(std::stod(f[1]) == doctest::Approx(1.045).epsilon(1e-3));
    CHECK(std::stod(f[1]) == std::stod(f[2]));  // payoff meets its envelope
  }

  const auto region_lines =
      lines_of(read_file(find_written(written, "region_summary.csv")));
  REQUIRE(region_lines.size() >= 2);
  const auto piece = fields_of(region_lines[1]);
  // piece,level,z0,z1,contact_count,absorbing_count,inradius
  CHECK(std::stoi(piece[4]) == 2);
  CHECK(std::stoi(piece[5]) == 2);
  CHECK(std::stod(piece[6]) == doctest::Approx(0.5).epsilon(1e-4));

  const auto sweep_lines =
      lines_of(read_file(find_written(written, "lambda_sweep.csv")));
  REQUIRE(sweep_lines.size() == 13);  // header + 3 lambdas x 4 probes
  double lo = 1e30, hi = -1e30;
  for (std::size_t i = 9; i < 13; ++i) {  // the lambda = 0.999 block
    const auto f = fields_of(sweep_lines[i]);
    REQUIRE(f.size() == 3);
    CHECK(std::stod(f[0]) == 0.999);
    const double v = std::stod(f[2]);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi - lo <= 1e-2);                      // values flatten near one
  CHECK(std::abs(hi - 0.5125) <= 1e-2);        // onto the static optimum
}
