#include "markper/scenario.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace markper {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw ScenarioParseError("scenario field '" + field + "': " + why);
}

double number_in(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

std::vector<std::uint64_t> default_seeds() {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 30; ++s) seeds.push_back(s);
  return seeds;
}

}  // namespace

TransitionMatrix Scenario::matrix() const {
  try {
    return TransitionMatrix(m);
  } catch (const std::invalid_argument& e) {
    throw ScenarioParseError(std::string("scenario field 'M': ") + e.what());
  }
}

SimplexGrid Scenario::grid() const {
  if (states == 2) return SimplexGrid::line(grid_resolution);
  return SimplexGrid::triangle(grid_resolution);
}

UtilityFunction Scenario::utility() const {
  try {
    if (utility_builder == "example1") {
      return UtilityFunction::example1(grid_resolution);
    }
    if (utility_builder.empty()) {
      return UtilityFunction::from_values(grid(), utility_values);
    }
  } catch (const std::invalid_argument& e) {
    throw ScenarioParseError(std::string("scenario field 'utility': ") +
                             e.what());
  }
  throw ScenarioParseError("scenario field 'utility.builder': unknown name '" +
                           utility_builder + "'");
}

bool Scenario::operator==(const Scenario& other) const {
  return schema_version == other.schema_version && name == other.name &&
         states == other.states && m == other.m &&
         utility_builder == other.utility_builder &&
         utility_values == other.utility_values && lambdas == other.lambdas &&
         grid_resolution == other.grid_resolution && seeds == other.seeds &&
         tolerances.eps_hull == other.tolerances.eps_hull &&
         tolerances.contact_rel == other.tolerances.contact_rel &&
         tolerances.vi_tol == other.tolerances.vi_tol;
}

bool is_preset_scenario(const std::string& name) {
  return name == "example1-M1" || name == "example1-M2";
}

Scenario preset_scenario(const std::string& name) {
  if (!is_preset_scenario(name)) {
    throw ScenarioParseError("unknown preset scenario '" + name + "'");
  }
  Scenario s;
  s.name = name;
  s.states = 2;
  s.m = name == "example1-M1"
            ? std::vector<std::vector<double>>{{0.1, 0.9}, {0.6, 0.4}}
            : std::vector<std::vector<double>>{{0.5, 0.5},
                                               {1.0 / 6.0, 5.0 / 6.0}};
  s.utility_builder = "example1";
  s.lambdas = {0.3, 0.5, 0.9, 0.99};
  s.grid_resolution = 2001;
  s.seeds = default_seeds();
  return s;
}

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ScenarioParseError("top level must be an object");

  Scenario s;

  if (!j.contains("schema_version") ||
      !j["schema_version"].is_number_integer()) {
    fail("schema_version", "required integer");
  }
  s.schema_version = j["schema_version"].get<int>();
  if (s.schema_version != 1) fail("schema_version", "only version 1 is known");

  if (!j.contains("name") || !j["name"].is_string()) {
    fail("name", "required string");
  }
  s.name = j["name"].get<std::string>();
  if (s.name.empty()) fail("name", "must not be empty");
  for (char ch : s.name) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '-' || ch == '_';
    if (!ok) fail("name", "only [A-Za-z0-9_-] (it names a directory)");
  }

  if (!j.contains("states") || !j["states"].is_number_integer()) {
    fail("states", "required integer");
  }
  s.states = j["states"].get<int>();
  if (s.states != 2 && s.states != 3) {
    fail("states", "only two or three states are supported");
  }

  if (!j.contains("M") || !j["M"].is_array() ||
      static_cast<int>(j["M"].size()) != s.states) {
    fail("M", "required as a states x states array of rows");
  }
  for (const auto& row : j["M"]) {
    if (!row.is_array() || static_cast<int>(row.size()) != s.states) {
      fail("M", "every row needs exactly 'states' entries");
    }
    std::vector<double> r;
    for (const auto& v : row) r.push_back(number_in(v, "M"));
    s.m.push_back(std::move(r));
  }

  if (!j.contains("utility") || !j["utility"].is_object()) {
    fail("utility", "required object with 'builder' or 'values'");
  }
  const json& ju = j["utility"];
  if (ju.contains("builder")) {
    if (!ju["builder"].is_string()) fail("utility.builder", "expected string");
    s.utility_builder = ju["builder"].get<std::string>();
  } else if (ju.contains("values")) {
    if (!ju["values"].is_array()) fail("utility.values", "expected array");
    for (const auto& v : ju["values"]) {
      s.utility_values.push_back(number_in(v, "utility.values"));
    }
  } else {
    fail("utility", "needs 'builder' or 'values'");
  }

  if (j.contains("lambdas")) {
    if (!j["lambdas"].is_array()) fail("lambdas", "expected array");
    for (const auto& v : j["lambdas"]) {
      const double lambda = number_in(v, "lambdas");
      if (!(lambda >= 0.0 && lambda < 1.0)) {
        fail("lambdas", "discounts live in [0, 1)");
      }
      s.lambdas.push_back(lambda);
    }
  } else {
    s.lambdas = {0.3, 0.5, 0.9, 0.99};
  }

  if (j.contains("grid_resolution")) {
    if (!j["grid_resolution"].is_number_integer()) {
      fail("grid_resolution", "expected integer");
    }
    s.grid_resolution = j["grid_resolution"].get<int>();
    if (s.grid_resolution < 2) fail("grid_resolution", "too coarse");
  } else {
    s.grid_resolution = s.states == 2 ? 2001 : 50;
  }

  if (j.contains("seeds")) {
    if (!j["seeds"].is_array() || j["seeds"].empty()) {
      fail("seeds", "expected nonempty array");
    }
    for (const auto& v : j["seeds"]) {
      if (!v.is_number_unsigned() && !v.is_number_integer()) {
        fail("seeds", "expected nonnegative integers");
      }
      const auto raw = v.get<long long>();
      if (raw < 0) fail("seeds", "expected nonnegative integers");
      s.seeds.push_back(static_cast<std::uint64_t>(raw));
    }
  } else {
    s.seeds = default_seeds();
  }

  if (j.contains("tolerances")) {
    const json& jt = j["tolerances"];
    if (!jt.is_object()) fail("tolerances", "expected object");
    if (jt.contains("hull")) {
      s.tolerances.eps_hull = number_in(jt["hull"], "tolerances.hull");
    }
    if (jt.contains("contact")) {
      s.tolerances.contact_rel =
          number_in(jt["contact"], "tolerances.contact");
    }
    if (jt.contains("vi")) {
      s.tolerances.vi_tol = number_in(jt["vi"], "tolerances.vi");
    }
    for (double t : {s.tolerances.eps_hull, s.tolerances.contact_rel,
                     s.tolerances.vi_tol}) {
      if (!(t > 0.0) || t > 0.1) fail("tolerances", "must lie in (0, 0.1]");
    }
  }

  // Materialize once so malformed chains and payoffs fail at parse time
  // with the field name attached.
  s.matrix();
  const UtilityFunction u = s.utility();
  if (u.grid() != s.grid()) fail("utility", "payoff grid mismatch");
  return s;
}

Scenario load_scenario(const std::string& path_or_preset) {
  if (is_preset_scenario(path_or_preset)) {
    return preset_scenario(path_or_preset);
  }
  std::ifstream in(path_or_preset);
  if (!in) {
    throw ScenarioParseError("cannot read scenario file '" + path_or_preset +
                             "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["schema_version"] = s.schema_version;
  j["name"] = s.name;
  j["states"] = s.states;
  j["M"] = s.m;
  if (!s.utility_builder.empty()) {
    j["utility"] = {{"builder", s.utility_builder}};
  } else {
    j["utility"] = {{"values", s.utility_values}};
  }
  j["lambdas"] = s.lambdas;
  j["grid_resolution"] = s.grid_resolution;
  j["seeds"] = s.seeds;
  j["tolerances"] = {{"hull", s.tolerances.eps_hull},
                     {"contact", s.tolerances.contact_rel},
                     {"vi", s.tolerances.vi_tol}};
  return j.dump(2) + "\n";
}

}  // namespace markper
