#include "posctrl/scenario.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace posctrl {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& name, const std::string& what) {
  throw std::invalid_argument("scenario '" + name + "': " + what);
}

double as_number(const json& v, const std::string& name, const std::string& key) {
  if (!v.is_number()) fail(name, "entry of '" + key + "' is not a number");
  return v.get<double>();
}

Matrix read_matrix(const json& v, const std::string& name, const std::string& key) {
  if (!v.is_array() || v.empty()) fail(name, "'" + key + "' must be a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(v.size());
  if (!v[0].is_array()) fail(name, "'" + key + "' must be a matrix (array of rows)");
  const auto cols = static_cast<Eigen::Index>(v[0].size());
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      fail(name, "rows of '" + key + "' have unequal lengths");
    for (Eigen::Index j = 0; j < cols; ++j)
      M(i, j) = as_number(row[static_cast<std::size_t>(j)], name, key);
  }
  return M;
}

Vector read_vector(const json& v, const std::string& name, const std::string& key) {
  if (!v.is_array()) fail(name, "'" + key + "' must be a flat array");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out(i) = as_number(v[static_cast<std::size_t>(i)], name, key);
  return out;
}

void read_options(const json& v, const std::string& name, ScenarioOptions& opts) {
  if (!v.is_object()) fail(name, "'options' must be an object");
  for (const auto& [key, val] : v.items()) {
    if (key == "override_assumption") {
      if (!val.is_boolean()) fail(name, "option 'override_assumption' must be a boolean");
      opts.solve.override_assumption = val.get<bool>();
    } else if (key == "tie_rule") {
      const std::string rule = val.is_string() ? val.get<std::string>() : "";
      if (rule == "zero")
        opts.solve.tie_rule = TieRule::zero;
      else if (rule == "plus_one")
        opts.solve.tie_rule = TieRule::plus_one;
      else if (rule == "minus_one")
        opts.solve.tie_rule = TieRule::minus_one;
      else
        fail(name, "option 'tie_rule' must be \"zero\", \"plus_one\" or \"minus_one\"");
    } else if (key == "tol") {
      opts.solve.tol = as_number(val, name, key);
    } else if (key == "max_iter") {
      if (!val.is_number_integer() || val.get<long long>() <= 0)
        fail(name, "option 'max_iter' must be a positive integer");
      opts.solve.max_iter = val.get<int>();
    } else if (key == "divergence_ceiling") {
      opts.solve.divergence_ceiling = as_number(val, name, key);
    } else if (key == "tie_tol") {
      opts.solve.tie_tol = as_number(val, name, key);
    } else if (key == "reject_zero_A") {
      if (!val.is_boolean()) fail(name, "option 'reject_zero_A' must be a boolean");
      opts.build.reject_zero_A = val.get<bool>();
    } else if (key == "constraint_tol") {
      opts.constraint_tol = as_number(val, name, key);
    } else {
      fail(name, "unknown option '" + key + "'");
    }
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& fallback_name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(fallback_name, std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(fallback_name, "top level must be an object");

  static const std::set<std::string> known = {"name", "A",  "B",  "C",  "Ba", "Ey",    "Ga", "Ca",
                                              "E",    "G",  "s",  "r",  "alpha",      "x0", "T",
                                              "options"};
  Scenario sc;
  sc.name = doc.value("name", fallback_name);
  for (const auto& [key, val] : doc.items()) {
    (void)val;
    if (known.find(key) == known.end()) fail(sc.name, "unknown key '" + key + "'");
  }
  for (const char* key : {"A", "B", "C", "Ba", "s", "r", "alpha", "x0", "T"})
    if (!doc.contains(key)) fail(sc.name, std::string("missing required key '") + key + "'");

  SystemInputs in;
  in.A = read_matrix(doc["A"], sc.name, "A");
  in.B = read_matrix(doc["B"], sc.name, "B");
  in.C = read_matrix(doc["C"], sc.name, "C");
  in.Ba = read_matrix(doc["Ba"], sc.name, "Ba");
  if (doc.contains("Ey")) in.Ey = read_matrix(doc["Ey"], sc.name, "Ey");
  if (doc.contains("Ga")) in.Ga = read_matrix(doc["Ga"], sc.name, "Ga");
  if (doc.contains("Ca")) in.Ca = read_matrix(doc["Ca"], sc.name, "Ca");
  if (doc.contains("E")) in.E = read_matrix(doc["E"], sc.name, "E");
  if (doc.contains("G")) in.G = read_matrix(doc["G"], sc.name, "G");

  if (doc.contains("options")) read_options(doc["options"], sc.name, sc.options);

  try {
    sc.system = build_system(in, sc.options.build);
  } catch (const std::invalid_argument& e) {
    fail(sc.name, e.what());
  }

  sc.cost.s = read_vector(doc["s"], sc.name, "s");
  sc.cost.r = read_vector(doc["r"], sc.name, "r");
  sc.cost.alpha = read_vector(doc["alpha"], sc.name, "alpha");
  sc.x0 = read_vector(doc["x0"], sc.name, "x0");
  try {
    validate_cost(sc.system, sc.cost);
  } catch (const std::invalid_argument& e) {
    fail(sc.name, e.what());
  }
  if (sc.x0.size() != sc.system.n) fail(sc.name, "'x0' length does not match the state dimension");
  if (sc.x0.minCoeff() < 0.0) fail(sc.name, "'x0' must be nonnegative");

  if (!doc["T"].is_number_integer() || doc["T"].get<long long>() < 0)
    fail(sc.name, "'T' must be a nonnegative integer");
  sc.T = doc["T"].get<int>();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string stem = path;
  if (const auto slash = stem.find_last_of("/\\"); slash != std::string::npos)
    stem = stem.substr(slash + 1);
  if (const auto dot = stem.find_last_of('.'); dot != std::string::npos) stem = stem.substr(0, dot);
  return parse_scenario(buf.str(), stem);
}

}  // namespace posctrl
