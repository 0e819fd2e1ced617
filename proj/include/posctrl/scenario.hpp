#pragma once

#include <string>

#include "posctrl/dp.hpp"
#include "posctrl/model.hpp"

namespace posctrl {

// Options a scenario file may set under its "options" key. Solve options feed
// the recursions, build options the model constructor, constraint_tol the
// simulator's violation threshold.
struct ScenarioOptions {
  SolveOptions solve;
  BuildOptions build;
  double constraint_tol = 1e-9;
};

struct Scenario {
  std::string name;
  PositiveSystem system;
  CostSpec cost;
  Vector x0;
  int T = 0;
  ScenarioOptions options;
};

// Scenario files are JSON. Required keys: A, B, C, Ba, s, r, alpha, x0, T,
// plus Ey or E, and either G or the pair Ga/Ca. Optional: name, options.
// Matrices are arrays of equal-length rows, vectors flat arrays. Any key
// outside this set is an error; a typo must not silently become a default.
Scenario parse_scenario(const std::string& text, const std::string& fallback_name = "scenario");
Scenario load_scenario(const std::string& path);

}  // namespace posctrl
