#pragma once

#include <string>
#include <vector>

#include "posctrl/scenario.hpp"

namespace posctrl {

// One assertion of a golden reproduction run. Informational lines report
// measured context (divergence rates, violation counts) and never fail a run.
struct CheckLine {
  std::string label;
  bool pass = false;
  bool informational = false;
  std::string detail;
};

struct ReproReport {
  std::string example;
  std::vector<CheckLine> checks;
  bool all_pass() const;
};

// The three golden pipelines. Each runs an end-to-end analysis on the bundled
// scenario and asserts the published outcome at the published tolerance:
//
//   ex1: one unstable invariant zero near 1.04, stealthy geometric rollout,
//        cost identity of the zero-dynamics attack, geometric vs affine
//        growth of the attacked and attack-free cost-to-go.
//   ex2: boundedness margin sweep with strictly increasing onset horizon,
//        a finite-value alpha, and a diverging rollout past the margin.
//   ex3: robustness hypotheses, static full-magnitude controller, attack
//        sign switch times under the perturbed model, mismatch metrics.
ReproReport reproduce_ex1(const Scenario& sc);
ReproReport reproduce_ex2(const Scenario& sc);
ReproReport reproduce_ex3(const Scenario& nominal, const Scenario& actual);

// "PASS <label> [detail]" per line; INFO for informational entries.
std::string render(const ReproReport& rep);

}  // namespace posctrl
