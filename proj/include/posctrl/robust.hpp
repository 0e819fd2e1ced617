#pragma once

#include "posctrl/dp.hpp"
#include "posctrl/model.hpp"

#include <optional>
#include <vector>

namespace posctrl {

// Model-mismatch analysis: a controller synthesized for a nominal A stays
// admissible for a perturbed A when both systems satisfy the standing
// assumption and r, F, B are elementwise nonnegative. Under those hypotheses
// r + B'p_t stays nonnegative along both recursions, so the optimal control
// collapses to the single static law |u| = E x regardless of which A is true;
// only the adversary's switching structure moves.
struct RobustnessHypotheses {
  bool assumption1_nominal = false;
  bool assumption1_actual = false;
  bool r_nonneg = false;
  bool F_nonneg = false;
  bool B_nonneg = false;
};

struct RobustnessReport {
  RobustnessHypotheses hypotheses;
  bool admissible = false;  // all five hypotheses hold

  // Verified by direct computation: r + B'p_t >= 0 for every t under both
  // models, hence one constant control gain serves both.
  bool nominal_static = false;

  // Attack sign pattern sign((F'p_t - alpha)_i) per channel; an entry t in
  // the list means the sign at t differs from the sign at t-1 (the first
  // index of the new sign).
  std::vector<std::vector<int>> switches_nominal;
  std::vector<std::vector<int>> switches_actual;

  double max_abs_A_diff = 0.0;
  double spectral_radius_nominal = 0.0;
  double spectral_radius_actual = 0.0;
  double spectral_radius_diff = 0.0;
};

// Both systems must agree in everything but A (B, C, Ba, E, G identical),
// otherwise std::invalid_argument. Recursions run over horizon T with the
// assumption gate overridden so the report is complete even when a
// hypothesis fails; `admissible` carries the verdict.
RobustnessReport check_nominal_admissible(const PositiveSystem& nominal,
                                          const PositiveSystem& actual, const CostSpec& cost,
                                          int T);

// Direct check of the induction invariants behind the robustness argument.
struct InductionResult {
  bool costate_nonneg = false;       // p_t >= 0 for all t
  bool control_sign_constant = false;  // r + B'p_t >= 0 for all t
  std::optional<int> first_failure_t;  // forward index of the first failure
};

InductionResult induction_check(const PositiveSystem& sys, const CostSpec& cost, int T);

double spectral_radius(const Matrix& M);

}  // namespace posctrl
