#pragma once

#include <optional>
#include <vector>

#include "posctrl/dp.hpp"
#include "posctrl/model.hpp"

namespace posctrl {

// Input selection for one side of the game. Gain kinds are state feedback and
// carry the sign convention of the recursion: the controller applies u = -K x,
// the attacker applies a = +L x. Open-loop sequences are applied verbatim.
struct Policy {
  enum class Kind { none, static_gain, schedule, open_loop };
  Kind kind = Kind::none;
  Matrix gain;                 // static_gain
  std::vector<Matrix> gains;   // schedule, gains[t] acts at step t
  std::vector<Vector> inputs;  // open_loop, inputs[t] acts at step t

  static Policy none() { return {}; }
  static Policy static_gain(Matrix K);
  static Policy schedule(std::vector<Matrix> Ks);
  static Policy open_loop(std::vector<Vector> seq);
};

struct Violation {
  enum class Kind { state_negative, control_bound, attack_bound };
  int t = 0;
  Kind kind = Kind::state_negative;
  int channel = 0;
  double excess = 0.0;  // amount beyond the bound (positive)
};

struct SimResult {
  Matrix x;           // (steps+1) x n
  Matrix y;           // (steps+1) x p
  Matrix u;           // steps x m
  Matrix a;           // steps x l
  Vector stage_cost;  // length steps, s'x + r'u - alpha'a
  Vector cum_cost;    // running sums of stage_cost
  std::vector<Violation> violations;
  double stealth = 0.0;   // max over recorded outputs of ||y_t||_inf
  bool diverged = false;  // ||x||_inf crossed the cutoff; trajectory truncated there
  int steps = 0;          // completed steps, == T unless diverged
};

struct SimOptions {
  double constraint_tol = 1e-9;     // relative slack before a bound counts as violated
  double divergence_cutoff = 1e12;  // state magnitude at which rollout stops
};

// Rolls x[t+1] = A x + B u + F a forward for T steps. Bound and positivity
// violations are recorded, never clipped: the trajectory shows what the
// policies actually produce.
SimResult simulate(const PositiveSystem& sys, const CostSpec& cost, const Vector& x0, int T,
                   const Policy& control, const Policy& attack, const SimOptions& opts = {});

// Realized rollout cost next to the game value the recursion predicts for the
// same horizon and initial state.
struct CostComparison {
  double realized = 0.0;
  double predicted = 0.0;
  double gap = 0.0;  // realized - predicted
};

CostComparison compare_with_value(const SimResult& sim, const ValueSequence& values,
                                  const Vector& x0);

}  // namespace posctrl
