#pragma once

#include "posctrl/dp.hpp"
#include "posctrl/model.hpp"

#include <optional>
#include <vector>

namespace posctrl {

// Analysis of the sign-constrained adversary whose magnitude is NOT limited
// by the state (a >= 0 free). The control-only recursion
//
//   p_t = s + A'p_{t+1} - E'|r + B'p_{t+1}|,  p_T = 0
//
// prices the game as long as the adversary cannot profit from growing a
// without bound, which holds exactly while alpha >= F'p_t.

// backward_recursion with the adversary term dropped. Same assumption gate.
ValueSequence unconstrained_recursion(const PositiveSystem& sys, const CostSpec& cost, int T,
                                      const SolveOptions& opts = {});

// Margins are aligned with the forward time axis of `values` (p_t at index t,
// so index T carries zero remaining horizon). t_star counts on the
// remaining-horizon axis instead: it is the smallest number of remaining
// stages at which some channel margin turns negative, i.e.
// t_star = T - max{ t : m_t < 0 }. Growing the horizon beyond t_star cannot
// restore a nonnegative margin because costates are monotone in the horizon.
struct MarginReport {
  ValueSequence values;
  Matrix per_channel;  // l x (T+1), entry (i, t) = alpha_i - (F'p_t)_i
  Vector m;            // length T+1, m(t) = min_i per_channel(i, t)
  std::optional<int> t_star;
  int violating_channel = -1;  // channel attaining the first violation
  bool finite_value = false;   // m(0) >= 0, the full-horizon margin
};

MarginReport boundedness_margin(const ValueSequence& values, const PositiveSystem& sys,
                                const CostSpec& cost);

// Open-loop demonstration schedule for a violated margin: zero until t_star,
// then `magnitude` on the violating channel growing geometrically by `growth`
// each step. Once the margin is negative any growing nonnegative attack is
// admissible and the game value is unbounded; the ramp makes the divergence
// visible in finite simulations. Throws when the report has no violation.
std::vector<Vector> destabilizing_attack(const MarginReport& report, const PositiveSystem& sys,
                                         double magnitude, int horizon, double growth = 2.0);

// t_star for each alpha = a * ones(l), computed over horizon T. Entries
// without a violation are nullopt. Runs the sweep in parallel when asked;
// results are independent of the execution path.
std::vector<std::optional<int>> margin_sweep(const PositiveSystem& sys, const CostSpec& cost,
                                             int T, const std::vector<double>& alphas,
                                             const SolveOptions& opts = {}, bool parallel = true);

}  // namespace posctrl
