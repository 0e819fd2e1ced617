#pragma once

#include "posctrl/model.hpp"

#include <vector>

namespace posctrl {

// Minimax cost-to-go machinery. The finite-horizon game
//
//   min_u max_a  sum_{t=0}^{T-1} s'x[t] + r'u[t] - alpha'a[t]
//   s.t. |u| <= Ex, |a| <= Gx
//
// has a linear value p_t'x at every stage. The costate obeys the backward
// recursion (terminal p_T = 0)
//
//   p_t = s + A'p_{t+1} - E'|r + B'p_{t+1}| + G'|F'p_{t+1} - alpha|
//
// and the per-stage optimizers are switching gains read off the sign of the
// absolute-value arguments: u = -K x with K in diag(sign(r + B'p_{t+1})) E and
// a = +L x with L in diag(sign(F'p_{t+1} - alpha)) G. A zero sign argument
// leaves the corresponding diagonal entry free in [-1, 1] (a tie).

enum class TieRule { zero, plus_one, minus_one };

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 100000;
  double divergence_ceiling = 1e12;
  double tie_tol = 1e-10;
  TieRule tie_rule = TieRule::zero;
  // Run even when the standing assumption fails.
  bool override_assumption = false;
};

// Costates p[t] for t = 0..horizon, p[horizon] = 0.
struct ValueSequence {
  int horizon = 0;
  std::vector<Vector> p;
};

enum class FixedPointStatus { converged, diverged, max_iter };

struct FixedPoint {
  Vector p;
  int iterations = 0;
  double residual = 0.0;
  FixedPointStatus status = FixedPointStatus::max_iter;
  // ||p_k||_inf / ||p_{k-1}||_inf at the last iteration; the geometric rate
  // estimate when status is diverged.
  double growth_rate = 0.0;
};

struct GainResult {
  Matrix gain;
  std::vector<int> ties;  // channels whose sign argument was within tie_tol of 0
};

// Time-varying optimal gains; K[t], L[t] apply at stage t and derive from
// p_{t+1}. Rows on tie channels follow the tie rule (zero rows by default).
struct PolicySchedule {
  std::vector<Matrix> K;
  std::vector<Matrix> L;
  std::vector<std::vector<int>> control_ties;
  std::vector<std::vector<int>> attack_ties;
};

// Optimal-policy family at one stage. On tie channels any diagonal entry in
// [-1, 1] is optimal; vertices enumerate the +/-1 choices when the tie count
// is small enough.
struct VertexFamily {
  std::vector<int> ties;
  std::vector<double> base_sign;   // per channel, 0 on ties
  bool enumerated = false;         // false when 2^|ties| would exceed the cap
  std::vector<Matrix> vertices;    // gain matrices, present when enumerated
};

struct PolicySets {
  VertexFamily control;
  VertexFamily attack;
};

// One application of the backward-recursion map to p.
Vector bellman_map(const PositiveSystem& sys, const CostSpec& cost, const Vector& p);

// Same map with the adversary term dropped (no attack channel).
Vector bellman_map_attack_free(const PositiveSystem& sys, const CostSpec& cost, const Vector& p);

// Runs the recursion for T stages. Refuses (std::runtime_error) when the
// standing assumption fails, unless opts.override_assumption is set.
ValueSequence backward_recursion(const PositiveSystem& sys, const CostSpec& cost, int T,
                                 const SolveOptions& opts = {});

// Iterates p <- bellman_map(p) from p = 0 until the infinity-norm residual
// drops below opts.tol, the iterate exceeds opts.divergence_ceiling, or
// opts.max_iter is hit.
FixedPoint solve_algebraic(const PositiveSystem& sys, const CostSpec& cost,
                           const SolveOptions& opts = {});

// Stage gains from the next-stage costate.
GainResult attack_gain(const Vector& p_next, const PositiveSystem& sys, const CostSpec& cost,
                       TieRule rule = TieRule::zero, double tie_tol = 1e-10);
GainResult control_gain(const Vector& p_next, const PositiveSystem& sys, const CostSpec& cost,
                        TieRule rule = TieRule::zero, double tie_tol = 1e-10);

// Gains for every stage of a solved horizon.
PolicySchedule extract_policy(const ValueSequence& vs, const PositiveSystem& sys,
                              const CostSpec& cost, TieRule rule = TieRule::zero,
                              double tie_tol = 1e-10);

// Tie sets and vertex enumerations at one stage. Families with more than
// max_enum_ties tie channels report enumerated = false and carry no vertices.
PolicySets policy_sets(const Vector& p_next, const PositiveSystem& sys, const CostSpec& cost,
                       double tie_tol = 1e-10, int max_enum_ties = 10);

// Game value p_0'x0. Throws on a negative x0 entry.
double optimal_value(const ValueSequence& vs, const Vector& x0);

// Exact enumeration over sign-vertex schedules: at each stage u = Du*E*x and
// a = Da*G*x with Du, Da diagonal +/-1, minimized over control schedules of
// the maximum over attack schedules. Requires m*T <= 12 and l*T <= 12.
// The serial variant is the reference implementation; brute_force_value runs
// the outer minimization in parallel and returns bit-identical results.
double brute_force_value_serial(const PositiveSystem& sys, const CostSpec& cost, int T,
                                const Vector& x0);
double brute_force_value(const PositiveSystem& sys, const CostSpec& cost, int T, const Vector& x0);

}  // namespace posctrl
