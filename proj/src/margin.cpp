#include "posctrl/margin.hpp"

#include "posctrl/batch.hpp"

#include <cmath>
#include <stdexcept>

namespace posctrl {

namespace {
constexpr double kNegTol = 1e-12;
}

ValueSequence unconstrained_recursion(const PositiveSystem& sys, const CostSpec& cost, int T,
                                      const SolveOptions& opts) {
  if (T < 0) throw std::invalid_argument("horizon must be nonnegative");
  require_assumption1(sys, cost, opts.override_assumption);
  ValueSequence vs;
  vs.horizon = T;
  vs.p.assign(T + 1, Vector::Zero(sys.n));
  for (int t = T - 1; t >= 0; --t) {
    vs.p[t] = bellman_map_attack_free(sys, cost, vs.p[t + 1]);
    if (!vs.p[t].allFinite()) {
      throw std::runtime_error("unconstrained recursion produced a non-finite costate");
    }
  }
  return vs;
}

MarginReport boundedness_margin(const ValueSequence& values, const PositiveSystem& sys,
                                const CostSpec& cost) {
  validate_cost(sys, cost);
  const int T = values.horizon;
  if (static_cast<int>(values.p.size()) != T + 1) {
    throw std::invalid_argument("value sequence is inconsistent with its horizon");
  }
  MarginReport rep;
  rep.values = values;
  rep.per_channel.resize(sys.l, T + 1);
  rep.m.resize(T + 1);
  for (int t = 0; t <= T; ++t) {
    const Vector fp = sys.F.transpose() * values.p[t];
    rep.per_channel.col(t) = cost.alpha - fp;
    rep.m(t) = rep.per_channel.col(t).minCoeff();
  }
  rep.finite_value = rep.m(0) >= -kNegTol;
  int last_violating_t = -1;
  for (int t = T; t >= 0; --t) {
    if (rep.m(t) < -kNegTol) {
      last_violating_t = t;
      break;
    }
  }
  if (last_violating_t >= 0) {
    rep.t_star = T - last_violating_t;
    int ch = 0;
    rep.per_channel.col(last_violating_t).minCoeff(&ch);
    rep.violating_channel = ch;
  }
  return rep;
}

std::vector<Vector> destabilizing_attack(const MarginReport& report, const PositiveSystem& sys,
                                         double magnitude, int horizon, double growth) {
  if (!report.t_star.has_value()) {
    throw std::runtime_error("destabilizing_attack requires a violated margin (no t_star)");
  }
  if (magnitude <= 0.0) throw std::invalid_argument("magnitude must be positive");
  if (growth < 1.0) throw std::invalid_argument("growth must be at least 1");
  if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
  std::vector<Vector> schedule(horizon, Vector::Zero(sys.l));
  const int start = *report.t_star;
  for (int t = start; t < horizon; ++t) {
    schedule[t](report.violating_channel) = magnitude * std::pow(growth, t - start);
  }
  return schedule;
}

std::vector<std::optional<int>> margin_sweep(const PositiveSystem& sys, const CostSpec& cost,
                                             int T, const std::vector<double>& alphas,
                                             const SolveOptions& opts, bool parallel) {
  // The costate recursion does not involve alpha, so one solve serves the
  // whole sweep; each index derives its own margins from the shared sequence.
  const ValueSequence values = unconstrained_recursion(sys, cost, T, opts);
  std::vector<std::optional<int>> out(alphas.size());
  for_each_index(
      static_cast<int>(alphas.size()),
      [&](int i) {
        CostSpec scaled = cost;
        scaled.alpha = Vector::Constant(sys.l, alphas[i]);
        out[i] = boundedness_margin(values, sys, scaled).t_star;
      },
      parallel);
  return out;
}

}  // namespace posctrl
