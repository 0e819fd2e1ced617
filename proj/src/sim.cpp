#include "posctrl/sim.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace posctrl {

Policy Policy::static_gain(Matrix K) {
  Policy p;
  p.kind = Kind::static_gain;
  p.gain = std::move(K);
  return p;
}

Policy Policy::schedule(std::vector<Matrix> Ks) {
  Policy p;
  p.kind = Kind::schedule;
  p.gains = std::move(Ks);
  return p;
}

Policy Policy::open_loop(std::vector<Vector> seq) {
  Policy p;
  p.kind = Kind::open_loop;
  p.inputs = std::move(seq);
  return p;
}

namespace {

void check_policy(const Policy& pol, int channels, int n, int T, const char* side) {
  using K = Policy::Kind;
  switch (pol.kind) {
    case K::none:
      return;
    case K::static_gain:
      if (pol.gain.rows() != channels || pol.gain.cols() != n)
        throw std::invalid_argument(std::string(side) + " gain has wrong shape");
      return;
    case K::schedule:
      if (static_cast<int>(pol.gains.size()) < T)
        throw std::invalid_argument(std::string(side) + " schedule shorter than horizon");
      for (const Matrix& K_t : pol.gains)
        if (K_t.rows() != channels || K_t.cols() != n)
          throw std::invalid_argument(std::string(side) + " schedule entry has wrong shape");
      return;
    case K::open_loop:
      if (static_cast<int>(pol.inputs.size()) < T)
        throw std::invalid_argument(std::string(side) + " input sequence shorter than horizon");
      for (const Vector& v : pol.inputs)
        if (v.size() != channels)
          throw std::invalid_argument(std::string(side) + " input entry has wrong size");
      return;
  }
}

// sign = -1 for the controller, +1 for the attacker; open loop ignores it.
Vector apply(const Policy& pol, int t, const Vector& x, int channels, double sign) {
  using K = Policy::Kind;
  switch (pol.kind) {
    case K::none:
      return Vector::Zero(channels);
    case K::static_gain:
      return sign * (pol.gain * x);
    case K::schedule:
      return sign * (pol.gains[t] * x);
    case K::open_loop:
      return pol.inputs[t];
  }
  return Vector::Zero(channels);
}

void record_bound_violations(std::vector<Violation>& out, int t, Violation::Kind kind,
                             const Vector& v, const Vector& bound, double tol) {
  for (int i = 0; i < v.size(); ++i) {
    const double slack = tol * std::max(1.0, bound(i));
    if (std::abs(v(i)) > bound(i) + slack)
      out.push_back({t, kind, i, std::abs(v(i)) - bound(i)});
  }
}

void record_negative_states(std::vector<Violation>& out, int t, const Vector& x, double tol) {
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  for (int i = 0; i < x.size(); ++i)
    if (x(i) < -tol * scale) out.push_back({t, Violation::Kind::state_negative, i, -x(i)});
}

}  // namespace

SimResult simulate(const PositiveSystem& sys, const CostSpec& cost, const Vector& x0, int T,
                   const Policy& control, const Policy& attack, const SimOptions& opts) {
  validate_cost(sys, cost);
  if (T < 0) throw std::invalid_argument("horizon must be nonnegative");
  if (x0.size() != sys.n) throw std::invalid_argument("initial state has wrong dimension");
  if (x0.minCoeff() < 0.0) throw std::invalid_argument("initial state must be nonnegative");
  check_policy(control, sys.m, sys.n, T, "control");
  check_policy(attack, sys.l, sys.n, T, "attack");

  Matrix x(T + 1, sys.n), y(T + 1, sys.p), u(T, sys.m), a(T, sys.l);
  Vector stage(T), cum(T);

  SimResult res;
  x.row(0) = x0.transpose();
  y.row(0) = (sys.C * x0).transpose();
  res.stealth = (sys.p > 0) ? y.row(0).cwiseAbs().maxCoeff() : 0.0;

  double running = 0.0;
  int steps = 0;
  for (int t = 0; t < T; ++t) {
    const Vector xt = x.row(t).transpose();
    const Vector ut = apply(control, t, xt, sys.m, -1.0);
    const Vector at = apply(attack, t, xt, sys.l, +1.0);
    u.row(t) = ut.transpose();
    a.row(t) = at.transpose();

    record_bound_violations(res.violations, t, Violation::Kind::control_bound, ut, sys.E * xt,
                            opts.constraint_tol);
    record_bound_violations(res.violations, t, Violation::Kind::attack_bound, at, sys.G * xt,
                            opts.constraint_tol);

    stage(t) = cost.s.dot(xt) + cost.r.dot(ut) - cost.alpha.dot(at);
    running += stage(t);
    cum(t) = running;

    const Vector xn = sys.A * xt + sys.B * ut + sys.F * at;
    x.row(t + 1) = xn.transpose();
    y.row(t + 1) = (sys.C * xn).transpose();
    record_negative_states(res.violations, t + 1, xn, opts.constraint_tol);
    if (sys.p > 0) res.stealth = std::max(res.stealth, y.row(t + 1).cwiseAbs().maxCoeff());
    steps = t + 1;

    if (!xn.allFinite() || xn.cwiseAbs().maxCoeff() > opts.divergence_cutoff) {
      res.diverged = true;
      break;
    }
  }

  res.steps = steps;
  res.x = x.topRows(steps + 1);
  res.y = y.topRows(steps + 1);
  res.u = u.topRows(steps);
  res.a = a.topRows(steps);
  res.stage_cost = stage.head(steps);
  res.cum_cost = cum.head(steps);
  return res;
}

CostComparison compare_with_value(const SimResult& sim, const ValueSequence& values,
                                  const Vector& x0) {
  if (sim.steps != values.horizon)
    throw std::invalid_argument("rollout length does not match the value sequence horizon");
  CostComparison cmp;
  cmp.realized = (sim.steps > 0) ? sim.cum_cost(sim.steps - 1) : 0.0;
  cmp.predicted = values.p[0].dot(x0);
  cmp.gap = cmp.realized - cmp.predicted;
  return cmp;
}

}  // namespace posctrl
