#include "posctrl/robust.hpp"

#include <cmath>
#include <stdexcept>

namespace posctrl {

namespace {

constexpr double kNegTol = 1e-12;

int sign3(double v, double tol) {
  if (v > tol) return 1;
  if (v < -tol) return -1;
  return 0;
}

// Switch instants of the per-channel attack sign pattern along forward time.
// Index t is recorded when the sign at t differs from the sign at t-1.
std::vector<std::vector<int>> switch_schedule(const ValueSequence& vs, const PositiveSystem& sys,
                                              const CostSpec& cost, double tie_tol) {
  std::vector<std::vector<int>> switches(sys.l);
  const int T = vs.horizon;
  for (int ch = 0; ch < sys.l; ++ch) {
    int prev = 0;
    for (int t = 0; t <= T; ++t) {
      const double arg = sys.F.col(ch).dot(vs.p[t]) - cost.alpha(ch);
      const int sgn = sign3(arg, tie_tol);
      if (t > 0 && sgn != prev) switches[ch].push_back(t);
      prev = sgn;
    }
  }
  return switches;
}

void require_same_but_A(const PositiveSystem& a, const PositiveSystem& b) {
  auto differ = [](const Matrix& x, const Matrix& y) {
    return x.rows() != y.rows() || x.cols() != y.cols() || (x - y).cwiseAbs().maxCoeff() > 0.0;
  };
  if (a.n != b.n) throw std::invalid_argument("models differ in state dimension");
  if (differ(a.B, b.B)) throw std::invalid_argument("models differ in B; only A may change");
  if (differ(a.C, b.C)) throw std::invalid_argument("models differ in C; only A may change");
  if (differ(a.Ba, b.Ba)) throw std::invalid_argument("models differ in Ba; only A may change");
  if (differ(a.E, b.E)) throw std::invalid_argument("models differ in E; only A may change");
  if (differ(a.G, b.G)) throw std::invalid_argument("models differ in G; only A may change");
}

}  // namespace

double spectral_radius(const Matrix& M) {
  if (M.rows() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(M, /*computeEigenvectors=*/false);
  double rho = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    rho = std::max(rho, std::abs(es.eigenvalues()(i)));
  }
  return rho;
}

RobustnessReport check_nominal_admissible(const PositiveSystem& nominal,
                                          const PositiveSystem& actual, const CostSpec& cost,
                                          int T) {
  require_same_but_A(nominal, actual);
  validate_cost(nominal, cost);
  if (T < 0) throw std::invalid_argument("horizon must be nonnegative");

  RobustnessReport rep;
  const AssumptionReport nom = check_assumption1(nominal, cost);
  const AssumptionReport act = check_assumption1(actual, cost);
  rep.hypotheses.assumption1_nominal = nom.dynamics_ok && nom.cost_ok;
  rep.hypotheses.assumption1_actual = act.dynamics_ok && act.cost_ok;
  rep.hypotheses.r_nonneg = cost.r.minCoeff() >= -kNegTol;
  rep.hypotheses.F_nonneg = nominal.F.minCoeff() >= -kNegTol;
  rep.hypotheses.B_nonneg = nominal.B.minCoeff() >= -kNegTol;
  rep.admissible = rep.hypotheses.assumption1_nominal && rep.hypotheses.assumption1_actual &&
                   rep.hypotheses.r_nonneg && rep.hypotheses.F_nonneg && rep.hypotheses.B_nonneg;

  SolveOptions opts;
  opts.override_assumption = true;  // report completes even when a hypothesis fails
  const ValueSequence vs_nom = backward_recursion(nominal, cost, T, opts);
  const ValueSequence vs_act = backward_recursion(actual, cost, T, opts);

  bool static_ok = true;
  for (int t = 0; t <= T && static_ok; ++t) {
    static_ok = (cost.r + nominal.B.transpose() * vs_nom.p[t]).minCoeff() >= -kNegTol &&
                (cost.r + actual.B.transpose() * vs_act.p[t]).minCoeff() >= -kNegTol;
  }
  rep.nominal_static = static_ok;

  rep.switches_nominal = switch_schedule(vs_nom, nominal, cost, opts.tie_tol);
  rep.switches_actual = switch_schedule(vs_act, actual, cost, opts.tie_tol);

  rep.max_abs_A_diff = (nominal.A - actual.A).cwiseAbs().maxCoeff();
  rep.spectral_radius_nominal = spectral_radius(nominal.A);
  rep.spectral_radius_actual = spectral_radius(actual.A);
  rep.spectral_radius_diff = std::abs(rep.spectral_radius_nominal - rep.spectral_radius_actual);
  return rep;
}

InductionResult induction_check(const PositiveSystem& sys, const CostSpec& cost, int T) {
  SolveOptions opts;
  opts.override_assumption = true;
  const ValueSequence vs = backward_recursion(sys, cost, T, opts);
  InductionResult res;
  res.costate_nonneg = true;
  res.control_sign_constant = true;
  for (int t = T; t >= 0; --t) {  // computation order of the recursion
    const bool p_ok = vs.p[t].minCoeff() >= -kNegTol;
    const bool u_ok = (cost.r + sys.B.transpose() * vs.p[t]).minCoeff() >= -kNegTol;
    if (!p_ok) res.costate_nonneg = false;
    if (!u_ok) res.control_sign_constant = false;
    if ((!p_ok || !u_ok) && !res.first_failure_t.has_value()) res.first_failure_t = t;
  }
  return res;
}

}  // namespace posctrl
