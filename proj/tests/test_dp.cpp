#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "posctrl/dp.hpp"
#include "posctrl/scenario.hpp"
#include "support/random_systems.hpp"

using namespace posctrl;
using testsupport::oracle_instance;
using testsupport::schedule_cost;

namespace {

const std::string kDir = POSCTRL_SCENARIO_DIR;

// Scalar plant whose recursion is short enough to evaluate by hand.
PositiveSystem scalar_sys() {
  SystemInputs in;
  in.A = Matrix{{0.9}};
  in.B = Matrix{{0.5}};
  in.C = Matrix{{1.0}};
  in.Ba = Matrix{{0.6}};  // F = 0.3
  in.E = Matrix{{0.1}};
  in.G = Matrix{{0.2}};
  return build_system(in);
}

CostSpec scalar_cost() {
  CostSpec c;
  c.s = Vector::Constant(1, 1.0);
  c.r = Vector::Constant(1, 0.2);
  c.alpha = Vector::Constant(1, 0.4);
  return c;
}

}  // namespace

TEST_CASE("hand-computed two-stage recursion on the scalar plant") {
  const PositiveSystem sys = scalar_sys();
  const CostSpec cost = scalar_cost();

  // p1 = 1 - 0.1*|0.2| + 0.2*|-0.4| = 1.06
  // p0 = 1 + 0.9*1.06 - 0.1*|0.2 + 0.5*1.06| + 0.2*|0.3*1.06 - 0.4| = 1.8974
  const ValueSequence vs = backward_recursion(sys, cost, 2);
  REQUIRE(vs.p.size() == 3);
  CHECK(vs.p[2](0) == 0.0);
  CHECK(vs.p[1](0) == doctest::Approx(1.06).epsilon(1e-12));
  CHECK(vs.p[0](0) == doctest::Approx(1.8974).epsilon(1e-12));
  CHECK(optimal_value(vs, Vector::Constant(1, 2.0)) == doctest::Approx(2 * 1.8974));

  CHECK(bellman_map(sys, cost, vs.p[1])(0) == doctest::Approx(1.8974).epsilon(1e-12));
  // Without the adversary the |F'p - alpha| reward is gone:
  // 1 + 0.954 - 0.073 = 1.881
  CHECK(bellman_map_attack_free(sys, cost, vs.p[1])(0) ==
        doctest::Approx(1.881).epsilon(1e-12));
}

TEST_CASE("stage gains carry the switching signs") {
  const PositiveSystem sys = scalar_sys();
  const CostSpec cost = scalar_cost();
  const Vector p1 = Vector::Constant(1, 1.06);

  // r + B'p1 = 0.73 > 0 so the control row is +E; F'p1 - alpha < 0 so the
  // attack row is -G.
  const GainResult K = control_gain(p1, sys, cost);
  const GainResult L = attack_gain(p1, sys, cost);
  CHECK(K.gain(0, 0) == doctest::Approx(0.1));
  CHECK(L.gain(0, 0) == doctest::Approx(-0.2));
  CHECK(K.ties.empty());
  CHECK(L.ties.empty());
}

TEST_CASE("ties follow the requested rule") {
  const PositiveSystem sys = scalar_sys();
  CostSpec cost = scalar_cost();
  cost.r = Vector::Zero(1);  // r + B'0 = 0 at the terminal stage

  const Vector p_end = Vector::Zero(1);
  CHECK(control_gain(p_end, sys, cost, TieRule::zero).gain(0, 0) == 0.0);
  CHECK(control_gain(p_end, sys, cost, TieRule::plus_one).gain(0, 0) == doctest::Approx(0.1));
  CHECK(control_gain(p_end, sys, cost, TieRule::minus_one).gain(0, 0) == doctest::Approx(-0.1));
  CHECK(control_gain(p_end, sys, cost).ties == std::vector<int>{0});

  const PolicySets sets = policy_sets(p_end, sys, cost);
  CHECK(sets.control.ties == std::vector<int>{0});
  CHECK(sets.control.enumerated);
  CHECK(sets.control.vertices.size() == 2);
  CHECK(sets.attack.ties.empty());
  CHECK(sets.attack.vertices.size() == 1);
}

TEST_CASE("costates grow with the remaining horizon when the assumption holds") {
  for (const char* name : {"/ex2.scn", "/ex3.scn"}) {
    const Scenario sc = load_scenario(kDir + name);
    const ValueSequence vs = backward_recursion(sc.system, sc.cost, sc.T, sc.options.solve);
    for (int t = 0; t < sc.T; ++t) {
      CHECK((vs.p[t] - vs.p[t + 1]).minCoeff() >= -1e-12);
      CHECK(vs.p[t].minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("recursion value equals the enumerated game value") {
  const int T = 3;
  double worst = 0.0;
  for (int k = 0; k < 40; ++k) {
    const RandomInstance inst = oracle_instance(k);
    const ValueSequence vs = backward_recursion(inst.sys, inst.cost, T);
    const double v = optimal_value(vs, inst.x0);
    const double serial = brute_force_value_serial(inst.sys, inst.cost, T, inst.x0);
    const double parallel = brute_force_value(inst.sys, inst.cost, T, inst.x0);
    CHECK(parallel == serial);  // same vertex scan, merged deterministically
    worst = std::max(worst, std::abs(v - serial) / std::max(1.0, std::abs(v)));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("no single vertex flip beats the saddle policies") {
  const int T = 3;
  for (int k = 0; k < 15; ++k) {
    const RandomInstance inst = oracle_instance(100 + k);
    const ValueSequence vs = backward_recursion(inst.sys, inst.cost, T);
    const PolicySchedule pol = extract_policy(vs, inst.sys, inst.cost);
    const double base = schedule_cost(inst, T, pol.K, pol.L);
    CHECK(base == doctest::Approx(optimal_value(vs, inst.x0)).epsilon(1e-9));

    for (int t = 0; t < T; ++t) {
      for (int j = 0; j < inst.sys.l; ++j) {
        if (std::find(pol.attack_ties[t].begin(), pol.attack_ties[t].end(), j) !=
            pol.attack_ties[t].end())
          continue;
        std::vector<Matrix> L = pol.L;
        L[t].row(j) *= -1.0;
        CHECK(schedule_cost(inst, T, pol.K, L) <= base + 1e-9);
      }
      for (int i = 0; i < inst.sys.m; ++i) {
        if (std::find(pol.control_ties[t].begin(), pol.control_ties[t].end(), i) !=
            pol.control_ties[t].end())
          continue;
        std::vector<Matrix> K = pol.K;
        K[t].row(i) *= -1.0;
        CHECK(schedule_cost(inst, T, K, pol.L) >= base - 1e-9);
      }
    }
  }
}

TEST_CASE("value is homogeneous in the initial state") {
  const RandomInstance inst = oracle_instance(7);
  const ValueSequence vs = backward_recursion(inst.sys, inst.cost, 6);
  const double base = optimal_value(vs, inst.x0);
  for (double c : {0.0, 0.5, 2.0, 10.0}) {
    const double scaled = optimal_value(vs, (c * inst.x0).eval());
    CHECK(std::abs(scaled - c * base) <= 1e-12 * std::max(1.0, std::abs(c * base)));
  }
}

TEST_CASE("fixed point agrees with the long-horizon costate") {
  int converged = 0;
  double worst = 0.0;
  for (int k = 0; k < 12; ++k) {
    const RandomInstance inst = testsupport::fixed_point_instance(k);
    const FixedPoint fp = solve_algebraic(inst.sys, inst.cost);
    if (fp.status != FixedPointStatus::converged) continue;
    ++converged;
    CHECK(fp.residual <= 1e-10);
    CHECK((bellman_map(inst.sys, inst.cost, fp.p) - fp.p).cwiseAbs().maxCoeff() <= 1e-9);
    const ValueSequence vs = backward_recursion(inst.sys, inst.cost, 500);
    worst = std::max(worst, (fp.p - vs.p[0]).cwiseAbs().maxCoeff());
  }
  CHECK(converged == 12);
  CHECK(worst <= 1e-9);
}

TEST_CASE("divergence is detected and rated") {
  const Scenario sc = load_scenario(kDir + "/ex1.scn");
  const FixedPoint fp = solve_algebraic(sc.system, sc.cost, sc.options.solve);
  CHECK(fp.status == FixedPointStatus::diverged);
  CHECK(fp.growth_rate == doctest::Approx(1.04559).epsilon(2e-3));
}

TEST_CASE("assumption gate and argument guards") {
  const Scenario sc = load_scenario(kDir + "/ex1.scn");
  CHECK_THROWS_AS(backward_recursion(sc.system, sc.cost, 5), std::runtime_error);
  CHECK_NOTHROW(backward_recursion(sc.system, sc.cost, 5, sc.options.solve));

  const PositiveSystem sys = scalar_sys();
  const CostSpec cost = scalar_cost();
  CHECK_THROWS_AS(backward_recursion(sys, cost, -1), std::invalid_argument);
  CHECK_THROWS_WITH_AS(brute_force_value_serial(sys, cost, 13, Vector::Ones(1)),
                       "brute force limited to m*T <= 12 and l*T <= 12", std::invalid_argument);
  CHECK_THROWS_AS(optimal_value(backward_recursion(sys, cost, 1), Vector::Ones(2)),
                  std::invalid_argument);

  const ValueSequence empty_horizon = backward_recursion(sys, cost, 0);
  CHECK(empty_horizon.p.size() == 1);
  CHECK(optimal_value(empty_horizon, Vector::Ones(1)) == 0.0);
  CHECK(brute_force_value_serial(sys, cost, 0, Vector::Ones(1)) == 0.0);
}
