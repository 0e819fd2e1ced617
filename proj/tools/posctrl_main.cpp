#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "posctrl/csv.hpp"
#include "posctrl/margin.hpp"
#include "posctrl/repro.hpp"
#include "posctrl/robust.hpp"
#include "posctrl/scenario.hpp"
#include "posctrl/sim.hpp"
#include "posctrl/zero_dynamics.hpp"

#ifndef POSCTRL_SCENARIO_DIR
#define POSCTRL_SCENARIO_DIR "scenarios"
#endif

namespace {

using namespace posctrl;

const Eigen::IOFormat kMatFmt(6, 0, ", ", "\n", "    [", "]");

void print_matrix(const std::string& label, const Matrix& M) {
  std::cout << "  " << label << " (" << M.rows() << "x" << M.cols() << "):\n"
            << M.format(kMatFmt) << "\n";
}

std::string yesno(bool b) { return b ? "yes" : "no"; }

int run_validate(const std::string& path, bool print_derived) {
  const Scenario sc = load_scenario(path);
  const PositiveSystem& sys = sc.system;
  std::cout << "scenario '" << sc.name << "': n=" << sys.n << " m=" << sys.m << " p=" << sys.p
            << " l=" << sys.l << " T=" << sc.T << "\n";
  if (print_derived) {
    print_matrix("F = B*Ba", sys.F);
    print_matrix("E", sys.E);
    print_matrix("G", sys.G);
  }
  const AssumptionReport rep = check_assumption1(sys, sc.cost);
  std::cout << "dynamics condition A >= |B|E + |F|G: " << yesno(rep.dynamics_ok)
            << " (min slack " << format_double(rep.dynamics_slack.minCoeff()) << ")\n"
            << "cost condition s >= E'|r| - G'|alpha|: " << yesno(rep.cost_ok) << " (min slack "
            << format_double(rep.cost_slack.minCoeff()) << ")\n";
  if (rep.dynamics_ok && rep.cost_ok) {
    std::cout << "standing assumption holds\n";
    return 0;
  }
  std::cout << "standing assumption violated\n";
  return 1;
}

int run_solve(const std::string& path, std::optional<int> horizon, bool infinite,
              const std::string& out, const std::string& policy_out, const std::string& plot) {
  const Scenario sc = load_scenario(path);
  if (infinite) {
    const FixedPoint fp = solve_algebraic(sc.system, sc.cost, sc.options.solve);
    const char* status = fp.status == FixedPointStatus::converged   ? "converged"
                         : fp.status == FixedPointStatus::diverged  ? "diverged"
                                                                    : "max-iterations";
    std::cout << "fixed point: " << status << " after " << fp.iterations
              << " iterations, residual " << format_double(fp.residual) << ", growth rate "
              << format_double(fp.growth_rate) << "\n";
    if (fp.status == FixedPointStatus::converged) {
      std::cout << "p = " << fp.p.transpose().format(kMatFmt) << "\n"
                << "value p'x0 = " << format_double(fp.p.dot(sc.x0)) << "\n";
      return 0;
    }
    return 1;
  }
  const int T = horizon.value_or(sc.T);
  const ValueSequence vs = backward_recursion(sc.system, sc.cost, T, sc.options.solve);
  const PolicySchedule pol = extract_policy(vs, sc.system, sc.cost, sc.options.solve.tie_rule,
                                            sc.options.solve.tie_tol);
  std::cout << "horizon " << T << " value p_0'x0 = " << format_double(optimal_value(vs, sc.x0))
            << "\n";
  if (!out.empty()) write_file(out, value_csv(vs));
  if (!policy_out.empty()) write_file(policy_out, policy_csv(pol));
  if (!plot.empty()) {
    std::vector<double> ts, sums;
    for (int t = 0; t <= T; ++t) {
      ts.push_back(t);
      sums.push_back(vs.p[t].sum());
    }
    write_file(plot, plot_data(ts, sums));
  }
  return 0;
}

int run_zeros(const std::string& path, double target_norm) {
  const Scenario sc = load_scenario(path);
  const std::vector<ZeroTuple> zeros =
      invariant_zeros(sc.system.A, sc.system.F, sc.system.C);
  if (zeros.empty()) {
    std::cout << "no real invariant zeros\n";
    return 1;
  }
  for (const ZeroTuple& z : zeros) {
    const StealthCertificate cert = certify_stealth(z, sc.system, sc.cost, target_norm);
    std::cout << "lambda = " << format_double(z.lambda) << " (pencil residual "
              << format_double(z.pencil_residual) << ")\n"
              << "  z0 = " << cert.tuple.z0.transpose().format(kMatFmt) << "\n"
              << "  g  = " << cert.tuple.g.transpose().format(kMatFmt) << "\n"
              << "  admissible stealthy attack: " << yesno(cert.admissible)
              << " (x0>=0 " << yesno(cert.checks.x0_nonneg) << ", |g|<=Gx0 "
              << yesno(cert.checks.g_bounded) << ", Cx0=0 " << yesno(cert.checks.x0_in_kerC)
              << ", unstable " << yesno(cert.checks.lambda_unstable) << ", cost direction "
              << yesno(cert.checks.cost_direction_positive) << ")\n";
  }
  return 0;
}

std::string attack_csv(const std::vector<Vector>& schedule) {
  std::ostringstream out;
  const Eigen::Index l = schedule.empty() ? 0 : schedule[0].size();
  out << 't';
  for (Eigen::Index i = 0; i < l; ++i) out << ",a" << (i + 1);
  out << '\n';
  for (std::size_t t = 0; t < schedule.size(); ++t) {
    out << t;
    for (Eigen::Index i = 0; i < l; ++i) out << ',' << format_double(schedule[t](i));
    out << '\n';
  }
  return out.str();
}

std::optional<StealthCertificate> best_certificate(const Scenario& sc) {
  std::optional<StealthCertificate> best;
  for (const ZeroTuple& z : invariant_zeros(sc.system.A, sc.system.F, sc.system.C)) {
    const StealthCertificate cert = certify_stealth(z, sc.system, sc.cost);
    if (!cert.admissible) continue;
    if (!best || cert.tuple.lambda > best->tuple.lambda) best = cert;
  }
  return best;
}

int run_attack(const std::string& path, bool zero_dynamics, std::optional<int> horizon,
               const std::string& out) {
  const Scenario sc = load_scenario(path);
  const int T = horizon.value_or(sc.T);
  if (zero_dynamics) {
    const auto cert = best_certificate(sc);
    if (!cert) {
      std::cout << "no admissible stealthy zero tuple\n";
      return 1;
    }
    std::vector<Vector> schedule(T);
    for (int t = 0; t < T; ++t) schedule[t] = cert->tuple.g * std::pow(cert->tuple.lambda, t);
    std::cout << "zero-dynamics attack at lambda = " << format_double(cert->tuple.lambda)
              << ", accumulated cost over " << T << " stages = "
              << format_double(zero_attack_cost(*cert, sc.cost, T)) << "\n";
    if (!out.empty()) write_file(out, attack_csv(schedule));
    return 0;
  }
  const ValueSequence vs = backward_recursion(sc.system, sc.cost, T, sc.options.solve);
  const PolicySchedule pol = extract_policy(vs, sc.system, sc.cost, sc.options.solve.tie_rule,
                                            sc.options.solve.tie_tol);
  SimOptions sopts;
  sopts.constraint_tol = sc.options.constraint_tol;
  const SimResult sim = simulate(sc.system, sc.cost, sc.x0, T, Policy::schedule(pol.K),
                                 Policy::schedule(pol.L), sopts);
  std::vector<Vector> realized(sim.steps);
  for (int t = 0; t < sim.steps; ++t) realized[t] = sim.a.row(t).transpose();
  const CostComparison cmp = compare_with_value(sim, vs, sc.x0);
  std::cout << "worst-case attack along the saddle trajectory; realized cost "
            << format_double(cmp.realized) << " vs predicted " << format_double(cmp.predicted)
            << " (gap " << format_double(cmp.gap) << ")\n";
  if (!out.empty()) write_file(out, attack_csv(realized));
  return 0;
}

int run_margin(const std::string& path, const std::vector<double>& sweep,
               std::optional<int> horizon, const std::string& out, const std::string& plot) {
  const Scenario sc = load_scenario(path);
  const int T = horizon.value_or(sc.T);
  const ValueSequence vs = unconstrained_recursion(sc.system, sc.cost, T, sc.options.solve);
  if (!sweep.empty()) {
    std::vector<Vector> alphas;
    std::vector<MarginReport> reports;
    for (double a : sweep) {
      CostSpec cost = sc.cost;
      cost.alpha = Vector::Constant(sc.system.l, a);
      alphas.push_back(cost.alpha);
      reports.push_back(boundedness_margin(vs, sc.system, cost));
    }
    for (std::size_t k = 0; k < sweep.size(); ++k) {
      std::cout << "alpha = " << format_double(sweep[k]) << ": finite "
                << yesno(reports[k].finite_value) << ", t* = "
                << (reports[k].t_star ? std::to_string(*reports[k].t_star) : "none")
                << ", full-horizon margin " << format_double(reports[k].m(0)) << "\n";
    }
    if (!out.empty()) write_file(out, sweep_csv(alphas, reports));
    return 0;
  }
  const MarginReport rep = boundedness_margin(vs, sc.system, sc.cost);
  std::cout << "finite value: " << yesno(rep.finite_value) << "\n"
            << "t* (remaining horizon at first violation): "
            << (rep.t_star ? std::to_string(*rep.t_star) : "none") << "\n";
  if (rep.t_star)
    std::cout << "violating channel: " << (rep.violating_channel + 1) << "\n";
  std::cout << "full-horizon margin m(0) = " << format_double(rep.m(0)) << "\n";
  if (!out.empty()) write_file(out, margin_csv(rep));
  if (!plot.empty()) {
    std::vector<double> ts, ms;
    for (Eigen::Index t = 0; t < rep.m.size(); ++t) {
      ts.push_back(static_cast<double>(t));
      ms.push_back(rep.m(t));
    }
    write_file(plot, plot_data(ts, ms));
  }
  return 0;
}

int run_robust(const std::string& nominal_path, const std::string& actual_path,
               std::optional<int> horizon) {
  const Scenario nom = load_scenario(nominal_path);
  const Scenario act = load_scenario(actual_path);
  const int T = horizon.value_or(nom.T);
  const RobustnessReport rep = check_nominal_admissible(nom.system, act.system, nom.cost, T);
  std::cout << "hypotheses: assumption(nominal) " << yesno(rep.hypotheses.assumption1_nominal)
            << ", assumption(actual) " << yesno(rep.hypotheses.assumption1_actual) << ", r>=0 "
            << yesno(rep.hypotheses.r_nonneg) << ", F>=0 " << yesno(rep.hypotheses.F_nonneg)
            << ", B>=0 " << yesno(rep.hypotheses.B_nonneg) << "\n"
            << "control at full magnitude along both recursions: " << yesno(rep.nominal_static)
            << "\n";
  auto print_switches = [](const char* label, const std::vector<std::vector<int>>& sw) {
    std::cout << label;
    for (std::size_t ch = 0; ch < sw.size(); ++ch) {
      std::cout << " ch" << (ch + 1) << ":";
      if (sw[ch].empty()) std::cout << " -";
      for (int t : sw[ch]) std::cout << ' ' << t;
    }
    std::cout << "\n";
  };
  print_switches("attack sign switches (nominal):", rep.switches_nominal);
  print_switches("attack sign switches (actual): ", rep.switches_actual);
  std::cout << "max |A - A_r| = " << format_double(rep.max_abs_A_diff) << "\n"
            << "spectral radii " << format_double(rep.spectral_radius_nominal) << " vs "
            << format_double(rep.spectral_radius_actual) << " (gap "
            << format_double(rep.spectral_radius_diff) << ")\n"
            << "nominal-design admissibility: " << yesno(rep.admissible) << "\n";
  return rep.admissible ? 0 : 1;
}

int run_simulate(const std::string& path, std::optional<int> horizon, const std::string& control,
                 const std::string& attack, const std::string& out, const std::string& plot) {
  const Scenario sc = load_scenario(path);
  const int T = horizon.value_or(sc.T);

  Policy ctrl = Policy::none();
  Policy att = Policy::none();
  PolicySchedule pol;
  if (control != "none" || attack == "optimal" || attack == "static") {
    const ValueSequence vs = backward_recursion(sc.system, sc.cost, T, sc.options.solve);
    pol = extract_policy(vs, sc.system, sc.cost, sc.options.solve.tie_rule,
                         sc.options.solve.tie_tol);
  }
  if (control == "optimal")
    ctrl = Policy::schedule(pol.K);
  else if (control == "static")
    ctrl = Policy::static_gain(pol.K[0]);

  if (attack == "optimal")
    att = Policy::schedule(pol.L);
  else if (attack == "static")
    att = Policy::static_gain(pol.L[0]);
  else if (attack == "full")
    att = Policy::static_gain(sc.system.G);
  else if (attack == "zero-dynamics") {
    const auto cert = best_certificate(sc);
    if (!cert) {
      std::cout << "no admissible stealthy zero tuple\n";
      return 1;
    }
    att = Policy::static_gain(cert->L);
  }

  SimOptions sopts;
  sopts.constraint_tol = sc.options.constraint_tol;
  const SimResult sim = simulate(sc.system, sc.cost, sc.x0, T, ctrl, att, sopts);
  std::cout << "steps " << sim.steps << ", accumulated cost "
            << format_double(sim.steps > 0 ? sim.cum_cost(sim.steps - 1) : 0.0)
            << ", max |y| " << format_double(sim.stealth) << ", violations "
            << sim.violations.size() << (sim.diverged ? ", DIVERGED" : "") << "\n";
  if (!out.empty()) write_file(out, trajectory_csv(sim));
  if (!plot.empty()) {
    std::vector<double> ts, norms;
    for (Eigen::Index t = 0; t < sim.x.rows(); ++t) {
      ts.push_back(static_cast<double>(t));
      norms.push_back(sim.x.row(t).cwiseAbs().maxCoeff());
    }
    write_file(plot, plot_data(ts, norms));
  }
  return sim.diverged ? 1 : 0;
}

int run_reproduce(const std::string& which, const std::string& dir) {
  ReproReport rep;
  if (which == "ex1")
    rep = reproduce_ex1(load_scenario(dir + "/ex1.scn"));
  else if (which == "ex2")
    rep = reproduce_ex2(load_scenario(dir + "/ex2.scn"));
  else if (which == "ex3")
    rep = reproduce_ex3(load_scenario(dir + "/ex3.scn"), load_scenario(dir + "/ex3r.scn"));
  else
    throw std::invalid_argument("unknown example '" + which + "' (expected ex1, ex2 or ex3)");
  std::cout << render(rep);
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"attack-resilient analysis of discrete-time positive systems"};
  app.require_subcommand(1);

  std::string scn, scn2, out, policy_out, plot, control = "none", attack = "none";
  std::string which, dir = POSCTRL_SCENARIO_DIR;
  double target_norm = 1.0;
  std::optional<int> horizon;
  bool print_derived = false, infinite = false, zero_dynamics = false, worst_case = false;
  std::vector<double> sweep;

  auto* validate = app.add_subcommand("validate", "dimensions and the standing assumption");
  validate->add_option("scenario", scn)->required();
  validate->add_flag("--print-derived", print_derived, "echo the derived F, E, G");

  auto* solve = app.add_subcommand("solve", "finite-horizon recursion or its fixed point");
  solve->add_option("scenario", scn)->required();
  auto* hopt = solve->add_option("--horizon", horizon, "stages to recurse");
  solve->add_flag("--infinite", infinite, "iterate to the algebraic fixed point")
      ->excludes(hopt);
  solve->add_option("--out", out, "value sequence CSV");
  solve->add_option("--policy-out", policy_out, "gain schedule CSV");
  solve->add_option("--plot-data", plot, "two-column t / 1'p_t series");

  auto* zeros = app.add_subcommand("zeros", "real invariant zeros and stealth certificates");
  zeros->add_option("scenario", scn)->required();
  zeros->add_option("--target-norm", target_norm, "1-norm the zero direction is scaled to");

  auto* atk = app.add_subcommand("attack", "construct an attack schedule");
  atk->add_option("scenario", scn)->required();
  auto* zd = atk->add_flag("--zero-dynamics", zero_dynamics, "geometric stealthy schedule");
  atk->add_flag("--worst-case", worst_case, "saddle-point attack along the optimal closed loop")
      ->excludes(zd);
  atk->add_option("--horizon", horizon, "stages (default scenario T)");
  atk->add_option("--out", out, "attack schedule CSV");

  auto* margin = app.add_subcommand("margin", "boundedness margin of the unconstrained game");
  margin->add_option("scenario", scn)->required();
  margin->add_option("--alpha-sweep", sweep, "uniform alpha values to sweep")->delimiter(',');
  margin->add_option("--horizon", horizon, "stages (default scenario T)");
  margin->add_option("--out", out, "margin or sweep CSV");
  margin->add_option("--plot-data", plot, "two-column t / m_t series");

  auto* robust = app.add_subcommand("robust", "nominal-design admissibility across two models");
  robust->add_option("nominal", scn)->required();
  robust->add_option("actual", scn2)->required();
  robust->add_option("--horizon", horizon, "stages (default nominal scenario T)");

  auto* sim = app.add_subcommand("simulate", "roll the closed loop forward");
  sim->add_option("scenario", scn)->required();
  sim->add_option("--horizon", horizon, "stages (default scenario T)");
  sim->add_option("--control", control, "none|optimal|static")
      ->check(CLI::IsMember({"none", "optimal", "static"}));
  sim->add_option("--attack", attack, "none|optimal|static|full|zero-dynamics")
      ->check(CLI::IsMember({"none", "optimal", "static", "full", "zero-dynamics"}));
  sim->add_option("--out", out, "trajectory CSV");
  sim->add_option("--plot-data", plot, "two-column t / |x_t| series");

  auto* repro = app.add_subcommand("reproduce", "golden pipelines for the bundled scenarios");
  repro->add_option("example", which, "ex1, ex2 or ex3")->required();
  repro->add_option("--scenario-dir", dir, "directory holding the bundled .scn files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validate) return run_validate(scn, print_derived);
    if (*solve) return run_solve(scn, horizon, infinite, out, policy_out, plot);
    if (*zeros) return run_zeros(scn, target_norm);
    if (*atk) return run_attack(scn, zero_dynamics, horizon, out);
    if (*margin) return run_margin(scn, sweep, horizon, out, plot);
    if (*robust) return run_robust(scn, scn2, horizon);
    if (*sim) return run_simulate(scn, horizon, control, attack, out, plot);
    if (*repro) return run_reproduce(which, dir);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
