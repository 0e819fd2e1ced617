#include "posctrl/dp.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace posctrl {

namespace {

double tie_sign(double v, double tie_tol, TieRule rule) {
  if (std::abs(v) <= tie_tol) {
    switch (rule) {
      case TieRule::zero: return 0.0;
      case TieRule::plus_one: return 1.0;
      case TieRule::minus_one: return -1.0;
    }
  }
  return v > 0.0 ? 1.0 : -1.0;
}

GainResult gain_from_rows(const Vector& arg, const Matrix& rows, TieRule rule, double tie_tol) {
  GainResult out;
  out.gain = Matrix::Zero(rows.rows(), rows.cols());
  for (int i = 0; i < arg.size(); ++i) {
    if (std::abs(arg(i)) <= tie_tol) out.ties.push_back(i);
    const double sgn = tie_sign(arg(i), tie_tol, rule);
    if (sgn != 0.0) out.gain.row(i) = sgn * rows.row(i);
  }
  return out;
}

VertexFamily family_from_arg(const Vector& arg, const Matrix& rows, double tie_tol,
                             int max_enum_ties) {
  VertexFamily fam;
  fam.base_sign.resize(arg.size());
  for (int i = 0; i < arg.size(); ++i) {
    if (std::abs(arg(i)) <= tie_tol) {
      fam.ties.push_back(i);
      fam.base_sign[i] = 0.0;
    } else {
      fam.base_sign[i] = arg(i) > 0.0 ? 1.0 : -1.0;
    }
  }
  const int k = static_cast<int>(fam.ties.size());
  if (k > max_enum_ties) {
    fam.enumerated = false;
    return fam;
  }
  fam.enumerated = true;
  const std::uint64_t count = std::uint64_t{1} << k;
  fam.vertices.reserve(count);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    Matrix V = Matrix::Zero(rows.rows(), rows.cols());
    for (int i = 0; i < arg.size(); ++i) {
      double sgn = fam.base_sign[i];
      if (sgn == 0.0) {
        int pos = 0;
        while (fam.ties[pos] != i) ++pos;
        sgn = (mask >> pos) & 1u ? 1.0 : -1.0;
      }
      V.row(i) = sgn * rows.row(i);
    }
    fam.vertices.push_back(std::move(V));
  }
  return fam;
}

}  // namespace

Vector bellman_map(const PositiveSystem& sys, const CostSpec& cost, const Vector& p) {
  const Vector bu = cost.r + sys.B.transpose() * p;
  const Vector ba = sys.F.transpose() * p - cost.alpha;
  return cost.s + sys.A.transpose() * p - sys.E.transpose() * bu.cwiseAbs() +
         sys.G.transpose() * ba.cwiseAbs();
}

Vector bellman_map_attack_free(const PositiveSystem& sys, const CostSpec& cost, const Vector& p) {
  const Vector bu = cost.r + sys.B.transpose() * p;
  return cost.s + sys.A.transpose() * p - sys.E.transpose() * bu.cwiseAbs();
}

ValueSequence backward_recursion(const PositiveSystem& sys, const CostSpec& cost, int T,
                                 const SolveOptions& opts) {
  if (T < 0) throw std::invalid_argument("horizon must be nonnegative");
  require_assumption1(sys, cost, opts.override_assumption);
  ValueSequence vs;
  vs.horizon = T;
  vs.p.assign(T + 1, Vector::Zero(sys.n));
  for (int t = T - 1; t >= 0; --t) {
    vs.p[t] = bellman_map(sys, cost, vs.p[t + 1]);
    if (!vs.p[t].allFinite()) {
      std::ostringstream os;
      os << "backward recursion produced a non-finite costate at t = " << t;
      throw std::runtime_error(os.str());
    }
  }
  return vs;
}

FixedPoint solve_algebraic(const PositiveSystem& sys, const CostSpec& cost,
                           const SolveOptions& opts) {
  require_assumption1(sys, cost, opts.override_assumption);
  FixedPoint fp;
  fp.p = Vector::Zero(sys.n);
  double prev_norm = 0.0;
  for (int k = 0; k < opts.max_iter; ++k) {
    const Vector next = bellman_map(sys, cost, fp.p);
    fp.residual = (next - fp.p).cwiseAbs().maxCoeff();
    const double norm = next.cwiseAbs().maxCoeff();
    if (prev_norm > 0.0) fp.growth_rate = norm / prev_norm;
    prev_norm = norm;
    fp.p = next;
    fp.iterations = k + 1;
    if (!fp.p.allFinite() || norm > opts.divergence_ceiling) {
      fp.status = FixedPointStatus::diverged;
      return fp;
    }
    if (fp.residual <= opts.tol) {
      fp.status = FixedPointStatus::converged;
      return fp;
    }
  }
  fp.status = FixedPointStatus::max_iter;
  return fp;
}

GainResult attack_gain(const Vector& p_next, const PositiveSystem& sys, const CostSpec& cost,
                       TieRule rule, double tie_tol) {
  if (p_next.size() != sys.n) throw std::invalid_argument("p_next must have length n");
  const Vector arg = sys.F.transpose() * p_next - cost.alpha;
  return gain_from_rows(arg, sys.G, rule, tie_tol);
}

GainResult control_gain(const Vector& p_next, const PositiveSystem& sys, const CostSpec& cost,
                        TieRule rule, double tie_tol) {
  if (p_next.size() != sys.n) throw std::invalid_argument("p_next must have length n");
  const Vector arg = cost.r + sys.B.transpose() * p_next;
  return gain_from_rows(arg, sys.E, rule, tie_tol);
}

PolicySchedule extract_policy(const ValueSequence& vs, const PositiveSystem& sys,
                              const CostSpec& cost, TieRule rule, double tie_tol) {
  PolicySchedule ps;
  const int T = vs.horizon;
  ps.K.reserve(T);
  ps.L.reserve(T);
  for (int t = 0; t < T; ++t) {
    GainResult ku = control_gain(vs.p[t + 1], sys, cost, rule, tie_tol);
    GainResult la = attack_gain(vs.p[t + 1], sys, cost, rule, tie_tol);
    ps.K.push_back(std::move(ku.gain));
    ps.L.push_back(std::move(la.gain));
    ps.control_ties.push_back(std::move(ku.ties));
    ps.attack_ties.push_back(std::move(la.ties));
  }
  return ps;
}

PolicySets policy_sets(const Vector& p_next, const PositiveSystem& sys, const CostSpec& cost,
                       double tie_tol, int max_enum_ties) {
  if (p_next.size() != sys.n) throw std::invalid_argument("p_next must have length n");
  PolicySets sets;
  const Vector arg_u = cost.r + sys.B.transpose() * p_next;
  const Vector arg_a = sys.F.transpose() * p_next - cost.alpha;
  sets.control = family_from_arg(arg_u, sys.E, tie_tol, max_enum_ties);
  sets.attack = family_from_arg(arg_a, sys.G, tie_tol, max_enum_ties);
  return sets;
}

double optimal_value(const ValueSequence& vs, const Vector& x0) {
  if (vs.p.empty()) throw std::invalid_argument("empty value sequence");
  if (x0.size() != vs.p.front().size()) throw std::invalid_argument("x0 has wrong length");
  if (x0.minCoeff() < -1e-12) throw std::invalid_argument("x0 must be nonnegative");
  return vs.p.front().dot(x0);
}

namespace {

// Cost of one vertex-schedule pair. Sign bits are consumed lowest-first,
// channel-major within each stage.
double rollout_vertices(const PositiveSystem& sys, const CostSpec& cost, int T, const Vector& x0,
                        std::uint64_t du, std::uint64_t da, Vector& x, Vector& u, Vector& a,
                        Vector& xn) {
  x = x0;
  double total = 0.0;
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < sys.m; ++i) {
      const double sgn = (du >> (t * sys.m + i)) & 1u ? 1.0 : -1.0;
      u(i) = sgn * sys.E.row(i).dot(x);
    }
    for (int j = 0; j < sys.l; ++j) {
      const double sgn = (da >> (t * sys.l + j)) & 1u ? 1.0 : -1.0;
      a(j) = sgn * sys.G.row(j).dot(x);
    }
    total += cost.s.dot(x) + cost.r.dot(u) - cost.alpha.dot(a);
    xn.noalias() = sys.A * x;
    xn.noalias() += sys.B * u;
    xn.noalias() += sys.F * a;
    x.swap(xn);
  }
  return total;
}

double worst_attack(const PositiveSystem& sys, const CostSpec& cost, int T, const Vector& x0,
                    std::uint64_t du, Vector& x, Vector& u, Vector& a, Vector& xn) {
  const std::uint64_t n_attack = std::uint64_t{1} << (sys.l * T);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::uint64_t da = 0; da < n_attack; ++da) {
    const double c = rollout_vertices(sys, cost, T, x0, du, da, x, u, a, xn);
    if (c > worst) worst = c;
  }
  return worst;
}

void brute_force_precheck(const PositiveSystem& sys, const CostSpec& cost, int T,
                          const Vector& x0) {
  validate_cost(sys, cost);
  if (T < 0) throw std::invalid_argument("horizon must be nonnegative");
  if (sys.m * T > 12 || sys.l * T > 12) {
    throw std::invalid_argument("brute force limited to m*T <= 12 and l*T <= 12");
  }
  if (x0.size() != sys.n) throw std::invalid_argument("x0 has wrong length");
  if (x0.minCoeff() < -1e-12) throw std::invalid_argument("x0 must be nonnegative");
}

}  // namespace

double brute_force_value_serial(const PositiveSystem& sys, const CostSpec& cost, int T,
                                const Vector& x0) {
  brute_force_precheck(sys, cost, T, x0);
  const std::uint64_t n_control = std::uint64_t{1} << (sys.m * T);
  double best = std::numeric_limits<double>::infinity();
  Vector x(sys.n), u(sys.m), a(sys.l), xn(sys.n);
  for (std::uint64_t du = 0; du < n_control; ++du) {
    const double w = worst_attack(sys, cost, T, x0, du, x, u, a, xn);
    if (w < best) best = w;
  }
  return best;
}

double brute_force_value(const PositiveSystem& sys, const CostSpec& cost, int T,
                         const Vector& x0) {
  brute_force_precheck(sys, cost, T, x0);
  const std::int64_t n_control = std::int64_t{1} << (sys.m * T);
  double best = std::numeric_limits<double>::infinity();
#if defined(_OPENMP)
#pragma omp parallel
  {
    Vector x(sys.n), u(sys.m), a(sys.l), xn(sys.n);
    double local = std::numeric_limits<double>::infinity();
#pragma omp for schedule(static) nowait
    for (std::int64_t du = 0; du < n_control; ++du) {
      const double w =
          worst_attack(sys, cost, T, x0, static_cast<std::uint64_t>(du), x, u, a, xn);
      if (w < local) local = w;
    }
#pragma omp critical
    {
      if (local < best) best = local;
    }
  }
#else
  Vector x(sys.n), u(sys.m), a(sys.l), xn(sys.n);
  for (std::int64_t du = 0; du < n_control; ++du) {
    const double w = worst_attack(sys, cost, T, x0, static_cast<std::uint64_t>(du), x, u, a, xn);
    if (w < best) best = w;
  }
#endif
  return best;
}

}  // namespace posctrl
