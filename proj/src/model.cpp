#include "posctrl/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace posctrl {

namespace {

void check_dims(const Matrix& M, int rows, int cols, const char* name) {
  if (M.rows() != rows || M.cols() != cols) {
    std::ostringstream os;
    os << name << " must be " << rows << "x" << cols << ", got " << M.rows() << "x" << M.cols();
    throw std::invalid_argument(os.str());
  }
}

void check_nonneg(const Matrix& M, double tol, const char* name) {
  for (int i = 0; i < M.rows(); ++i) {
    for (int j = 0; j < M.cols(); ++j) {
      if (M(i, j) < -tol) {
        std::ostringstream os;
        os << name << "(" << i << "," << j << ") = " << M(i, j) << " is negative";
        throw std::invalid_argument(os.str());
      }
    }
  }
}

int svd_rank(const Matrix& M) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  const double thresh = 1e-10 * sv(0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > thresh) ++rank;
  }
  return rank;
}

}  // namespace

PositiveSystem build_system(const SystemInputs& in, const BuildOptions& opts) {
  PositiveSystem sys;
  const int n = static_cast<int>(in.A.rows());
  if (in.A.cols() != n || n == 0) throw std::invalid_argument("A must be square and nonempty");
  const int m = static_cast<int>(in.B.cols());
  check_dims(in.B, n, m, "B");
  if (m == 0) throw std::invalid_argument("B must have at least one column");
  const int p = static_cast<int>(in.C.rows());
  check_dims(in.C, p, n, "C");
  if (p == 0) throw std::invalid_argument("C must have at least one row");
  const int l = static_cast<int>(in.Ba.cols());
  check_dims(in.Ba, m, l, "Ba");
  if (l == 0) throw std::invalid_argument("Ba must have at least one column");

  check_nonneg(in.A, opts.nonneg_tol, "A");
  if (opts.reject_zero_A && in.A.cwiseAbs().maxCoeff() == 0.0) {
    throw std::invalid_argument("A is identically zero and reject_zero_A is set");
  }

  sys.A = in.A;
  sys.B = in.B;
  sys.C = in.C;
  sys.Ba = in.Ba;
  sys.F = in.B * in.Ba;
  sys.n = n;
  sys.m = m;
  sys.p = p;
  sys.l = l;

  // Input constraint matrix. Factored form wins over a direct E.
  if (in.Ey.has_value()) {
    check_dims(*in.Ey, m, p, "Ey");
    check_nonneg(*in.Ey, opts.nonneg_tol, "Ey");
    sys.Ey = *in.Ey;
    sys.E = sys.Ey * sys.C;
    if (in.E.has_value()) {
      check_dims(*in.E, m, n, "E");
      const double diff = (sys.E - *in.E).cwiseAbs().maxCoeff();
      if (diff > opts.consistency_tol) {
        std::ostringstream os;
        os << "direct E disagrees with Ey*C by " << diff;
        throw std::invalid_argument(os.str());
      }
    }
  } else if (in.E.has_value()) {
    check_dims(*in.E, m, n, "E");
    sys.E = *in.E;
  } else {
    throw std::invalid_argument("missing input constraint: supply Ey or E");
  }
  check_nonneg(sys.E, opts.nonneg_tol, "E (= Ey*C)");

  // Attack constraint matrix. Factored form wins over a direct G.
  if (in.Ga.has_value() != in.Ca.has_value()) {
    throw std::invalid_argument("Ga and Ca must be supplied together");
  }
  if (in.Ga.has_value()) {
    const int pa = static_cast<int>(in.Ca->rows());
    check_dims(*in.Ca, pa, n, "Ca");
    check_dims(*in.Ga, l, pa, "Ga");
    sys.Ga = *in.Ga;
    sys.Ca = *in.Ca;
    sys.G = sys.Ga * sys.Ca;
    if (in.G.has_value()) {
      check_dims(*in.G, l, n, "G");
      const double diff = (sys.G - *in.G).cwiseAbs().maxCoeff();
      if (diff > opts.consistency_tol) {
        std::ostringstream os;
        os << "direct G disagrees with Ga*Ca by " << diff;
        throw std::invalid_argument(os.str());
      }
    }
  } else if (in.G.has_value()) {
    check_dims(*in.G, l, n, "G");
    sys.G = *in.G;
  } else {
    throw std::invalid_argument("missing attack constraint: supply Ga and Ca, or G");
  }
  check_nonneg(sys.G, opts.nonneg_tol, "G (= Ga*Ca)");

  return sys;
}

void validate_cost(const PositiveSystem& sys, const CostSpec& cost) {
  if (cost.s.size() != sys.n) throw std::invalid_argument("s must have length n");
  if (cost.r.size() != sys.m) throw std::invalid_argument("r must have length m");
  if (cost.alpha.size() != sys.l) throw std::invalid_argument("alpha must have length l");
  if (cost.s.minCoeff() < -1e-12) throw std::invalid_argument("s must be nonnegative");
  if (cost.s.maxCoeff() <= 0.0) {
    throw std::invalid_argument("s must have at least one strictly positive entry");
  }
}

AssumptionReport check_assumption1(const PositiveSystem& sys, const CostSpec& cost) {
  validate_cost(sys, cost);
  AssumptionReport rep;
  rep.dynamics_slack = sys.A - sys.B.cwiseAbs() * sys.E - sys.F.cwiseAbs() * sys.G;
  rep.cost_slack = cost.s - sys.E.transpose() * cost.r.cwiseAbs() +
                   sys.G.transpose() * cost.alpha.cwiseAbs();
  rep.dynamics_ok = rep.dynamics_slack.minCoeff() >= -1e-12;
  rep.cost_ok = rep.cost_slack.minCoeff() >= -1e-12;
  return rep;
}

void require_assumption1(const PositiveSystem& sys, const CostSpec& cost, bool override_flag) {
  const AssumptionReport rep = check_assumption1(sys, cost);
  if ((rep.dynamics_ok && rep.cost_ok) || override_flag) return;
  std::ostringstream os;
  os << "standing assumption violated:";
  if (!rep.dynamics_ok) {
    os << " dynamics slack min " << rep.dynamics_slack.minCoeff();
  }
  if (!rep.cost_ok) {
    os << " cost slack min " << rep.cost_slack.minCoeff();
  }
  os << " (set the override flag to proceed anyway)";
  throw std::runtime_error(os.str());
}

bool check_kernel_alignment(const Matrix& M1, const Matrix& M2) {
  if (M1.cols() != M2.cols()) {
    throw std::invalid_argument("kernel alignment requires equal column counts");
  }
  Matrix stacked(M1.rows() + M2.rows(), M1.cols());
  stacked << M1, M2;
  const int r1 = svd_rank(M1);
  const int r2 = svd_rank(M2);
  const int rs = svd_rank(stacked);
  return r1 == r2 && r2 == rs;
}

}  // namespace posctrl
