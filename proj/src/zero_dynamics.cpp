#include "posctrl/zero_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace posctrl {

namespace {

// Pencil P(lambda) = [lambda I - A, -F; Ep, 0]. A null vector [z; g] gives
// lambda z = A z + F g with Ep z = 0, which is the attack convention used
// throughout (g is the input that generates the ray).
Matrix pencil_at(const Matrix& A, const Matrix& F, const Matrix& Ep, double lambda) {
  const int n = static_cast<int>(A.rows());
  const int q = static_cast<int>(Ep.rows());
  const int l = static_cast<int>(F.cols());
  Matrix P = Matrix::Zero(n + q, n + l);
  P.topLeftCorner(n, n) = lambda * Matrix::Identity(n, n) - A;
  P.topRightCorner(n, l) = -F;
  if (q > 0) P.bottomLeftCorner(q, n) = Ep;
  return P;
}

double smallest_singular_value(const Matrix& M, double* largest = nullptr) {
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& sv = svd.singularValues();
  if (largest) *largest = sv.size() ? sv(0) : 0.0;
  return sv.size() ? sv(sv.size() - 1) : 0.0;
}

// Orthonormal basis of the row space (rows of the result) and of the kernel.
struct RowCompression {
  Matrix basis;   // q x n
  Matrix kernel;  // n x (n - q)
};

RowCompression compress_rows(const Matrix& M) {
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int q = 0;
  if (sv.size() > 0 && sv(0) > 0.0) {
    const double thresh = 1e-10 * sv(0);
    for (int i = 0; i < sv.size(); ++i) {
      if (sv(i) > thresh) ++q;
    }
  }
  RowCompression rc;
  rc.basis = svd.matrixV().leftCols(q).transpose();
  rc.kernel = svd.matrixV().rightCols(M.cols() - q);
  return rc;
}

std::vector<double> real_eigenvalues(const Matrix& M) {
  std::vector<double> out;
  if (M.rows() == 0) return out;
  Eigen::EigenSolver<Matrix> es(M, /*computeEigenvectors=*/false);
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const auto ev = es.eigenvalues()(i);
    if (std::abs(ev.imag()) <= 1e-8 * (1.0 + std::abs(ev.real()))) out.push_back(ev.real());
  }
  return out;
}

std::optional<ZeroTuple> tuple_at(const Matrix& A, const Matrix& F, const Matrix& Ep,
                                  double lambda) {
  const int n = static_cast<int>(A.rows());
  const int l = static_cast<int>(F.cols());
  const Matrix P = pencil_at(A, F, Ep, lambda);
  Eigen::JacobiSVD<Matrix> svd(P, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double largest = sv.size() ? sv(0) : 0.0;
  const double smallest = sv.size() ? sv(sv.size() - 1) : 0.0;
  if (!(smallest <= 1e-8 * std::max(1.0, largest))) return std::nullopt;
  const Vector v = svd.matrixV().col(n + l - 1);
  ZeroTuple zt;
  zt.lambda = lambda;
  zt.z0 = v.head(n);
  zt.g = v.tail(l);
  zt.pencil_residual = smallest;
  if (zt.z0.cwiseAbs().maxCoeff() < 1e-8) return std::nullopt;  // input-only direction
  int imax = 0;
  zt.z0.cwiseAbs().maxCoeff(&imax);
  if (zt.z0(imax) < 0.0) {
    zt.z0 = -zt.z0;
    zt.g = -zt.g;
  }
  return zt;
}

// Golden-section refinement of the pencil's smallest singular value around a
// candidate zero. The dip is V-shaped, so unimodal search suffices.
double polish_candidate(const Matrix& A, const Matrix& F, const Matrix& Ep, double center) {
  const double h = 0.05 * (1.0 + std::abs(center));
  double lo = center - h, hi = center + h;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = smallest_singular_value(pencil_at(A, F, Ep, x1));
  double f2 = smallest_singular_value(pencil_at(A, F, Ep, x2));
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = smallest_singular_value(pencil_at(A, F, Ep, x1));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = smallest_singular_value(pencil_at(A, F, Ep, x2));
    }
  }
  return f1 < f2 ? x1 : x2;
}

}  // namespace

std::vector<ZeroTuple> invariant_zeros(const Matrix& A, const Matrix& F, const Matrix& output) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || n == 0) throw std::invalid_argument("A must be square and nonempty");
  if (F.rows() != n) throw std::invalid_argument("F must have n rows");
  if (output.cols() != n) throw std::invalid_argument("output matrix must have n columns");
  const int l = static_cast<int>(F.cols());
  if (l == 0) throw std::invalid_argument("F must have at least one column");

  const RowCompression rc = compress_rows(output);
  const Matrix& Ep = rc.basis;
  const int q = static_cast<int>(Ep.rows());

  // A pencil that is singular at every lambda carries no isolated zeros; the
  // attack channel is non-minimal (too many inputs for the measured rows, or
  // a dead input direction).
  if (q < l) {
    throw std::runtime_error(
        "non-minimal attack channel: fewer independent output rows than attack inputs");
  }
  int singular_probes = 0;
  const double probes[] = {0.7368421052631579, 1.3127441, -0.4159265};
  for (double mu : probes) {
    double largest = 0.0;
    const double smallest = smallest_singular_value(pencil_at(A, F, Ep, mu), &largest);
    if (smallest <= 1e-10 * std::max(1.0, largest)) ++singular_probes;
  }
  if (singular_probes == 3) {
    throw std::runtime_error("non-minimal attack channel: pencil is singular for every lambda");
  }

  std::vector<double> candidates;
  if (q == l) {
    // Square pencil: lambda N v = M v with N = [I 0; 0 0], M = [A F; -Ep 0].
    Matrix M = Matrix::Zero(n + q, n + l);
    M.topLeftCorner(n, n) = A;
    M.topRightCorner(n, l) = F;
    M.bottomLeftCorner(q, n) = -Ep;
    Matrix N = Matrix::Zero(n + q, n + l);
    N.topLeftCorner(n, n) = Matrix::Identity(n, n);
    Eigen::GeneralizedEigenSolver<Matrix> ges(M, N, /*computeEigenvectors=*/false);
    for (int i = 0; i < ges.alphas().size(); ++i) {
      const std::complex<double> a = ges.alphas()(i);
      const double b = ges.betas()(i);
      const double scale = std::max(1.0, std::abs(a));
      if (std::abs(b) <= 1e-10 * scale) continue;  // infinite eigenvalue
      const std::complex<double> lam = a / b;
      if (std::abs(lam.imag()) > 1e-8 * (1.0 + std::abs(lam.real()))) continue;
      if (std::abs(lam.real()) >= 1e8) continue;
      candidates.push_back(lam.real());
    }
  } else {
    // Tall pencil (more independent outputs than attack inputs): sweep
    // candidate locations and keep those where the pencil loses column rank.
    candidates = real_eigenvalues(A);
    const Matrix restricted = rc.kernel.transpose() * A * rc.kernel;
    for (double lam : real_eigenvalues(restricted)) candidates.push_back(lam);
    std::vector<double> polished;
    for (double c : candidates) polished.push_back(polish_candidate(A, F, Ep, c));
    candidates = std::move(polished);
  }

  std::sort(candidates.begin(), candidates.end());
  std::vector<ZeroTuple> zeros;
  for (double lam : candidates) {
    if (!zeros.empty() && std::abs(lam - zeros.back().lambda) <= 1e-8 * (1.0 + std::abs(lam))) {
      continue;
    }
    if (auto zt = tuple_at(A, F, Ep, lam)) zeros.push_back(std::move(*zt));
  }
  return zeros;
}

StealthCertificate certify_stealth(const ZeroTuple& tuple, const PositiveSystem& sys,
                                   const CostSpec& cost, double target_one_norm) {
  validate_cost(sys, cost);
  if (tuple.z0.size() != sys.n) throw std::invalid_argument("z0 must have length n");
  if (tuple.g.size() != sys.l) throw std::invalid_argument("g must have length l");
  if (target_one_norm <= 0.0) throw std::invalid_argument("target 1-norm must be positive");
  const double norm1 = tuple.z0.lpNorm<1>();
  if (norm1 <= 0.0) throw std::invalid_argument("z0 is zero");

  StealthCertificate cert;
  cert.tuple = tuple;
  const double factor = target_one_norm / norm1;
  cert.tuple.z0 *= factor;
  cert.tuple.g *= factor;

  Vector& z0 = cert.tuple.z0;
  Vector& g = cert.tuple.g;
  const double scale = std::max(1.0, z0.cwiseAbs().maxCoeff());
  const double neg_tol = 1e-12 * scale;
  if (z0.minCoeff() < -neg_tol && (-z0).minCoeff() >= -neg_tol) {
    z0 = -z0;
    g = -g;
  }

  cert.L = g * z0.transpose() / z0.squaredNorm();
  const Vector direction = cost.s - cert.L.transpose() * cost.alpha;

  cert.checks.x0_nonneg = z0.minCoeff() >= -neg_tol;
  const Vector bound = sys.G * z0;
  cert.checks.g_bounded =
      (bound - g.cwiseAbs()).minCoeff() >= -1e-10 * std::max(1.0, bound.cwiseAbs().maxCoeff());
  cert.c_residual = (sys.C * z0).cwiseAbs().maxCoeff();
  cert.e_residual = (sys.E * z0).cwiseAbs().maxCoeff();
  cert.checks.x0_in_kerC = cert.c_residual <= 1e-8 * scale;
  cert.checks.lambda_real_positive = cert.tuple.lambda > 0.0;
  cert.checks.lambda_unstable = std::abs(cert.tuple.lambda) > 1.0;
  cert.checks.cost_direction_positive = direction.dot(z0) > 0.0;
  cert.cost_vector_positive = direction.minCoeff() > 0.0;

  cert.invariance_residual =
      ((sys.A + sys.F * cert.L) * z0 - cert.tuple.lambda * z0).cwiseAbs().maxCoeff();

  cert.admissible = cert.checks.x0_nonneg && cert.checks.g_bounded && cert.checks.x0_in_kerC &&
                    cert.checks.lambda_real_positive && cert.checks.lambda_unstable &&
                    cert.checks.cost_direction_positive;
  return cert;
}

namespace {

double geometric_sum(double lam, int T) {
  if (T <= 0) return 0.0;
  if (lam <= 0.0) throw std::invalid_argument("geometric sum requires lambda > 0");
  if (std::abs(lam - 1.0) < 1e-12) return static_cast<double>(T);
  // (lam^T - 1) / (lam - 1), stable when lam is close to 1.
  return std::expm1(T * std::log(lam)) / std::expm1(std::log(lam));
}

}  // namespace

double zero_attack_cost(const StealthCertificate& cert, const CostSpec& cost, int T) {
  if (T < 0) throw std::invalid_argument("horizon must be nonnegative");
  if (!cert.admissible) {
    throw std::runtime_error("zero_attack_cost requires an admissible stealth certificate");
  }
  const Vector direction = cost.s - cert.L.transpose() * cost.alpha;
  return direction.dot(cert.tuple.z0) * geometric_sum(cert.tuple.lambda, T);
}

ValueSequence zero_dp_recursion(const StealthCertificate& cert, const CostSpec& cost, int T) {
  if (T < 0) throw std::invalid_argument("horizon must be nonnegative");
  if (!cert.admissible) {
    throw std::runtime_error("zero_dp_recursion requires an admissible stealth certificate");
  }
  const Vector d = cost.s - cert.L.transpose() * cost.alpha;
  const double lam = cert.tuple.lambda;
  ValueSequence vs;
  vs.horizon = T;
  vs.p.assign(T + 1, Vector::Zero(d.size()));
  for (int t = T - 1; t >= 0; --t) {
    vs.p[t] = lam * vs.p[t + 1] + d;
    const Vector closed = d * geometric_sum(lam, T - t);
    const double err = (vs.p[t] - closed).cwiseAbs().maxCoeff();
    if (err > 1e-10 * std::max(1.0, closed.cwiseAbs().maxCoeff())) {
      std::ostringstream os;
      os << "ray recursion disagrees with its closed form at t = " << t << " by " << err;
      throw std::runtime_error(os.str());
    }
  }
  return vs;
}

}  // namespace posctrl
