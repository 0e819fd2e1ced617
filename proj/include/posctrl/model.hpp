#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace posctrl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Discrete-time positive system under actuator-channel attack:
//
//   x[t+1] = A x[t] + B u[t] + F a[t],   y[t] = C x[t]
//
// where F = B*Ba folds the attack into the actuation path. Both players are
// magnitude-limited by the state through nonnegative scaling matrices,
//
//   |u[t]| <= E x[t]  (elementwise),  E = Ey*C
//   |a[t]| <= G x[t]  (elementwise),  G = Ga*Ca
//
// E and G may instead be supplied directly. When a factored form and a direct
// matrix are both present, the factored product wins and the direct value must
// agree with it elementwise.
//
// Dimensions: A is n x n, B is n x m, C is p x n, Ba is m x l, Ey is m x p,
// Ga is l x pa, Ca is pa x n. Derived: F is n x l, E is m x n, G is l x n.
struct PositiveSystem {
  Matrix A;
  Matrix B;
  Matrix C;
  Matrix Ba;

  // Empty (0 x 0) when the corresponding constraint matrix was given directly.
  Matrix Ey;
  Matrix Ga;
  Matrix Ca;

  Matrix F;
  Matrix E;
  Matrix G;

  int n = 0;  // states
  int m = 0;  // inputs
  int p = 0;  // outputs
  int l = 0;  // attack channels
};

// Inputs accepted by build_system. A, B, C, Ba are mandatory. E needs either
// Ey or a direct E; G needs either the pair (Ga, Ca) or a direct G.
struct SystemInputs {
  Matrix A;
  Matrix B;
  Matrix C;
  Matrix Ba;
  std::optional<Matrix> Ey;
  std::optional<Matrix> Ga;
  std::optional<Matrix> Ca;
  std::optional<Matrix> E;
  std::optional<Matrix> G;
};

struct BuildOptions {
  // Entries of A, Ey, E, G below -nonneg_tol are rejected.
  double nonneg_tol = 1e-12;
  // Max elementwise disagreement allowed between a factored constraint matrix
  // and a directly supplied one.
  double consistency_tol = 1e-12;
  // The theory tolerates A = 0; reject it only on request.
  bool reject_zero_A = false;
};

// Validates dimensions and nonnegativity, derives F, E, G.
// Throws std::invalid_argument naming the offending matrix or entry.
PositiveSystem build_system(const SystemInputs& in, const BuildOptions& opts = {});

// Stage cost  s'x[t] + r'u[t] - alpha'a[t]  summed over t = 0..T-1.
// s must be nonnegative with at least one strictly positive entry.
struct CostSpec {
  Vector s;      // length n
  Vector r;      // length m
  Vector alpha;  // length l
};

// Throws std::invalid_argument on size mismatch or an invalid s.
void validate_cost(const PositiveSystem& sys, const CostSpec& cost);

// Standing assumption tying the dynamics to the constraint scalings:
//
//   A >= |B| E + |F| G          (dynamics condition)
//   s >= E'|r| - G'|alpha|      (cost condition)
//
// Together these keep the closed loop in the nonnegative orthant and the
// per-stage cost bounded below. Slacks are reported raw so callers can see
// how close a system sits to the boundary.
struct AssumptionReport {
  bool dynamics_ok = false;
  bool cost_ok = false;
  Matrix dynamics_slack;  // A - |B|E - |F|G
  Vector cost_slack;      // s - E'|r| + G'|alpha|
};

AssumptionReport check_assumption1(const PositiveSystem& sys, const CostSpec& cost);

// Throws std::runtime_error listing the worst slack when the assumption fails
// and override_flag is false.
void require_assumption1(const PositiveSystem& sys, const CostSpec& cost, bool override_flag);

// True when M1 and M2 have identical kernels, decided through row-space ranks:
// rank(M1) == rank(M2) == rank([M1; M2]). Rank uses singular values above
// 1e-10 times the largest singular value of the matrix under test.
bool check_kernel_alignment(const Matrix& M1, const Matrix& M2);

}  // namespace posctrl
