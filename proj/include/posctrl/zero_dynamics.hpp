#pragma once

#include "posctrl/dp.hpp"
#include "posctrl/model.hpp"

#include <vector>

namespace posctrl {

// Invariant zeros of the triple (A, F, M) where M is an output or constraint
// matrix. A zero is a scalar lambda with a nontrivial pair (z0, g) satisfying
//
//   lambda z0 = A z0 + F g,   M z0 = 0.
//
// Along the ray x[t] = lambda^t z0, the open-loop input a[t] = lambda^t g
// keeps the trajectory invisible to M. Only real zeros are reported; complex
// pairs are discarded (a real attack cannot ride a complex ray).
struct ZeroTuple {
  double lambda = 0.0;
  Vector z0;  // unit-norm together with g, largest |z0| entry made positive
  Vector g;
  // Smallest singular value of the pencil [lambda I - A, -F; M', 0] at this
  // lambda, evaluated on the unit null vector.
  double pencil_residual = 0.0;
};

// Computes real invariant zeros against the row-rank compression of `output`.
// Throws std::runtime_error("non-minimal attack channel...") when the pencil
// is singular for every lambda (for example F = 0, or more attack channels
// than independent output rows). Eigenvalues with |lambda| >= 1e8 or a
// vanishing pencil beta are treated as infinite and dropped.
std::vector<ZeroTuple> invariant_zeros(const Matrix& A, const Matrix& F, const Matrix& output);

// Admissibility of a zero tuple as a stealthy geometric attack on sys.
struct StealthChecks {
  bool x0_nonneg = false;           // z0 lies in the nonnegative orthant (after sign flip)
  bool g_bounded = false;           // |g| <= G z0
  bool x0_in_kerC = false;          // C z0 = 0, so the ray never shows in the output
  bool lambda_real_positive = false;
  bool lambda_unstable = false;     // |lambda| > 1
  bool cost_direction_positive = false;  // (s - L'alpha)' z0 > 0
};

struct StealthCertificate {
  ZeroTuple tuple;      // rescaled to the requested 1-norm
  Matrix L;             // g z0' / (z0'z0), feedback realization with L z0 = g
  StealthChecks checks;
  bool admissible = false;        // conjunction of all StealthChecks fields
  // Stricter direction condition s - L'alpha > 0 elementwise, reported
  // separately from the scalar product check above.
  bool cost_vector_positive = false;
  double invariance_residual = 0.0;  // ||(A + F L) z0 - lambda z0||_inf
  double c_residual = 0.0;           // ||C z0||_inf
  double e_residual = 0.0;           // ||E z0||_inf
};

// Rescales (z0, g) so ||z0||_1 = target_one_norm, flips signs so z0 >= 0 when
// possible, and evaluates every admissibility check. Never throws on a failed
// check; inadmissible tuples come back with admissible = false.
StealthCertificate certify_stealth(const ZeroTuple& tuple, const PositiveSystem& sys,
                                   const CostSpec& cost, double target_one_norm = 1.0);

// Cost accumulated by the geometric attack over T stages,
// (s - L'alpha)' z0 * sum_{i=0}^{T-1} lambda^i, with the geometric sum
// evaluated stably near lambda = 1. Throws when the certificate is not
// admissible.
double zero_attack_cost(const StealthCertificate& cert, const CostSpec& cost, int T);

// Costate recursion restricted to the attacked ray,
// p_t = lambda p_{t+1} + (s - L'alpha), p_T = 0. Cross-checks the closed form
// p_t = (s - L'alpha) sum lambda^i and throws if they disagree beyond 1e-10
// relative. The leading costate satisfies p_0'z0 = zero_attack_cost(T).
ValueSequence zero_dp_recursion(const StealthCertificate& cert, const CostSpec& cost, int T);

}  // namespace posctrl
