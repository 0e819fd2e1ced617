#pragma once

#include <cstdint>

#include "posctrl/model.hpp"

namespace posctrl {

// Distribution of the random test instances. Assumption 1 holds for every
// draw by construction: A = A0 + |B|E + |F|G with rho(A0) rescaled into
// [rho_min, rho_max], and s = max(E'|r| - G'|alpha|, 0) + U[0.1, 1].
struct InstanceParams {
  int max_n = 2;
  int max_m = 2;
  int max_l = 2;
  double rho_min = 0.3;
  double rho_max = 1.0;
  // Upper bound on the entries of E and G. Small values keep the Bellman map
  // contractive when rho_max < 1.
  double constraint_scale = 0.15;
};

// Brute-force oracle comparisons: dimensions small enough to enumerate.
InstanceParams oracle_suite_params();

// Fixed-point comparisons: contraction strong enough that a residual of
// 1e-10 puts the iterate within 1e-9 of the long-horizon costate.
InstanceParams fixed_point_suite_params();

struct RandomInstance {
  PositiveSystem sys;
  CostSpec cost;
  Vector x0;  // entries U[0, 1)
};

// Deterministic instance stream: the same seed always yields the same
// instance, independent of platform or standard library. Draw k of a suite
// is conventionally make_instance(base_seed + k).
RandomInstance make_instance(std::uint64_t seed, const InstanceParams& params = {});

}  // namespace posctrl
