#pragma once

#include <cstdint>
#include <vector>

#include "posctrl/random_instances.hpp"
#include "posctrl/sim.hpp"

// Seed bases keep the unit suites and the acceptance gate on the same
// instance streams without the two ever having to share state.
namespace testsupport {

inline constexpr std::uint64_t kOracleBase = 1000;
inline constexpr std::uint64_t kFixedPointBase = 40000;
inline constexpr std::uint64_t kRolloutBase = 70000;

inline posctrl::RandomInstance oracle_instance(int k) {
  return posctrl::make_instance(kOracleBase + static_cast<std::uint64_t>(k),
                                posctrl::oracle_suite_params());
}

inline posctrl::RandomInstance fixed_point_instance(int k) {
  return posctrl::make_instance(kFixedPointBase + static_cast<std::uint64_t>(k),
                                posctrl::fixed_point_suite_params());
}

inline posctrl::RandomInstance rollout_instance(int k) {
  return posctrl::make_instance(kRolloutBase + static_cast<std::uint64_t>(k),
                                posctrl::oracle_suite_params());
}

inline double schedule_cost(const posctrl::RandomInstance& inst, int T,
                            const std::vector<posctrl::Matrix>& K,
                            const std::vector<posctrl::Matrix>& L) {
  const posctrl::SimResult res =
      posctrl::simulate(inst.sys, inst.cost, inst.x0, T, posctrl::Policy::schedule(K),
                        posctrl::Policy::schedule(L));
  return res.steps > 0 ? res.cum_cost(res.steps - 1) : 0.0;
}

}  // namespace testsupport
