#pragma once

#include <cstdint>
#include <vector>

#include "matchstab/policy.hpp"

namespace matchstab {

/// Stationary distribution of the buffer chain truncated at total buffer
/// `cap`: transitions that would exceed the cap are redirected to the empty
/// state. The kernel is exact (randomized tie-breaks expand into weighted
/// branches); the vector is found by damped power iteration to a 1e-12
/// residual, starting from the empty state. Word policies run on the word
/// space and are reported through their count images.
std::vector<std::pair<CommutativeState, double>> truncated_stationary(
    const MatchingStructure& g, const ArrivalMeasure& measure,
    const PolicySpec& policy, int64_t cap);

/// Count states reachable from the empty state under the policy's
/// positive-probability transitions, never exceeding the cap; sorted.
std::vector<CommutativeState> reach_set(const MatchingStructure& g,
                                        const ArrivalMeasure& measure,
                                        const PolicySpec& policy, int64_t cap);

}  // namespace matchstab
