#pragma once

#include <vector>

#include "matchstab/model.hpp"

namespace matchstab {

/// Birth-death-like chain on the integers with region-dependent jump
/// probabilities: row a below zero, row b at zero, row c above zero. All
/// outer probabilities must be positive and each row sums to one.
struct ZChainParams {
  Rational a_down, a_stay, a_up;  // x < 0
  Rational b_down, b_stay, b_up;  // x = 0
  Rational c_down, c_stay, c_up;  // x > 0

  static ZChainParams validate(ZChainParams p);
};

/// The auxiliary chain that tracks the difference of the middle-class counts
/// of a 3x3 N-shaped model on its deep facets. Requires the canonical
/// matching graph {(1,2'),(1,3'),(2,1'),(2,2'),(3,1')} and a full-support
/// measure on C x S.
ZChainParams z_chain_params_nn(const ArrivalMeasure& measure);

/// Closed-form stationary quantities. Positive recurrence needs
/// a_down < a_up and c_up < c_down; the tails are geometric with the two
/// returned ratios.
struct ZChainStationary {
  Rational pi0;
  Rational pi_pos, pi_neg;       // mass of {1,2,...} and {-1,-2,...}
  Rational ratio_pos, ratio_neg; // c_up/c_down and a_down/a_up

  /// Exact point mass; numerators grow geometrically with |x|, so this is
  /// meant for small |x| (it throws Errc::Overflow beyond 128 bits).
  Rational point(const ZChainParams& p, long long x) const;
  double point_double(const ZChainParams& p, long long x) const;
};

ZChainStationary z_chain_stationary(const ZChainParams& params);

/// Expected buffer growth per step of the priority counterexample, mixing the
/// three conditional drifts by the stationary region masses. A positive
/// composite certifies transience of the full chain.
struct NnDriftNumbers {
  Rational alpha, beta, gamma;
  Rational composite;  // pi_neg*alpha + pi0*beta + pi_pos*gamma
};

NnDriftNumbers nn_counterexample_drift(const ArrivalMeasure& measure);

/// Stationary distribution of the chain truncated to [-cap, cap], with
/// outward jumps at the rim redirected to 0. Index i maps to state i - cap.
std::vector<double> z_chain_truncated_stationary(const ZChainParams& params,
                                                 int cap);

}  // namespace matchstab
