#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "matchstab/analysis.hpp"
#include "matchstab/policy.hpp"

namespace matchstab {

struct SimulationReport {
  int64_t horizon = 0;
  uint64_t seed = 0;
  double avg_buffer = 0.0;  // time average of the buffer size
  int64_t max_buffer = 0;
  int64_t final_buffer = 0;
  int64_t empty_visits = 0;  // transitions from a nonempty to the empty state
  // fraction of steps spent in each facet, keyed by (bullet_c << 32 | bullet_s)
  std::vector<std::pair<uint64_t, double>> facet_occupancy;
  // min(x3 - x2, y3 - y2), tracked for 3x3 models
  std::optional<int64_t> nn_ms_stat_final, nn_ms_stat_min;
};

/// Called after every step with (step index from 1, buffer size, facet key).
using TraceSink = std::function<void(int64_t, int64_t, uint64_t)>;

/// Drives the buffer chain for `horizon` i.i.d. arrivals drawn from the
/// measure by exact inverse-CDF sampling. Identical inputs give bit-identical
/// reports. Word policies (fifo/lifo) run on the word state; everything else
/// on counts.
SimulationReport simulate(const MatchingStructure& g, const ArrivalMeasure& measure,
                          const PolicySpec& policy, int64_t horizon, uint64_t seed,
                          const TraceSink* trace = nullptr);

/// One report per replication, seeded from stream(base_seed, cell, rep).
/// The parallel flavour distributes replications across OpenMP threads and
/// returns the same reports in the same order as the serial one.
std::vector<SimulationReport> simulate_batch(const MatchingStructure& g,
                                             const ArrivalMeasure& measure,
                                             const PolicySpec& policy,
                                             int64_t horizon, uint64_t base_seed,
                                             uint64_t cell, int replications,
                                             bool parallel);

/// Monte-Carlo mean of the one-step buffer change from a deep canonical state
/// of the facet; converges to linear_drift.
double estimate_facet_drift(const MatchingStructure& g,
                            const ArrivalMeasure& measure,
                            const PolicySpec& policy, const Facet& facet,
                            int64_t samples, uint64_t seed);

/// The canonical deep state of a nonzero facet: bullet customers hold
/// 2|bullet_s| items, bullet servers 2|bullet_c|, so both sides balance and
/// every bullet coordinate is at least 2.
CommutativeState canonical_deep_state(const MatchingStructure& g,
                                      const Facet& facet);

/// Number of worker threads for parallel kernels: OpenMP's default, capped by
/// the MATCHSTAB_THREADS environment variable when set.
int worker_threads();

/// Exact inverse-CDF arrival sampler over the support of the measure in
/// canonical pair order.
class ArrivalSampler {
 public:
  explicit ArrivalSampler(const ArrivalMeasure& measure);

  std::pair<int, int> draw(Xoshiro256pp& rng) const {
    int64_t r = static_cast<int64_t>(rng.below(static_cast<uint64_t>(denominator_)));
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    return pairs_[static_cast<size_t>(it - cumulative_.begin())];
  }

  const std::vector<std::pair<int, int>>& support() const { return pairs_; }

 private:
  std::vector<std::pair<int, int>> pairs_;
  std::vector<int64_t> cumulative_;
  int64_t denominator_ = 0;
};

}  // namespace matchstab
