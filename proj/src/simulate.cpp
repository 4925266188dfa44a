#include "matchstab/simulate.hpp"

#include <cstdlib>
#include <map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace matchstab {

int worker_threads() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
#else
  int n = 1;
#endif
  if (const char* env = std::getenv("MATCHSTAB_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1 && cap < n) n = cap;
  }
  return n;
}

ArrivalSampler::ArrivalSampler(const ArrivalMeasure& measure) {
  Rational::Int denom = 1;
  const MatchingStructure& g = measure.structure();
  for (int c = 0; c < g.customer_count(); ++c)
    for (int s = 0; s < g.server_count(); ++s) {
      const Rational& p = measure.at(c, s);
      if (!p.is_positive()) continue;
      denom = detail::checked_mul(denom / detail::gcd128(denom, p.den()), p.den());
    }
  if (denom > Rational::Int(INT64_MAX))
    throw Error(Errc::Overflow, "arrival denominators exceed 64 bits");
  denominator_ = static_cast<int64_t>(denom);
  int64_t acc = 0;
  for (int c = 0; c < g.customer_count(); ++c)
    for (int s = 0; s < g.server_count(); ++s) {
      const Rational& p = measure.at(c, s);
      if (!p.is_positive()) continue;
      pairs_.push_back({c, s});
      acc += static_cast<int64_t>(p.num() * (denom / p.den()));
      cumulative_.push_back(acc);
    }
  if (acc != denominator_)
    throw Error(Errc::Internal, "arrival masses do not sum to 1");
}

CommutativeState canonical_deep_state(const MatchingStructure& g,
                                      const Facet& facet) {
  if (facet.is_zero()) throw Error(Errc::ZeroFacet, "no deep state in the zero facet");
  CommutativeState st = CommutativeState::empty(g);
  int64_t nb_c = popcount(facet.bullet_c);
  int64_t nb_s = popcount(facet.bullet_s);
  for (int c = 0; c < g.customer_count(); ++c)
    if ((facet.bullet_c >> c) & 1u) st.x[c] = 2 * nb_s;
  for (int s = 0; s < g.server_count(); ++s)
    if ((facet.bullet_s >> s) & 1u) st.y[s] = 2 * nb_c;
  return st;
}

SimulationReport simulate(const MatchingStructure& g, const ArrivalMeasure& measure,
                          const PolicySpec& policy, int64_t horizon, uint64_t seed,
                          const TraceSink* trace) {
  if (horizon < 1) throw Error(Errc::BadInput, "horizon must be at least 1");
  ArrivalSampler sampler(measure);
  Xoshiro256pp rng(seed);

  const bool word = is_word_policy(policy.kind);
  const bool track_nn_stat = g.customer_count() == 3 && g.server_count() == 3;
  CommutativeState counts = CommutativeState::empty(g);
  WordState words;

  SimulationReport report;
  report.horizon = horizon;
  report.seed = seed;

  std::map<uint64_t, int64_t> occupancy;
  int64_t buffer = 0;
  uint64_t buffer_sum_lo = 0;
  double buffer_sum_hi = 0.0;  // spill to keep exact sums for huge buffers

  for (int64_t step = 1; step <= horizon; ++step) {
    auto [c, s] = sampler.draw(rng);
    int64_t prev = buffer;
    if (word) {
      auto r = step_word(g, policy.kind, words, c, s);
      words = std::move(r.state);
      if (r.matched_customer >= 0) counts.x[r.matched_customer] -= 1;
      if (r.matched_server >= 0) counts.y[r.matched_server] -= 1;
      if (r.matched_customer < 0 && r.matched_server < 0 && !g.has_edge(c, s)) {
        counts.x[c] += 1;
        counts.y[s] += 1;
      } else {
        if (r.matched_customer >= 0 && r.matched_server < 0) counts.x[c] += 1;
        if (r.matched_server >= 0 && r.matched_customer < 0) counts.y[s] += 1;
      }
      buffer = static_cast<int64_t>(words.u.size());
    } else {
      auto r = step_commutative(g, policy, counts, c, s, rng);
      counts = std::move(r.state);
      buffer = counts.total();
    }

    if (buffer == 0 && prev > 0) report.empty_visits += 1;
    report.max_buffer = std::max(report.max_buffer, buffer);
    uint64_t before = buffer_sum_lo;
    buffer_sum_lo += static_cast<uint64_t>(buffer);
    if (buffer_sum_lo < before) buffer_sum_hi += 18446744073709551616.0;

    Mask u = 0, v = 0;
    for (int i = 0; i < g.customer_count(); ++i)
      if (counts.x[i] > 0) u |= Mask(1) << i;
    for (int i = 0; i < g.server_count(); ++i)
      if (counts.y[i] > 0) v |= Mask(1) << i;
    uint64_t key = (static_cast<uint64_t>(u) << 32) | v;
    occupancy[key] += 1;
    if (track_nn_stat) {
      int64_t stat = std::min(counts.x[2] - counts.x[1], counts.y[2] - counts.y[1]);
      report.nn_ms_stat_final = stat;
      report.nn_ms_stat_min =
          report.nn_ms_stat_min ? std::min(*report.nn_ms_stat_min, stat) : stat;
    }
    if (trace) (*trace)(step, buffer, key);
  }

  report.final_buffer = buffer;
  report.avg_buffer = (buffer_sum_hi + static_cast<double>(buffer_sum_lo)) /
                      static_cast<double>(horizon);
  for (const auto& [key, count] : occupancy)
    report.facet_occupancy.push_back(
        {key, static_cast<double>(count) / static_cast<double>(horizon)});
  return report;
}

std::vector<SimulationReport> simulate_batch(const MatchingStructure& g,
                                             const ArrivalMeasure& measure,
                                             const PolicySpec& policy,
                                             int64_t horizon, uint64_t base_seed,
                                             uint64_t cell, int replications,
                                             bool parallel) {
  std::vector<SimulationReport> reports(replications);
  std::vector<std::exception_ptr> errors(replications);
#ifdef _OPENMP
  int threads = parallel ? worker_threads() : 1;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int rep = 0; rep < replications; ++rep) {
    try {
      uint64_t seed = Xoshiro256pp::stream(base_seed, cell, rep).next();
      reports[rep] = simulate(g, measure, policy, horizon, seed);
    } catch (...) {
      errors[rep] = std::current_exception();
    }
  }
#else
  (void)parallel;
  for (int rep = 0; rep < replications; ++rep) {
    try {
      uint64_t seed = Xoshiro256pp::stream(base_seed, cell, rep).next();
      reports[rep] = simulate(g, measure, policy, horizon, seed);
    } catch (...) {
      errors[rep] = std::current_exception();
    }
  }
#endif
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return reports;
}

double estimate_facet_drift(const MatchingStructure& g,
                            const ArrivalMeasure& measure,
                            const PolicySpec& policy, const Facet& facet,
                            int64_t samples, uint64_t seed) {
  if (facet.is_zero()) throw Error(Errc::ZeroFacet, "no drift on the zero facet");
  if (samples < 1) throw Error(Errc::BadInput, "need at least one sample");
  ArrivalSampler sampler(measure);
  Xoshiro256pp rng(seed);
  CommutativeState base = canonical_deep_state(g, facet);
  int64_t base_total = base.total();
  int64_t delta_sum = 0;
  for (int64_t i = 0; i < samples; ++i) {
    auto [c, s] = sampler.draw(rng);
    auto r = step_commutative(g, policy, base, c, s, rng);
    delta_sum += r.state.total() - base_total;
  }
  return static_cast<double>(delta_sum) / static_cast<double>(samples);
}

}  // namespace matchstab
