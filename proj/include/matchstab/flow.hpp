#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "matchstab/eta.hpp"
#include "matchstab/maxflow.hpp"
#include "matchstab/model.hpp"

namespace matchstab {

/// Witness that the majorization conditions fail: a customer subset U with
/// mu_C(U) >= mu_S(S(U)).
struct NcondCertificate {
  Mask subset = 0;       // U
  Rational lhs;          // mu_C(U)
  Rational rhs;          // mu_S(S(U))
};

struct NcondCheck {
  bool holds = false;
  std::optional<NcondCertificate> certificate;  // present iff !holds
};

/// The flow network on C u S u {source, sink}: source->c with capacity
/// mu_C(c), matching arcs with effectively unbounded capacity, s->sink with
/// capacity mu_S(s). With exact capacities the max-flow value is 1 iff the
/// weak majorization conditions hold; with the eta-perturbed capacities
/// mu_C(c) - |S(c)| eta and mu_S(s) - |C(s)| eta the value is (1, -|E|) iff
/// the strict conditions hold.
struct BuiltNetwork {
  FlowNetwork<EtaValue> net;
  std::vector<int> source_arcs, sink_arcs, edge_arcs;
};

BuiltNetwork build_flow_network(const MatchingStructure& g,
                                const std::vector<Rational>& mu_c,
                                const std::vector<Rational>& mu_s,
                                bool eta_perturbed);

/// Weak majorization: mu_C(U) <= mu_S(S(U)) and dually, all proper subsets.
bool check_ncond_leq(const MatchingStructure& g,
                     const std::vector<Rational>& mu_c,
                     const std::vector<Rational>& mu_s);

/// Strict majorization via a single eta-perturbed max-flow run.
bool check_ncond(const MatchingStructure& g, const std::vector<Rational>& mu_c,
                 const std::vector<Rational>& mu_s);
NcondCheck check_ncond_certified(const MatchingStructure& g,
                                 const std::vector<Rational>& mu_c,
                                 const std::vector<Rational>& mu_s);

/// Exponential oracle: evaluates every strict inequality directly.
/// Requires |C| + |S| <= 24.
bool ncond_bruteforce(const MatchingStructure& g,
                      const std::vector<Rational>& mu_c,
                      const std::vector<Rational>& mu_s);

/// A flow of value one that is strictly positive on every matching arc,
/// built by superposing a uniform flow of size eta per edge with a max flow
/// of the eta-reduced network; eta is a concrete rational found by halving.
struct PositiveFlow {
  Rational eta;
  std::vector<Rational> edge_flow;    // aligned with g.edges()
  std::vector<Rational> source_flow;  // per customer
  std::vector<Rational> sink_flow;    // per server
};

PositiveFlow positive_flow(const MatchingStructure& g,
                           const std::vector<Rational>& mu_c,
                           const std::vector<Rational>& mu_s);

/// Integer feasibility: can batches x and y be matched perfectly along E?
/// When not, `violating_customers` carries a Hall certificate U with
/// x(U) > y(S(U)).
struct MatchingResult {
  bool exists = false;
  std::vector<int64_t> edge_count;  // aligned with g.edges()
  Mask violating_customers = 0;
};

MatchingResult perfect_matching(const MatchingStructure& g,
                                std::span<const int64_t> x,
                                std::span<const int64_t> y);

}  // namespace matchstab
