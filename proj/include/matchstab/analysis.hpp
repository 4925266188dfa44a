#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "matchstab/facet.hpp"
#include "matchstab/model.hpp"
#include "matchstab/policy.hpp"

namespace matchstab {

/// Directed graph on C u S: matching edges oriented customer -> server,
/// arrival edges reversed server -> customer. Nodes 0..|C|-1 are customers,
/// |C|..|C|+|S|-1 servers.
std::vector<std::vector<int>> pairing_digraph(const MatchingStructure& g);

/// A structure admits a measure satisfying the strict majorization
/// conditions iff its pairing digraph is strongly connected.
bool is_stable_structure(const MatchingStructure& g);

/// On failure carries a witness pair (c, s) with no directed path between
/// them in the stated direction.
struct StableStructureCheck {
  bool stable = false;
  int witness_customer = -1;
  int witness_server = -1;
  bool customer_to_server = true;  // direction of the missing path
};

StableStructureCheck stable_structure_certified(const MatchingStructure& g);

/// Builds a measure with supp(mu) = F whose marginals satisfy the strict
/// conditions, from the stationary row vector of the product of the two
/// uniform routing matrices (exact rational solve).
ArrivalMeasure construct_stable_measure(const StructurePtr& structure);

/// Expected one-step change of the buffer size from any state in the facet:
/// 1 - mu_C(forced) - mu_S(forced) - mu(E within the free region). Negative
/// on every nonzero facet iff the sufficient conditions hold.
Rational linear_drift(const MatchingStructure& g, const ArrivalMeasure& measure,
                      const Facet& facet);

struct DriftReport {
  Facet facet;
  Rational drift;
  bool saturated = false;
  bool scond_ok = false;  // drift < 0
};

struct ScondResult {
  bool holds = false;
  std::vector<DriftReport> reports;  // every nonzero facet, sorted by key
};

ScondResult check_scond(const MatchingStructure& g, const ArrivalMeasure& measure);

/// A finite arrival sequence (each pair in supp(mu)) that empties the buffer
/// under *every* admissible policy. Built along the pairing digraph as in the
/// reachability proof, but verified against the set of all states any
/// admissible selector could be in, so divergent tie-breaking cannot strand a
/// policy.
std::vector<std::pair<int, int>> drain_to_empty(const MatchingStructure& g,
                                                const ArrivalMeasure& measure,
                                                const CommutativeState& state);

}  // namespace matchstab
