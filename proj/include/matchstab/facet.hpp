#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "matchstab/model.hpp"

namespace matchstab {

/// A region of the state space identified by which classes hold buffered
/// items. bullet = nonzero classes, forced = zero because they neighbour a
/// bullet class on the other side, free = zero without being forced. The six
/// sets partition C and S.
struct Facet {
  Mask bullet_c = 0, bullet_s = 0;
  Mask forced_c = 0, forced_s = 0;
  Mask free_c = 0, free_s = 0;

  bool is_zero() const { return bullet_c == 0 && bullet_s == 0; }
  uint64_t key() const {
    return (static_cast<uint64_t>(bullet_c) << 32) | bullet_s;
  }
  bool operator==(const Facet& o) const {
    return bullet_c == o.bullet_c && bullet_s == o.bullet_s;
  }
};

/// Classifies (U, V) into the six sets. U x V must avoid the matching graph
/// and the two sets must be empty together or nonempty together.
Facet classify_facet(const MatchingStructure& g, Mask u, Mask v);

/// True iff the free customer set or the free server set is empty.
bool is_saturated(const Facet& f);

/// All facets of the matching graph, zero facet included, sorted by
/// (bullet_c, bullet_s) bitmask. Grown by the pair-merge closure from the
/// single-class facets; sides are capped at 20 classes because the facet
/// count is exponential in the worst case.
std::vector<Facet> enumerate_facets(const MatchingStructure& g);

/// Facet of a buffer state given as count vectors.
Facet facet_of_state(const MatchingStructure& g, std::span<const int64_t> x,
                     std::span<const int64_t> y);

}  // namespace matchstab
