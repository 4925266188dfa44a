#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "matchstab/facet.hpp"
#include "matchstab/model.hpp"
#include "matchstab/rng.hpp"

namespace matchstab::testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(MATCHSTAB_FIXTURE_DIR) + "/" + name;
}

inline std::vector<std::string> make_labels(int n, const std::string& suffix) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(std::to_string(i) + suffix);
  return out;
}

/// Random connected (C,S,E) with an arrival graph F without isolated
/// vertices. Retries until both hold.
inline StructurePtr random_structure(Xoshiro256pp& rng, int max_side = 4,
                                     bool full_arrivals = false) {
  while (true) {
    int nc = 1 + static_cast<int>(rng.below(max_side));
    int ns = 1 + static_cast<int>(rng.below(max_side));
    auto customers = make_labels(nc, "");
    auto servers = make_labels(ns, "'");
    std::vector<std::pair<std::string, std::string>> edges, arrivals;
    uint64_t density = 30 + rng.below(60);  // percent
    for (int c = 0; c < nc; ++c)
      for (int s = 0; s < ns; ++s)
        if (rng.below(100) < density) edges.emplace_back(customers[c], servers[s]);
    if (full_arrivals) {
      for (int c = 0; c < nc; ++c)
        for (int s = 0; s < ns; ++s) arrivals.emplace_back(customers[c], servers[s]);
    } else {
      for (int c = 0; c < nc; ++c)
        for (int s = 0; s < ns; ++s)
          if (rng.below(100) < 40 + rng.below(40))
            arrivals.emplace_back(customers[c], servers[s]);
    }
    try {
      return MatchingStructure::validate(customers, servers, edges, arrivals);
    } catch (const Error&) {
      continue;
    }
  }
}

/// Random full-support rational distribution over `support` with small
/// denominators; entries are positive integers over their sum.
inline std::vector<Rational> random_measure_table(
    Xoshiro256pp& rng, const MatchingStructure& g) {
  const int nc = g.customer_count();
  const int ns = g.server_count();
  std::vector<long long> weights(nc * ns, 0);
  long long total = 0;
  for (auto [c, s] : g.arrivals()) {
    long long w = 1 + static_cast<long long>(rng.below(9));
    weights[c * ns + s] = w;
    total += w;
  }
  std::vector<Rational> table(nc * ns);
  for (int i = 0; i < nc * ns; ++i)
    if (weights[i] > 0) table[i] = Rational(weights[i], total);
  return table;
}

inline std::vector<Rational> random_marginal(Xoshiro256pp& rng, int n) {
  std::vector<long long> weights(n);
  long long total = 0;
  for (auto& w : weights) {
    w = 1 + static_cast<long long>(rng.below(19));
    total += w;
  }
  std::vector<Rational> out(n);
  for (int i = 0; i < n; ++i) out[i] = Rational(weights[i], total);
  return out;
}

/// Facet set by direct double-subset enumeration (the oracle for the merge
/// closure).
inline std::vector<std::pair<Mask, Mask>> facets_bruteforce(
    const MatchingStructure& g) {
  std::vector<std::pair<Mask, Mask>> out{{0, 0}};
  const int nc = g.customer_count();
  const int ns = g.server_count();
  for (Mask u = 1; u < (Mask(1) << nc); ++u) {
    Mask allowed = g.all_servers() & ~g.neighbors_of_customers(u);
    // iterate nonempty subsets of `allowed`
    for (Mask v = allowed; v != 0; v = (v - 1) & allowed) out.push_back({u, v});
  }
  (void)ns;
  return out;
}

/// Hall feasibility by depth-first search over per-edge assignments.
inline bool matching_exists_bruteforce(const MatchingStructure& g,
                                       std::vector<int64_t> x,
                                       std::vector<int64_t> y) {
  // Greedy DFS over edges: assign each edge a count up to min(remaining).
  const auto& edges = g.edges();
  std::function<bool(size_t)> go = [&](size_t e) -> bool {
    if (e == edges.size()) {
      for (auto v : x)
        if (v != 0) return false;
      for (auto v : y)
        if (v != 0) return false;
      return true;
    }
    auto [c, s] = edges[e];
    int64_t most = std::min(x[c], y[s]);
    for (int64_t take = most; take >= 0; --take) {
      x[c] -= take;
      y[s] -= take;
      if (go(e + 1)) {
        x[c] += take;
        y[s] += take;
        return true;
      }
      x[c] += take;
      y[s] += take;
    }
    return false;
  };
  return go(0);
}

}  // namespace matchstab::testing
