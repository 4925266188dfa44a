#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "matchstab/rational.hpp"

namespace matchstab {

/// Class subsets are bitmasks over the canonical ordering, which is the order
/// the labels were given in (file array order).
using Mask = uint32_t;

enum class Side { Customer, Server };

constexpr int kMaxClassesPerSide = 30;

inline int popcount(Mask m) { return __builtin_popcount(m); }

/// The quadruple (C, S, E, F): customer and server classes, the matching
/// graph E (pairs that may depart together) and the arrival graph F (pairs
/// that may arrive together). Immutable after validation; share freely.
class MatchingStructure {
 public:
  /// Checks the structural invariants: distinct well-formed labels, edge
  /// endpoints exist, (C,S,E) connected, (C,S,F) without isolated vertices.
  static std::shared_ptr<const MatchingStructure> validate(
      std::vector<std::string> customers, std::vector<std::string> servers,
      std::vector<std::pair<std::string, std::string>> matching_edges,
      std::vector<std::pair<std::string, std::string>> arrival_edges);

  int customer_count() const { return static_cast<int>(customers_.size()); }
  int server_count() const { return static_cast<int>(servers_.size()); }
  const std::vector<std::string>& customer_labels() const { return customers_; }
  const std::vector<std::string>& server_labels() const { return servers_; }

  int customer_index(const std::string& label) const;
  int server_index(const std::string& label) const;

  /// E and F as index pairs, sorted by (customer, server).
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<std::pair<int, int>>& arrivals() const { return arrivals_; }

  bool has_edge(int c, int s) const { return (server_adj_[c] >> s) & 1u; }
  bool has_arrival(int c, int s) const { return (arrival_servers_[c] >> s) & 1u; }
  /// Ordinal of (c,s) in edges(), or -1.
  int edge_ordinal(int c, int s) const { return edge_ordinal_[c * server_count() + s]; }

  Mask server_neighbors(int c) const { return server_adj_[c]; }    // S(c)
  Mask customer_neighbors(int s) const { return customer_adj_[s]; } // C(s)
  const std::vector<int>& server_neighbor_list(int c) const { return server_lists_[c]; }
  const std::vector<int>& customer_neighbor_list(int s) const { return customer_lists_[s]; }

  Mask arrival_servers(int c) const { return arrival_servers_[c]; }
  Mask arrival_customers(int s) const { return arrival_customers_[s]; }

  Mask all_customers() const { return (customer_count() == 32) ? ~Mask(0) : ((Mask(1) << customer_count()) - 1); }
  Mask all_servers() const { return (server_count() == 32) ? ~Mask(0) : ((Mask(1) << server_count()) - 1); }

  /// S(U) for a customer subset U, C(V) for a server subset V.
  Mask neighbors_of_customers(Mask u) const;
  Mask neighbors_of_servers(Mask v) const;

  std::string customer_set_string(Mask u) const;
  std::string server_set_string(Mask v) const;

 private:
  MatchingStructure() = default;

  std::vector<std::string> customers_, servers_;
  std::vector<std::pair<int, int>> edges_, arrivals_;
  std::vector<Mask> server_adj_, customer_adj_;       // E adjacency
  std::vector<Mask> arrival_servers_, arrival_customers_;  // F adjacency
  std::vector<std::vector<int>> server_lists_, customer_lists_;
  std::vector<int> edge_ordinal_;
};

using StructurePtr = std::shared_ptr<const MatchingStructure>;

/// neighbors(Customer, U) = S(U); neighbors(Server, V) = C(V).
Mask neighbors(const MatchingStructure& g, Side side, Mask subset);

/// Exact arrival distribution on C x S with supp(mu) = F.
class ArrivalMeasure {
 public:
  /// Checks: entries nonnegative summing to one, support exactly F, full
  /// marginal supports.
  static ArrivalMeasure validate(StructurePtr structure,
                                 std::vector<Rational> table);

  /// Skips the support checks. Meant for evaluating drift formulas on
  /// degenerate tables (point masses) that are not valid arrival laws.
  static ArrivalMeasure unchecked(StructurePtr structure,
                                  std::vector<Rational> table);

  const MatchingStructure& structure() const { return *structure_; }
  const StructurePtr& structure_ptr() const { return structure_; }

  const Rational& at(int c, int s) const {
    return table_[c * structure_->server_count() + s];
  }
  const std::vector<Rational>& table() const { return table_; }

  /// (mu_C, mu_S); each sums to one exactly.
  std::pair<std::vector<Rational>, std::vector<Rational>> marginals() const;

  /// mu(U x V) for masks.
  Rational mass(Mask customers, Mask servers) const;

 private:
  ArrivalMeasure(StructurePtr structure, std::vector<Rational> table)
      : structure_(std::move(structure)), table_(std::move(table)) {}

  StructurePtr structure_;
  std::vector<Rational> table_;
};

/// Independent arrivals mu(c,s) = mu_C(c) * mu_S(s). The support is all of
/// C x S, so the returned measure lives on a copy of the structure whose
/// arrival graph is the complete bipartite graph.
ArrivalMeasure product_measure(const StructurePtr& structure,
                               const std::vector<Rational>& mu_c,
                               const std::vector<Rational>& mu_s);

}  // namespace matchstab
