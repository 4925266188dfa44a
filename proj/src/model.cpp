#include "matchstab/model.hpp"

#include <algorithm>
#include <set>

#include "matchstab/error.hpp"

namespace matchstab {
namespace {

void check_label(const std::string& label) {
  if (label.empty()) throw Error(Errc::BadLabel, "empty class label");
  for (char ch : label) {
    if (ch == '|' || ch == ',' || ch == '{' || ch == '}' ||
        static_cast<unsigned char>(ch) < 0x21)
      throw Error(Errc::BadLabel, "label '" + label + "' contains a reserved character");
  }
}

int find_label(const std::vector<std::string>& labels, const std::string& label) {
  for (size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return static_cast<int>(i);
  return -1;
}

}  // namespace

std::shared_ptr<const MatchingStructure> MatchingStructure::validate(
    std::vector<std::string> customers, std::vector<std::string> servers,
    std::vector<std::pair<std::string, std::string>> matching_edges,
    std::vector<std::pair<std::string, std::string>> arrival_edges) {
  if (customers.empty() || servers.empty())
    throw Error(Errc::BadInput, "both class sets must be nonempty");
  if (static_cast<int>(customers.size()) > kMaxClassesPerSide ||
      static_cast<int>(servers.size()) > kMaxClassesPerSide)
    throw Error(Errc::TooLarge, "at most 30 classes per side are supported");

  for (const auto& l : customers) check_label(l);
  for (const auto& l : servers) check_label(l);
  {
    std::set<std::string> seen;
    for (const auto& l : customers)
      if (!seen.insert(l).second)
        throw Error(Errc::DuplicateLabel, "duplicate customer label '" + l + "'");
    seen.clear();
    for (const auto& l : servers)
      if (!seen.insert(l).second)
        throw Error(Errc::DuplicateLabel, "duplicate server label '" + l + "'");
  }

  auto structure = std::shared_ptr<MatchingStructure>(new MatchingStructure());
  structure->customers_ = std::move(customers);
  structure->servers_ = std::move(servers);
  const int nc = structure->customer_count();
  const int ns = structure->server_count();

  auto resolve = [&](const std::vector<std::pair<std::string, std::string>>& raw,
                     const char* kind) {
    std::set<std::pair<int, int>> out;
    for (const auto& [cl, sl] : raw) {
      int c = find_label(structure->customers_, cl);
      int s = find_label(structure->servers_, sl);
      if (c < 0 || s < 0)
        throw Error(Errc::DanglingEdge, std::string(kind) + " edge (" + cl + "," +
                                            sl + ") has an unknown endpoint");
      out.emplace(c, s);
    }
    return std::vector<std::pair<int, int>>(out.begin(), out.end());
  };

  structure->edges_ = resolve(matching_edges, "matching");
  structure->arrivals_ = resolve(arrival_edges, "arrival");

  structure->server_adj_.assign(nc, 0);
  structure->customer_adj_.assign(ns, 0);
  structure->edge_ordinal_.assign(nc * ns, -1);
  for (size_t i = 0; i < structure->edges_.size(); ++i) {
    auto [c, s] = structure->edges_[i];
    structure->server_adj_[c] |= Mask(1) << s;
    structure->customer_adj_[s] |= Mask(1) << c;
    structure->edge_ordinal_[c * ns + s] = static_cast<int>(i);
  }
  structure->arrival_servers_.assign(nc, 0);
  structure->arrival_customers_.assign(ns, 0);
  for (auto [c, s] : structure->arrivals_) {
    structure->arrival_servers_[c] |= Mask(1) << s;
    structure->arrival_customers_[s] |= Mask(1) << c;
  }
  structure->server_lists_.assign(nc, {});
  structure->customer_lists_.assign(ns, {});
  for (auto [c, s] : structure->edges_) {
    structure->server_lists_[c].push_back(s);
    structure->customer_lists_[s].push_back(c);
  }

  // (C, S, E) must be connected as an undirected bipartite graph.
  {
    std::vector<int> stack{0};
    std::vector<char> seen(nc + ns, 0);
    seen[0] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      if (v < nc) {
        for (int s : structure->server_lists_[v])
          if (!seen[nc + s]) {
            seen[nc + s] = 1;
            stack.push_back(nc + s);
          }
      } else {
        for (int c : structure->customer_lists_[v - nc])
          if (!seen[c]) {
            seen[c] = 1;
            stack.push_back(c);
          }
      }
    }
    for (int v = 0; v < nc + ns; ++v)
      if (!seen[v]) {
        std::string label = v < nc ? structure->customers_[v]
                                   : structure->servers_[v - nc];
        throw Error(Errc::DisconnectedMatchingGraph,
                    "matching graph is not connected (class '" + label + "')");
      }
  }

  // (C, S, F) must have no isolated vertices.
  for (int c = 0; c < nc; ++c)
    if (structure->arrival_servers_[c] == 0)
      throw Error(Errc::IsolatedArrivalVertex,
                  "customer class '" + structure->customers_[c] +
                      "' has no arrival edge");
  for (int s = 0; s < ns; ++s)
    if (structure->arrival_customers_[s] == 0)
      throw Error(Errc::IsolatedArrivalVertex,
                  "server class '" + structure->servers_[s] +
                      "' has no arrival edge");

  return structure;
}

int MatchingStructure::customer_index(const std::string& label) const {
  int i = find_label(customers_, label);
  if (i < 0) throw Error(Errc::UnknownClass, "unknown customer class '" + label + "'");
  return i;
}

int MatchingStructure::server_index(const std::string& label) const {
  int i = find_label(servers_, label);
  if (i < 0) throw Error(Errc::UnknownClass, "unknown server class '" + label + "'");
  return i;
}

Mask MatchingStructure::neighbors_of_customers(Mask u) const {
  Mask out = 0;
  for (int c = 0; c < customer_count(); ++c)
    if ((u >> c) & 1u) out |= server_adj_[c];
  return out;
}

Mask MatchingStructure::neighbors_of_servers(Mask v) const {
  Mask out = 0;
  for (int s = 0; s < server_count(); ++s)
    if ((v >> s) & 1u) out |= customer_adj_[s];
  return out;
}

std::string MatchingStructure::customer_set_string(Mask u) const {
  std::string out = "{";
  bool first = true;
  for (int c = 0; c < customer_count(); ++c)
    if ((u >> c) & 1u) {
      if (!first) out += ",";
      out += customers_[c];
      first = false;
    }
  return out + "}";
}

std::string MatchingStructure::server_set_string(Mask v) const {
  std::string out = "{";
  bool first = true;
  for (int s = 0; s < server_count(); ++s)
    if ((v >> s) & 1u) {
      if (!first) out += ",";
      out += servers_[s];
      first = false;
    }
  return out + "}";
}

Mask neighbors(const MatchingStructure& g, Side side, Mask subset) {
  Mask all = side == Side::Customer ? g.all_customers() : g.all_servers();
  if ((subset & ~all) != 0)
    throw Error(Errc::UnknownClass, "subset contains a class outside the structure");
  return side == Side::Customer ? g.neighbors_of_customers(subset)
                                : g.neighbors_of_servers(subset);
}

ArrivalMeasure ArrivalMeasure::validate(StructurePtr structure,
                                        std::vector<Rational> table) {
  const int nc = structure->customer_count();
  const int ns = structure->server_count();
  if (static_cast<int>(table.size()) != nc * ns)
    throw Error(Errc::BadInput, "measure table has the wrong shape");

  Rational total;
  for (int c = 0; c < nc; ++c)
    for (int s = 0; s < ns; ++s) {
      const Rational& p = table[c * ns + s];
      if (p.is_negative())
        throw Error(Errc::NotADistribution, "negative probability");
      if (p.is_positive() != structure->has_arrival(c, s))
        throw Error(Errc::MeasureSupportMismatch,
                    "supp(mu) differs from the arrival graph at (" +
                        structure->customer_labels()[c] + "," +
                        structure->server_labels()[s] + ")");
      total += p;
    }
  if (total != Rational(1))
    throw Error(Errc::NotADistribution,
                "mass sums to " + total.to_string() + ", expected 1/1");
  // Full marginal supports follow from supp(mu) = F and F having no isolated
  // vertices, both already established.
  return ArrivalMeasure(std::move(structure), std::move(table));
}

ArrivalMeasure ArrivalMeasure::unchecked(StructurePtr structure,
                                         std::vector<Rational> table) {
  if (static_cast<int>(table.size()) !=
      structure->customer_count() * structure->server_count())
    throw Error(Errc::BadInput, "measure table has the wrong shape");
  return ArrivalMeasure(std::move(structure), std::move(table));
}

std::pair<std::vector<Rational>, std::vector<Rational>>
ArrivalMeasure::marginals() const {
  const int nc = structure_->customer_count();
  const int ns = structure_->server_count();
  std::vector<Rational> mu_c(nc), mu_s(ns);
  for (int c = 0; c < nc; ++c)
    for (int s = 0; s < ns; ++s) {
      mu_c[c] += at(c, s);
      mu_s[s] += at(c, s);
    }
  return {std::move(mu_c), std::move(mu_s)};
}

Rational ArrivalMeasure::mass(Mask customers, Mask servers) const {
  Rational out;
  const int nc = structure_->customer_count();
  const int ns = structure_->server_count();
  for (int c = 0; c < nc; ++c) {
    if (!((customers >> c) & 1u)) continue;
    for (int s = 0; s < ns; ++s)
      if ((servers >> s) & 1u) out += at(c, s);
  }
  return out;
}

ArrivalMeasure product_measure(const StructurePtr& structure,
                               const std::vector<Rational>& mu_c,
                               const std::vector<Rational>& mu_s) {
  const int nc = structure->customer_count();
  const int ns = structure->server_count();
  if (static_cast<int>(mu_c.size()) != nc || static_cast<int>(mu_s.size()) != ns)
    throw Error(Errc::BadInput, "marginal vector has the wrong length");
  auto check = [](const std::vector<Rational>& m) {
    Rational total;
    for (const auto& p : m) {
      if (!p.is_positive())
        throw Error(Errc::NotADistribution, "marginals must be strictly positive");
      total += p;
    }
    if (total != Rational(1))
      throw Error(Errc::NotADistribution, "marginal does not sum to 1");
  };
  check(mu_c);
  check(mu_s);

  std::vector<std::pair<std::string, std::string>> full;
  for (int c = 0; c < nc; ++c)
    for (int s = 0; s < ns; ++s)
      full.emplace_back(structure->customer_labels()[c],
                        structure->server_labels()[s]);
  std::vector<std::pair<std::string, std::string>> edge_labels;
  for (auto [c, s] : structure->edges())
    edge_labels.emplace_back(structure->customer_labels()[c],
                             structure->server_labels()[s]);
  auto complete = MatchingStructure::validate(structure->customer_labels(),
                                              structure->server_labels(),
                                              edge_labels, full);

  std::vector<Rational> table(nc * ns);
  for (int c = 0; c < nc; ++c)
    for (int s = 0; s < ns; ++s) table[c * ns + s] = mu_c[c] * mu_s[s];
  return ArrivalMeasure::validate(complete, std::move(table));
}

}  // namespace matchstab
