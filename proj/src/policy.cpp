#include "matchstab/policy.hpp"

#include <algorithm>

#include "matchstab/flow.hpp"

namespace matchstab {

PolicyKind parse_policy(const std::string& name) {
  if (name == "fifo") return PolicyKind::Fifo;
  if (name == "lifo") return PolicyKind::Lifo;
  if (name == "pr") return PolicyKind::Priority;
  if (name == "random") return PolicyKind::Random;
  if (name == "ml") return PolicyKind::MatchLongest;
  if (name == "ms") return PolicyKind::MatchShortest;
  if (name == "flow") return PolicyKind::Flow;
  throw Error(Errc::BadInput, "unknown policy '" + name + "'");
}

std::string policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Fifo: return "fifo";
    case PolicyKind::Lifo: return "lifo";
    case PolicyKind::Priority: return "pr";
    case PolicyKind::Random: return "random";
    case PolicyKind::MatchLongest: return "ml";
    case PolicyKind::MatchShortest: return "ms";
    case PolicyKind::Flow: return "flow";
  }
  return "?";
}

bool is_word_policy(PolicyKind kind) {
  return kind == PolicyKind::Fifo || kind == PolicyKind::Lifo;
}

void require_valid_state(const MatchingStructure& g, const CommutativeState& st) {
  facet_of_state(g, st.x, st.y);  // throws InvalidState on violation
}

CommutativeState WordState::image(const MatchingStructure& g) const {
  CommutativeState st = CommutativeState::empty(g);
  for (uint8_t c : u) st.x[c] += 1;
  for (uint8_t s : v) st.y[s] += 1;
  return st;
}

WordState WordState::from_counts(const MatchingStructure& g,
                                 const CommutativeState& st) {
  require_valid_state(g, st);
  WordState w;
  for (int c = 0; c < g.customer_count(); ++c)
    for (int64_t i = 0; i < st.x[c]; ++i) w.u.push_back(static_cast<uint8_t>(c));
  for (int s = 0; s < g.server_count(); ++s)
    for (int64_t i = 0; i < st.y[s]; ++i) w.v.push_back(static_cast<uint8_t>(s));
  return w;
}

PriorityMatrices PriorityMatrices::validate(const MatchingStructure& g,
                                            std::vector<std::vector<int>> a,
                                            std::vector<std::vector<int>> b) {
  const int nc = g.customer_count();
  const int ns = g.server_count();
  auto shape_ok = [&](const std::vector<std::vector<int>>& m) {
    if (static_cast<int>(m.size()) != nc) return false;
    for (const auto& row : m)
      if (static_cast<int>(row.size()) != ns) return false;
    return true;
  };
  if (!shape_ok(a) || !shape_ok(b))
    throw Error(Errc::BadPriorities, "priority matrices must be |C| x |S|");

  for (int c = 0; c < nc; ++c) {
    int degree = popcount(g.server_neighbors(c));
    std::vector<char> seen(degree + 1, 0);
    for (int s = 0; s < ns; ++s) {
      int value = a[c][s];
      if (!g.has_edge(c, s)) {
        if (value != 0)
          throw Error(Errc::BadPriorities, "A has a value off the matching graph");
      } else if (value < 1 || value > degree || seen[value]) {
        throw Error(Errc::BadPriorities,
                    "row of A is not a bijection onto 1..|S(c)|");
      } else {
        seen[value] = 1;
      }
    }
  }
  for (int s = 0; s < ns; ++s) {
    int degree = popcount(g.customer_neighbors(s));
    std::vector<char> seen(degree + 1, 0);
    for (int c = 0; c < nc; ++c) {
      int value = b[c][s];
      if (!g.has_edge(c, s)) {
        if (value != 0)
          throw Error(Errc::BadPriorities, "B has a value off the matching graph");
      } else if (value < 1 || value > degree || seen[value]) {
        throw Error(Errc::BadPriorities,
                    "column of B is not a bijection onto 1..|C(s)|");
      } else {
        seen[value] = 1;
      }
    }
  }
  return PriorityMatrices{std::move(a), std::move(b)};
}

int FlowPolicyTables::Row::sample(Xoshiro256pp& rng) const {
  int64_t draw = static_cast<int64_t>(rng.below(static_cast<uint64_t>(denominator)));
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), draw);
  return classes[static_cast<size_t>(it - cumulative.begin())];
}

const FlowPolicyTables::PerFacet& FlowPolicyTables::at(uint64_t facet_key) const {
  auto it = tables_.find(facet_key);
  if (it == tables_.end())
    throw Error(Errc::Internal, "no flow table for this facet");
  return it->second;
}

namespace {

void finish_row(FlowPolicyTables::Row& row) {
  Rational::Int denom = 1;
  for (const auto& p : row.probability)
    denom = detail::checked_mul(denom / detail::gcd128(denom, p.den()), p.den());
  if (denom > Rational::Int(INT64_MAX))
    throw Error(Errc::Overflow, "flow table denominator exceeds 64 bits");
  row.denominator = static_cast<int64_t>(denom);
  int64_t acc = 0;
  for (const auto& p : row.probability) {
    acc += static_cast<int64_t>(p.num() * (denom / p.den()));
    row.cumulative.push_back(acc);
  }
  if (acc != row.denominator)
    throw Error(Errc::Internal, "flow table row does not sum to 1");
}

/// Max flow on the network restricted to bullet classes on one side and
/// forced-zero classes on the other, with the forced-zero capacities reduced
/// by eta so no sink arc is saturated. Returns rows plus the per-bullet-class
/// slack.
void build_side(const MatchingStructure& g, const std::vector<Rational>& mu_c,
                const std::vector<Rational>& mu_s, Mask bullet, Mask forced,
                bool server_side, FlowPolicyTables::PerFacet& out) {
  const int nc = g.customer_count();
  const int ns = g.server_count();
  // Node ids: bullet classes first, then forced classes, then source, sink.
  std::vector<int> bullet_classes, forced_classes;
  const int bullet_count = server_side ? nc : ns;
  const int forced_count = server_side ? ns : nc;
  for (int i = 0; i < bullet_count; ++i)
    if ((bullet >> i) & 1u) bullet_classes.push_back(i);
  for (int i = 0; i < forced_count; ++i)
    if ((forced >> i) & 1u) forced_classes.push_back(i);

  const auto& bullet_marginal = server_side ? mu_c : mu_s;
  const auto& forced_marginal = server_side ? mu_s : mu_c;

  Rational total_bullet;
  for (int i : bullet_classes) total_bullet += bullet_marginal[i];

  Rational::Int max_den = 1;
  for (int i : forced_classes)
    max_den = std::max(max_den, forced_marginal[i].den());
  for (int i : bullet_classes)
    max_den = std::max(max_den, bullet_marginal[i].den());
  Rational eta = Rational(1) /
                 (Rational(2 * static_cast<long long>(g.edges().size())) *
                  Rational::from_int128(max_den, 1));

  for (int attempt = 0; attempt < 512; ++attempt, eta = eta / Rational(2)) {
    bool positive = true;
    for (int i : forced_classes)
      if (!(forced_marginal[i] - eta).is_positive()) positive = false;
    if (!positive) continue;

    const int n = static_cast<int>(bullet_classes.size() + forced_classes.size());
    const int source = n, sink = n + 1;
    FlowNetwork<Rational> net(n + 2, source, sink);
    std::vector<int> node_of_bullet(bullet_count, -1), node_of_forced(forced_count, -1);
    for (size_t i = 0; i < bullet_classes.size(); ++i)
      node_of_bullet[bullet_classes[i]] = static_cast<int>(i);
    for (size_t i = 0; i < forced_classes.size(); ++i)
      node_of_forced[forced_classes[i]] = static_cast<int>(bullet_classes.size() + i);

    std::vector<int> source_arcs(bullet_count, -1), sink_arcs(forced_count, -1);
    std::vector<std::vector<int>> edge_arc(bullet_count,
                                           std::vector<int>(forced_count, -1));
    Rational sentinel(nc + ns + 1);
    for (int i : bullet_classes)
      source_arcs[i] = net.add_arc(source, node_of_bullet[i], bullet_marginal[i]);
    for (auto [c, s] : g.edges()) {
      int bi = server_side ? c : s;
      int fi = server_side ? s : c;
      if (((bullet >> bi) & 1u) && ((forced >> fi) & 1u))
        edge_arc[bi][fi] =
            net.add_arc(node_of_bullet[bi], node_of_forced[fi], sentinel);
    }
    for (int i : forced_classes)
      sink_arcs[i] = net.add_arc(node_of_forced[i], sink, forced_marginal[i] - eta);

    if (net.run() != total_bullet) continue;

    // Row for each forced-zero class over its bullet neighbours.
    auto& rows = server_side ? out.server_rows : out.customer_rows;
    auto& slack = server_side ? out.slack_customer : out.slack_server;
    rows.assign(forced_count, {});
    slack.assign(bullet_count, Rational(0));
    for (int f : forced_classes) {
      Mask neighbors = server_side ? g.customer_neighbors(f) : g.server_neighbors(f);
      Mask eligible = neighbors & bullet;
      int share = popcount(eligible);
      if (share == 0)
        throw Error(Errc::Internal, "forced-zero class without bullet neighbour");
      Rational reserve = (forced_marginal[f] - net.flow(sink_arcs[f])) /
                         Rational(share);
      FlowPolicyTables::Row row;
      for (int b2 = 0; b2 < bullet_count; ++b2) {
        if (!((eligible >> b2) & 1u)) continue;
        Rational p = (net.flow(edge_arc[b2][f]) + reserve) / forced_marginal[f];
        row.classes.push_back(b2);
        row.probability.push_back(p);
        slack[b2] += reserve;
      }
      finish_row(row);
      rows[f] = std::move(row);
    }
    return;
  }
  throw Error(Errc::Internal, "eta halving did not converge");
}

}  // namespace

FlowPolicyTables flow_policy_table(const MatchingStructure& g,
                                   const ArrivalMeasure& measure) {
  auto [mu_c, mu_s] = measure.marginals();
  if (!check_ncond(g, mu_c, mu_s))
    throw Error(Errc::NCondViolated,
                "the flow policy needs the strict stability conditions");

  FlowPolicyTables tables;
  for (const Facet& f : enumerate_facets(g)) {
    if (f.is_zero()) continue;
    FlowPolicyTables::PerFacet per;
    build_side(g, mu_c, mu_s, f.bullet_c, f.forced_s, true, per);
    build_side(g, mu_c, mu_s, f.bullet_s, f.forced_c, false, per);
    tables.tables_.emplace(f.key(), std::move(per));
  }
  return tables;
}

PolicySpec PolicySpec::make(
    PolicyKind kind, const StructurePtr& structure, const ArrivalMeasure* measure,
    const std::optional<std::pair<std::vector<std::vector<int>>,
                                  std::vector<std::vector<int>>>>& priorities) {
  PolicySpec spec;
  spec.kind = kind;
  if (kind == PolicyKind::Priority) {
    if (!priorities)
      throw Error(Errc::MissingPriorities,
                  "the priority policy needs matrices A and B");
    spec.priorities = PriorityMatrices::validate(*structure, priorities->first,
                                                 priorities->second);
  }
  if (kind == PolicyKind::Flow) {
    if (!measure)
      throw Error(Errc::BadInput, "the flow policy needs an arrival measure");
    spec.flow_tables = std::make_shared<const FlowPolicyTables>(
        flow_policy_table(*structure, *measure));
  }
  return spec;
}

namespace {

std::vector<int> eligible_customers(const MatchingStructure& g,
                                    const CommutativeState& st, int s) {
  std::vector<int> out;
  for (int c : g.customer_neighbor_list(s))
    if (st.x[c] > 0) out.push_back(c);
  return out;
}

std::vector<int> eligible_servers(const MatchingStructure& g,
                                  const CommutativeState& st, int c) {
  std::vector<int> out;
  for (int s : g.server_neighbor_list(c))
    if (st.y[s] > 0) out.push_back(s);
  return out;
}

Mask support_mask(const std::vector<int64_t>& counts) {
  Mask m = 0;
  for (size_t i = 0; i < counts.size(); ++i)
    if (counts[i] > 0) m |= Mask(1) << i;
  return m;
}

/// Picks the buffered class an arriving item is matched with, among
/// `eligible` (nonempty, ascending class order).
int select_class(const MatchingStructure& g, const PolicySpec& policy,
                 const CommutativeState& st, bool arriving_is_server,
                 int arriving_class, const std::vector<int>& eligible,
                 Xoshiro256pp& rng) {
  if (eligible.empty())
    throw Error(Errc::Internal, "selector invoked with no eligible class");
  if (eligible.size() == 1) return eligible[0];
  const std::vector<int64_t>& counts = arriving_is_server ? st.x : st.y;

  switch (policy.kind) {
    case PolicyKind::Priority: {
      const auto& m = *policy.priorities;
      int best = eligible[0];
      auto rank = [&](int cls) {
        return arriving_is_server ? m.b[cls][arriving_class]
                                  : m.a[arriving_class][cls];
      };
      for (int cls : eligible)
        if (rank(cls) > rank(best)) best = cls;
      return best;
    }
    case PolicyKind::Random: {
      int64_t total = 0;
      for (int cls : eligible) total += counts[cls];
      int64_t draw = static_cast<int64_t>(rng.below(static_cast<uint64_t>(total)));
      for (int cls : eligible) {
        if (draw < counts[cls]) return cls;
        draw -= counts[cls];
      }
      throw Error(Errc::Internal, "random draw out of range");
    }
    case PolicyKind::MatchLongest:
    case PolicyKind::MatchShortest: {
      bool longest = policy.kind == PolicyKind::MatchLongest;
      int64_t best = counts[eligible[0]];
      for (int cls : eligible)
        best = longest ? std::max(best, counts[cls]) : std::min(best, counts[cls]);
      std::vector<int> ties;
      for (int cls : eligible)
        if (counts[cls] == best) ties.push_back(cls);
      return ties[rng.below(ties.size())];
    }
    case PolicyKind::Flow: {
      Facet f = facet_of_state(g, st.x, st.y);
      const auto& per = policy.flow_tables->at(f.key());
      const auto& row = arriving_is_server ? per.server_rows[arriving_class]
                                           : per.customer_rows[arriving_class];
      return row.sample(rng);
    }
    case PolicyKind::Fifo:
    case PolicyKind::Lifo:
      throw Error(Errc::BadInput,
                  "fifo/lifo act on word states, not count states");
  }
  throw Error(Errc::Internal, "unhandled policy kind");
}

/// Exact selector distribution for count-based policies.
std::vector<std::pair<int, Rational>> select_distribution(
    const MatchingStructure& g, const PolicySpec& policy,
    const CommutativeState& st, bool arriving_is_server, int arriving_class,
    const std::vector<int>& eligible) {
  if (eligible.empty())
    throw Error(Errc::Internal, "selector invoked with no eligible class");
  const std::vector<int64_t>& counts = arriving_is_server ? st.x : st.y;
  std::vector<std::pair<int, Rational>> out;

  switch (policy.kind) {
    case PolicyKind::Priority: {
      const auto& m = *policy.priorities;
      int best = eligible[0];
      auto rank = [&](int cls) {
        return arriving_is_server ? m.b[cls][arriving_class]
                                  : m.a[arriving_class][cls];
      };
      for (int cls : eligible)
        if (rank(cls) > rank(best)) best = cls;
      out.emplace_back(best, Rational(1));
      return out;
    }
    case PolicyKind::Random: {
      int64_t total = 0;
      for (int cls : eligible) total += counts[cls];
      for (int cls : eligible)
        out.emplace_back(cls, Rational(counts[cls], total));
      return out;
    }
    case PolicyKind::MatchLongest:
    case PolicyKind::MatchShortest: {
      bool longest = policy.kind == PolicyKind::MatchLongest;
      int64_t best = counts[eligible[0]];
      for (int cls : eligible)
        best = longest ? std::max(best, counts[cls]) : std::min(best, counts[cls]);
      std::vector<int> ties;
      for (int cls : eligible)
        if (counts[cls] == best) ties.push_back(cls);
      for (int cls : ties)
        out.emplace_back(cls, Rational(1, static_cast<long long>(ties.size())));
      return out;
    }
    case PolicyKind::Flow: {
      Facet f = facet_of_state(g, st.x, st.y);
      const auto& per = policy.flow_tables->at(f.key());
      const auto& row = arriving_is_server ? per.server_rows[arriving_class]
                                           : per.customer_rows[arriving_class];
      for (size_t i = 0; i < row.classes.size(); ++i)
        out.emplace_back(row.classes[i], row.probability[i]);
      return out;
    }
    case PolicyKind::Fifo:
    case PolicyKind::Lifo:
      throw Error(Errc::BadInput,
                  "fifo/lifo act on word states, not count states");
  }
  throw Error(Errc::Internal, "unhandled policy kind");
}

void check_arrival(const MatchingStructure& g, int c, int s) {
  if (c < 0 || c >= g.customer_count() || s < 0 || s >= g.server_count())
    throw Error(Errc::BadInput, "arrival pair outside C x S");
}

}  // namespace

StepResult step_commutative(const MatchingStructure& g, const PolicySpec& policy,
                            const CommutativeState& state, int c, int s,
                            Xoshiro256pp& rng) {
  check_arrival(g, c, s);
  auto elig_c = eligible_customers(g, state, s);
  auto elig_s = eligible_servers(g, state, c);

  StepResult r;
  r.state = state;
  if (elig_c.empty() && elig_s.empty()) {
    if (!g.has_edge(c, s)) {
      // stored; the arriving pair cannot be matched at all
      if (state.total() + 1 > kBufferCap)
        throw Error(Errc::BufferOverflow, "buffer cap exceeded");
      r.state.x[c] += 1;
      r.state.y[s] += 1;
    }
    // else matched on arrival, state unchanged
    return r;
  }
  if (!elig_c.empty() && !elig_s.empty()) {
    r.matched_customer = select_class(g, policy, state, true, s, elig_c, rng);
    r.matched_server = select_class(g, policy, state, false, c, elig_s, rng);
    r.state.x[r.matched_customer] -= 1;
    r.state.y[r.matched_server] -= 1;
    return r;
  }
  if (!elig_c.empty()) {
    r.matched_customer = select_class(g, policy, state, true, s, elig_c, rng);
    r.state.x[r.matched_customer] -= 1;
    r.state.x[c] += 1;
    return r;
  }
  r.matched_server = select_class(g, policy, state, false, c, elig_s, rng);
  r.state.y[r.matched_server] -= 1;
  r.state.y[s] += 1;
  return r;
}

std::vector<StepOutcome> step_outcomes(const MatchingStructure& g,
                                       const PolicySpec& policy,
                                       const CommutativeState& state, int c,
                                       int s) {
  check_arrival(g, c, s);
  auto elig_c = eligible_customers(g, state, s);
  auto elig_s = eligible_servers(g, state, c);
  std::vector<StepOutcome> out;

  if (elig_c.empty() && elig_s.empty()) {
    CommutativeState next = state;
    if (!g.has_edge(c, s)) {
      next.x[c] += 1;
      next.y[s] += 1;
    }
    out.push_back({std::move(next), Rational(1)});
    return out;
  }
  if (!elig_c.empty() && !elig_s.empty()) {
    auto dc = select_distribution(g, policy, state, true, s, elig_c);
    auto ds = select_distribution(g, policy, state, false, c, elig_s);
    for (const auto& [cc, pc] : dc)
      for (const auto& [ss, ps] : ds) {
        CommutativeState next = state;
        next.x[cc] -= 1;
        next.y[ss] -= 1;
        out.push_back({std::move(next), pc * ps});
      }
    return out;
  }
  if (!elig_c.empty()) {
    for (const auto& [cc, pc] : select_distribution(g, policy, state, true, s, elig_c)) {
      CommutativeState next = state;
      next.x[cc] -= 1;
      next.x[c] += 1;
      out.push_back({std::move(next), pc});
    }
    return out;
  }
  for (const auto& [ss, ps] : select_distribution(g, policy, state, false, c, elig_s)) {
    CommutativeState next = state;
    next.y[ss] -= 1;
    next.y[s] += 1;
    out.push_back({std::move(next), ps});
  }
  return out;
}

std::vector<CommutativeState> step_any_policy(const MatchingStructure& g,
                                              const CommutativeState& state,
                                              int c, int s) {
  check_arrival(g, c, s);
  auto elig_c = eligible_customers(g, state, s);
  auto elig_s = eligible_servers(g, state, c);
  std::vector<CommutativeState> out;

  if (elig_c.empty() && elig_s.empty()) {
    CommutativeState next = state;
    if (!g.has_edge(c, s)) {
      next.x[c] += 1;
      next.y[s] += 1;
    }
    out.push_back(std::move(next));
  } else if (!elig_c.empty() && !elig_s.empty()) {
    for (int cc : elig_c)
      for (int ss : elig_s) {
        CommutativeState next = state;
        next.x[cc] -= 1;
        next.y[ss] -= 1;
        out.push_back(std::move(next));
      }
  } else if (!elig_c.empty()) {
    for (int cc : elig_c) {
      CommutativeState next = state;
      next.x[cc] -= 1;
      next.x[c] += 1;
      out.push_back(std::move(next));
    }
  } else {
    for (int ss : elig_s) {
      CommutativeState next = state;
      next.y[ss] -= 1;
      next.y[s] += 1;
      out.push_back(std::move(next));
    }
  }
  return out;
}

int step_buffer_delta(const MatchingStructure& g, const CommutativeState& state,
                      int c, int s) {
  check_arrival(g, c, s);
  bool has_c = (g.customer_neighbors(s) & support_mask(state.x)) != 0;
  bool has_s = (g.server_neighbors(c) & support_mask(state.y)) != 0;
  if (!has_c && !has_s) return g.has_edge(c, s) ? 0 : 1;
  if (has_c && has_s) return -1;
  return 0;
}

WordStepResult step_word(const MatchingStructure& g, PolicyKind kind,
                         const WordState& state, int c, int s) {
  if (!is_word_policy(kind))
    throw Error(Errc::BadInput, "word steps are defined for fifo and lifo");
  check_arrival(g, c, s);

  auto find_position = [&](const std::vector<uint8_t>& word, Mask wanted) {
    int found = -1;
    for (size_t k = 0; k < word.size(); ++k) {
      if ((wanted >> word[k]) & 1u) {
        found = static_cast<int>(k);
        if (kind == PolicyKind::Fifo) break;  // oldest
      }
    }
    return found;  // lifo: latest match; -1 if none
  };

  int pos_u = find_position(state.u, g.customer_neighbors(s));
  int pos_v = find_position(state.v, g.server_neighbors(c));

  WordStepResult r;
  r.state = state;
  if (pos_u < 0 && pos_v < 0) {
    if (!g.has_edge(c, s)) {
      if (static_cast<int64_t>(state.u.size()) + 1 > kBufferCap)
        throw Error(Errc::BufferOverflow, "buffer cap exceeded");
      r.state.u.push_back(static_cast<uint8_t>(c));
      r.state.v.push_back(static_cast<uint8_t>(s));
    }
    return r;
  }
  if (pos_u >= 0 && pos_v >= 0) {
    r.matched_customer = state.u[pos_u];
    r.matched_server = state.v[pos_v];
    r.state.u.erase(r.state.u.begin() + pos_u);
    r.state.v.erase(r.state.v.begin() + pos_v);
    return r;
  }
  if (pos_u >= 0) {
    r.matched_customer = state.u[pos_u];
    r.state.u.erase(r.state.u.begin() + pos_u);
    r.state.u.push_back(static_cast<uint8_t>(c));
    return r;
  }
  r.matched_server = state.v[pos_v];
  r.state.v.erase(r.state.v.begin() + pos_v);
  r.state.v.push_back(static_cast<uint8_t>(s));
  return r;
}

int64_t quadratic_lyapunov(const CommutativeState& state) {
  int64_t out = 0;
  for (auto v : state.x) out += v * v;
  for (auto v : state.y) out += v * v;
  return out;
}

}  // namespace matchstab
