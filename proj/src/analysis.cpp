#include "matchstab/analysis.hpp"

#include <algorithm>
#include <set>

#include "matchstab/flow.hpp"

namespace matchstab {
namespace {

// Tarjan strongly connected components, recursive (node counts are tiny).
struct Tarjan {
  const std::vector<std::vector<int>>& graph;
  std::vector<int> index, low, component;
  std::vector<char> on_stack;
  std::vector<int> stack;
  int counter = 0, components = 0;

  explicit Tarjan(const std::vector<std::vector<int>>& g)
      : graph(g),
        index(g.size(), -1),
        low(g.size(), 0),
        component(g.size(), -1),
        on_stack(g.size(), 0) {
    for (size_t v = 0; v < g.size(); ++v)
      if (index[v] < 0) visit(static_cast<int>(v));
  }

  void visit(int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = 1;
    for (int w : graph[v]) {
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      while (true) {
        int w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        component[w] = components;
        if (w == v) break;
      }
      ++components;
    }
  }
};

std::vector<char> reachable_from(const std::vector<std::vector<int>>& graph,
                                 int start) {
  std::vector<char> seen(graph.size(), 0);
  std::vector<int> queue{start};
  seen[start] = 1;
  for (size_t head = 0; head < queue.size(); ++head)
    for (int w : graph[queue[head]])
      if (!seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
  return seen;
}

/// One-dimensional kernel vector of an n x n rational matrix, via Gaussian
/// elimination. Throws if the kernel is not exactly one-dimensional.
std::vector<Rational> kernel_vector(std::vector<std::vector<Rational>> m) {
  const int n = static_cast<int>(m.size());
  std::vector<int> pivot_col_of_row;
  int row = 0;
  for (int col = 0; col < n && row < n; ++col) {
    int pivot = -1;
    for (int r = row; r < n; ++r)
      if (!m[r][col].is_zero()) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(m[row], m[pivot]);
    Rational inv = Rational(1) / m[row][col];
    for (int c2 = col; c2 < n; ++c2) m[row][c2] *= inv;
    for (int r = 0; r < n; ++r) {
      if (r == row || m[r][col].is_zero()) continue;
      Rational factor = m[r][col];
      for (int c2 = col; c2 < n; ++c2) m[r][c2] -= factor * m[row][c2];
    }
    pivot_col_of_row.push_back(col);
    ++row;
  }
  if (row != n - 1)
    throw Error(Errc::Internal, "stationary system does not have a 1-dim kernel");

  std::vector<char> is_pivot(n, 0);
  for (int c : pivot_col_of_row) is_pivot[c] = 1;
  int free_col = -1;
  for (int c = 0; c < n; ++c)
    if (!is_pivot[c]) free_col = c;

  std::vector<Rational> x(n);
  x[free_col] = Rational(1);
  for (int r = 0; r < row; ++r) {
    // row r reads: x[pivot] + sum(coeff * x[free]) = 0
    x[pivot_col_of_row[r]] = -m[r][free_col];
  }
  return x;
}

}  // namespace

std::vector<std::vector<int>> pairing_digraph(const MatchingStructure& g) {
  const int nc = g.customer_count();
  const int ns = g.server_count();
  std::vector<std::vector<int>> out(nc + ns);
  for (auto [c, s] : g.edges()) out[c].push_back(nc + s);
  for (auto [c, s] : g.arrivals()) out[nc + s].push_back(c);
  return out;
}

bool is_stable_structure(const MatchingStructure& g) {
  Tarjan t(pairing_digraph(g));
  return t.components == 1;
}

StableStructureCheck stable_structure_certified(const MatchingStructure& g) {
  auto graph = pairing_digraph(g);
  Tarjan t(graph);
  StableStructureCheck out;
  if (t.components == 1) {
    out.stable = true;
    return out;
  }
  const int nc = g.customer_count();
  // Any failure shows up on a cross pair: if all c->s and s->c paths existed,
  // every pair of nodes would be mutually reachable through the other side.
  for (int c = 0; c < nc; ++c) {
    auto seen = reachable_from(graph, c);
    for (int s = 0; s < g.server_count(); ++s)
      if (!seen[nc + s]) {
        out.witness_customer = c;
        out.witness_server = s;
        out.customer_to_server = true;
        return out;
      }
  }
  for (int s = 0; s < g.server_count(); ++s) {
    auto seen = reachable_from(graph, nc + s);
    for (int c = 0; c < nc; ++c)
      if (!seen[c]) {
        out.witness_customer = c;
        out.witness_server = s;
        out.customer_to_server = false;
        return out;
      }
  }
  throw Error(Errc::Internal, "multiple components but no missing cross path");
}

ArrivalMeasure construct_stable_measure(const StructurePtr& structure) {
  const MatchingStructure& g = *structure;
  if (!is_stable_structure(g))
    throw Error(Errc::NotStronglyConnected,
                "the pairing digraph is not strongly connected");

  const int nc = g.customer_count();
  const int ns = g.server_count();

  // Row-stochastic routing matrices: row c of M_E uniform over S(c), row s of
  // M_F uniform over the arrival neighbours of s.
  std::vector<std::vector<Rational>> m_e(nc, std::vector<Rational>(ns));
  std::vector<std::vector<Rational>> m_f(ns, std::vector<Rational>(nc));
  for (int c = 0; c < nc; ++c) {
    long long degree = popcount(g.server_neighbors(c));
    for (int s = 0; s < ns; ++s)
      if (g.has_edge(c, s)) m_e[c][s] = Rational(1, degree);
  }
  for (int s = 0; s < ns; ++s) {
    long long degree = popcount(g.arrival_customers(s));
    for (int c = 0; c < nc; ++c)
      if (g.has_arrival(c, s)) m_f[s][c] = Rational(1, degree);
  }

  // K = M_E * M_F, then solve x K = x exactly: kernel of (K^T - I).
  std::vector<std::vector<Rational>> kt_minus_i(nc, std::vector<Rational>(nc));
  for (int i = 0; i < nc; ++i)
    for (int j = 0; j < nc; ++j) {
      Rational k_ij;
      for (int s = 0; s < ns; ++s) k_ij += m_e[i][s] * m_f[s][j];
      kt_minus_i[j][i] = k_ij;
      if (i == j) kt_minus_i[j][i] -= Rational(1);
    }

  std::vector<Rational> x = kernel_vector(std::move(kt_minus_i));
  Rational total;
  for (const auto& v : x) total += v;
  if (total.is_zero())
    throw Error(Errc::Internal, "stationary vector sums to zero");
  for (auto& v : x) v /= total;
  for (const auto& v : x)
    if (!v.is_positive())
      throw Error(Errc::Internal, "stationary vector is not strictly positive");

  std::vector<Rational> y(ns);
  for (int s = 0; s < ns; ++s)
    for (int c = 0; c < nc; ++c) y[s] += x[c] * m_e[c][s];

  std::vector<Rational> table(nc * ns);
  for (int s = 0; s < ns; ++s)
    for (int c = 0; c < nc; ++c) table[c * ns + s] = y[s] * m_f[s][c];
  return ArrivalMeasure::validate(structure, std::move(table));
}

Rational linear_drift(const MatchingStructure& g, const ArrivalMeasure& measure,
                      const Facet& facet) {
  if (facet.is_zero())
    throw Error(Errc::ZeroFacet, "the zero facet has no drift");
  auto [mu_c, mu_s] = measure.marginals();
  Rational drift(1);
  for (int c = 0; c < g.customer_count(); ++c)
    if ((facet.forced_c >> c) & 1u) drift -= mu_c[c];
  for (int s = 0; s < g.server_count(); ++s)
    if ((facet.forced_s >> s) & 1u) drift -= mu_s[s];
  for (auto [c, s] : g.edges())
    if (((facet.free_c >> c) & 1u) && ((facet.free_s >> s) & 1u))
      drift -= measure.at(c, s);
  return drift;
}

ScondResult check_scond(const MatchingStructure& g, const ArrivalMeasure& measure) {
  ScondResult out;
  out.holds = true;
  for (const Facet& f : enumerate_facets(g)) {
    if (f.is_zero()) continue;
    DriftReport report;
    report.facet = f;
    report.drift = linear_drift(g, measure, f);
    report.saturated = is_saturated(f);
    report.scond_ok = report.drift.is_negative();
    out.holds = out.holds && report.scond_ok;
    out.reports.push_back(std::move(report));
  }
  return out;
}

namespace {

/// The arrival sequence of one reduction round computed from a single state:
/// either a direct forced-zero x forced-zero arrival, or the arrivals along a
/// digraph path from a forced-zero server to a forced-zero customer whose
/// interior stays in the free classes.
std::vector<std::pair<int, int>> reduction_round(
    const MatchingStructure& g, const ArrivalMeasure& measure,
    const std::vector<std::vector<int>>& digraph, const CommutativeState& st) {
  const int nc = g.customer_count();
  Facet f = facet_of_state(g, st.x, st.y);

  for (int c = 0; c < nc; ++c) {
    if (!((f.forced_c >> c) & 1u)) continue;
    for (int s = 0; s < g.server_count(); ++s)
      if (((f.forced_s >> s) & 1u) && measure.at(c, s).is_positive())
        return {{c, s}};
  }

  // Multi-source BFS from the forced-zero servers towards the forced-zero
  // customers; interior nodes restricted to the free classes. Determinism:
  // sources and neighbours scanned in canonical order.
  std::vector<int> parent(digraph.size(), -1);
  std::vector<char> seen(digraph.size(), 0);
  std::vector<int> queue;
  for (int s = 0; s < g.server_count(); ++s)
    if ((f.forced_s >> s) & 1u) {
      seen[nc + s] = 1;
      queue.push_back(nc + s);
    }
  int goal = -1;
  for (size_t head = 0; head < queue.size() && goal < 0; ++head) {
    int v = queue[head];
    bool interior_ok =
        v >= nc || ((f.free_c >> v) & 1u);  // only free customers extend paths
    if (v < nc && !interior_ok) continue;
    for (int w : digraph[v]) {
      if (seen[w]) continue;
      bool admissible = w < nc ? (((f.free_c >> w) & 1u) ||
                                  ((f.forced_c >> w) & 1u))
                               : ((f.free_s >> (w - nc)) & 1u);
      if (!admissible) continue;
      seen[w] = 1;
      parent[w] = v;
      if (w < nc && ((f.forced_c >> w) & 1u)) {
        goal = w;
        break;
      }
      queue.push_back(w);
    }
  }
  if (goal < 0)
    throw Error(Errc::Internal, "no drain path despite strong connectivity");

  std::vector<std::pair<int, int>> arrivals;
  for (int v = goal; v >= 0; v = parent[parent[v]]) {
    arrivals.push_back({v, parent[v] - nc});  // (customer, server) along F
    if (parent[parent[v]] < 0) break;
  }
  std::reverse(arrivals.begin(), arrivals.end());
  return arrivals;
}

using Belief = std::set<CommutativeState>;

/// Applies one arrival to every member, expanding each into all states an
/// admissible selector could produce. Returns false if the arrival would
/// store a fresh pair (+1) for any member.
bool apply_to_belief(const MatchingStructure& g, Belief& belief, int c, int s) {
  for (const auto& st : belief)
    if (step_buffer_delta(g, st, c, s) > 0) return false;
  Belief next;
  for (const auto& st : belief)
    for (auto& succ : step_any_policy(g, st, c, s)) next.insert(std::move(succ));
  belief = std::move(next);
  return true;
}

}  // namespace

std::vector<std::pair<int, int>> drain_to_empty(const MatchingStructure& g,
                                                const ArrivalMeasure& measure,
                                                const CommutativeState& state) {
  require_valid_state(g, state);
  if (!is_stable_structure(g))
    throw Error(Errc::UnstableStructure,
                "the pairing digraph is not strongly connected");
  {
    auto [mu_c, mu_s] = measure.marginals();
    if (!check_ncond(g, mu_c, mu_s))
      throw Error(Errc::UnstableStructure,
                  "the measure violates the necessary stability conditions");
  }

  auto digraph = pairing_digraph(g);
  std::vector<std::pair<int, int>> sequence;
  Belief belief{state};

  int64_t guard = 1000 + state.total() * 64;
  for (int64_t round = 0; round <= guard; ++round) {
    int64_t max_total = 0;
    for (const auto& st : belief) max_total = std::max(max_total, st.total());
    if (max_total == 0) return sequence;

    // Try the constructive round for each member, fullest first, and commit
    // the first one that never stores a fresh pair for any member.
    std::vector<const CommutativeState*> members;
    for (const auto& st : belief)
      if (!st.is_empty()) members.push_back(&st);
    std::stable_sort(members.begin(), members.end(),
                     [](const CommutativeState* a, const CommutativeState* b) {
                       return a->total() > b->total();
                     });
    bool committed = false;
    for (const CommutativeState* member : members) {
      auto round_arrivals = reduction_round(g, measure, digraph, *member);
      Belief trial = belief;
      bool safe = true;
      for (auto [c, s] : round_arrivals)
        if (!apply_to_belief(g, trial, c, s)) {
          safe = false;
          break;
        }
      if (safe) {
        sequence.insert(sequence.end(), round_arrivals.begin(),
                        round_arrivals.end());
        belief = std::move(trial);
        committed = true;
        break;
      }
    }
    if (!committed)
      throw Error(Errc::Internal, "no admissible reduction round found");
  }
  throw Error(Errc::Internal, "drain did not terminate within its round budget");
}

}  // namespace matchstab
