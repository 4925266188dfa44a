#include "matchstab/flow.hpp"

#include <numeric>

namespace matchstab {
namespace {

Rational sum_over(const std::vector<Rational>& values, Mask subset) {
  Rational out;
  for (size_t i = 0; i < values.size(); ++i)
    if ((subset >> i) & 1u) out += values[i];
  return out;
}

void require_marginal(const MatchingStructure& g,
                      const std::vector<Rational>& mu_c,
                      const std::vector<Rational>& mu_s) {
  if (static_cast<int>(mu_c.size()) != g.customer_count() ||
      static_cast<int>(mu_s.size()) != g.server_count())
    throw Error(Errc::BadInput, "marginal vector has the wrong length");
}

}  // namespace

BuiltNetwork build_flow_network(const MatchingStructure& g,
                                const std::vector<Rational>& mu_c,
                                const std::vector<Rational>& mu_s,
                                bool eta_perturbed) {
  const int nc = g.customer_count();
  const int ns = g.server_count();
  const int source = nc + ns;
  const int sink = nc + ns + 1;
  BuiltNetwork built{FlowNetwork<EtaValue>(nc + ns + 2, source, sink), {}, {}, {}};

  // Finite stand-in for unbounded matching-arc capacity: the total flow can
  // never exceed 1 plus eta terms, so |C|+|S|+1 is never binding.
  EtaValue sentinel{Rational(nc + ns + 1), Rational(0)};

  for (int c = 0; c < nc; ++c) {
    Rational coeff = eta_perturbed
                         ? Rational(-popcount(g.server_neighbors(c)))
                         : Rational(0);
    built.source_arcs.push_back(
        built.net.add_arc(source, c, EtaValue{mu_c[c], coeff}));
  }
  for (auto [c, s] : g.edges())
    built.edge_arcs.push_back(built.net.add_arc(c, nc + s, sentinel));
  for (int s = 0; s < ns; ++s) {
    Rational coeff = eta_perturbed
                         ? Rational(-popcount(g.customer_neighbors(s)))
                         : Rational(0);
    built.sink_arcs.push_back(
        built.net.add_arc(nc + s, sink, EtaValue{mu_s[s], coeff}));
  }
  return built;
}

bool check_ncond_leq(const MatchingStructure& g,
                     const std::vector<Rational>& mu_c,
                     const std::vector<Rational>& mu_s) {
  require_marginal(g, mu_c, mu_s);
  auto built = build_flow_network(g, mu_c, mu_s, false);
  return built.net.run() == EtaValue{Rational(1), Rational(0)};
}

NcondCheck check_ncond_certified(const MatchingStructure& g,
                                 const std::vector<Rational>& mu_c,
                                 const std::vector<Rational>& mu_s) {
  require_marginal(g, mu_c, mu_s);
  auto built = build_flow_network(g, mu_c, mu_s, true);
  EtaValue value = built.net.run();
  EtaValue target{Rational(1),
                  Rational(-static_cast<long long>(g.edges().size()))};
  if (value == target) return {true, std::nullopt};

  // The customers still reachable in the residual graph form a violating
  // subset: the min cut severs (source, c) exactly on the unreachable ones.
  auto side = built.net.source_side();
  Mask u = 0;
  for (int c = 0; c < g.customer_count(); ++c)
    if (side[c]) u |= Mask(1) << c;
  NcondCertificate cert;
  cert.subset = u;
  cert.lhs = sum_over(mu_c, u);
  cert.rhs = sum_over(mu_s, g.neighbors_of_customers(u));
  if (cert.lhs < cert.rhs)
    throw Error(Errc::Internal, "min cut produced a non-violating subset");
  return {false, cert};
}

bool check_ncond(const MatchingStructure& g, const std::vector<Rational>& mu_c,
                 const std::vector<Rational>& mu_s) {
  return check_ncond_certified(g, mu_c, mu_s).holds;
}

bool ncond_bruteforce(const MatchingStructure& g,
                      const std::vector<Rational>& mu_c,
                      const std::vector<Rational>& mu_s) {
  require_marginal(g, mu_c, mu_s);
  const int nc = g.customer_count();
  const int ns = g.server_count();
  if (nc + ns > 24)
    throw Error(Errc::TooLarge, "brute-force check limited to 24 classes");
  for (Mask u = 1; u + 1 < (Mask(1) << nc); ++u) {
    if (!(sum_over(mu_c, u) < sum_over(mu_s, g.neighbors_of_customers(u))))
      return false;
  }
  for (Mask v = 1; v + 1 < (Mask(1) << ns); ++v) {
    if (!(sum_over(mu_s, v) < sum_over(mu_c, g.neighbors_of_servers(v))))
      return false;
  }
  return true;
}

PositiveFlow positive_flow(const MatchingStructure& g,
                           const std::vector<Rational>& mu_c,
                           const std::vector<Rational>& mu_s) {
  require_marginal(g, mu_c, mu_s);
  if (!check_ncond(g, mu_c, mu_s))
    throw Error(Errc::NCondViolated,
                "positive flow exists only under the strict conditions");

  const int nc = g.customer_count();
  const int ns = g.server_count();
  const auto& edges = g.edges();
  const long long edge_count = static_cast<long long>(edges.size());

  Rational::Int max_den = 1;
  for (const auto& p : mu_c) max_den = std::max(max_den, p.den());
  for (const auto& p : mu_s) max_den = std::max(max_den, p.den());
  Rational eta = Rational(1) / (Rational(2 * edge_count) *
                                Rational::from_int128(max_den, 1));

  for (int attempt = 0; attempt < 512; ++attempt, eta = eta / Rational(2)) {
    std::vector<Rational> tilde_c(nc), tilde_s(ns);
    bool positive = true;
    for (int c = 0; c < nc && positive; ++c) {
      tilde_c[c] = mu_c[c] - Rational(popcount(g.server_neighbors(c))) * eta;
      positive = tilde_c[c].is_positive();
    }
    for (int s = 0; s < ns && positive; ++s) {
      tilde_s[s] = mu_s[s] - Rational(popcount(g.customer_neighbors(s))) * eta;
      positive = tilde_s[s].is_positive();
    }
    if (!positive) continue;

    const int source = nc + ns, sink = nc + ns + 1;
    FlowNetwork<Rational> net(nc + ns + 2, source, sink);
    std::vector<int> source_arcs, sink_arcs, edge_arcs;
    Rational sentinel(nc + ns + 1);
    for (int c = 0; c < nc; ++c)
      source_arcs.push_back(net.add_arc(source, c, tilde_c[c]));
    for (auto [c, s] : edges) edge_arcs.push_back(net.add_arc(c, nc + s, sentinel));
    for (int s = 0; s < ns; ++s)
      sink_arcs.push_back(net.add_arc(nc + s, sink, tilde_s[s]));

    Rational value = net.run();
    Rational target = Rational(1) - Rational(edge_count) * eta;
    if (value != target) continue;

    // Superpose the uniform flow of eta per matching edge.
    PositiveFlow out;
    out.eta = eta;
    out.edge_flow.resize(edges.size());
    out.source_flow.resize(nc);
    out.sink_flow.resize(ns);
    for (size_t i = 0; i < edges.size(); ++i)
      out.edge_flow[i] = net.flow(edge_arcs[i]) + eta;
    for (int c = 0; c < nc; ++c)
      out.source_flow[c] = net.flow(source_arcs[c]) +
                           Rational(popcount(g.server_neighbors(c))) * eta;
    for (int s = 0; s < ns; ++s)
      out.sink_flow[s] = net.flow(sink_arcs[s]) +
                         Rational(popcount(g.customer_neighbors(s))) * eta;
    return out;
  }
  throw Error(Errc::Internal, "eta halving did not converge");
}

MatchingResult perfect_matching(const MatchingStructure& g,
                                std::span<const int64_t> x,
                                std::span<const int64_t> y) {
  const int nc = g.customer_count();
  const int ns = g.server_count();
  if (static_cast<int>(x.size()) != nc || static_cast<int>(y.size()) != ns)
    throw Error(Errc::BadInput, "count vector has the wrong length");
  long long total_x = 0, total_y = 0;
  for (auto v : x) {
    if (v < 0) throw Error(Errc::BadInput, "negative count");
    total_x += v;
  }
  for (auto v : y) {
    if (v < 0) throw Error(Errc::BadInput, "negative count");
    total_y += v;
  }
  if (total_x != total_y)
    throw Error(Errc::UnequalTotals, "batches have different sizes");

  const int source = nc + ns, sink = nc + ns + 1;
  FlowNetwork<long long> net(nc + ns + 2, source, sink);
  std::vector<int> edge_arcs;
  for (int c = 0; c < nc; ++c) net.add_arc(source, c, x[c]);
  for (auto [c, s] : g.edges())
    edge_arcs.push_back(net.add_arc(c, nc + s, total_x));
  for (int s = 0; s < ns; ++s) net.add_arc(nc + s, sink, y[s]);

  MatchingResult out;
  long long value = net.run();
  if (value == total_x) {
    out.exists = true;
    out.edge_count.resize(g.edges().size());
    for (size_t i = 0; i < g.edges().size(); ++i)
      out.edge_count[i] = net.flow(edge_arcs[i]);
    return out;
  }
  auto side = net.source_side();
  for (int c = 0; c < nc; ++c)
    if (side[c]) out.violating_customers |= Mask(1) << c;
  return out;
}

}  // namespace matchstab
