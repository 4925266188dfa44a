#include "matchstab/facet.hpp"

#include <algorithm>
#include <set>

#include "matchstab/error.hpp"

namespace matchstab {

Facet classify_facet(const MatchingStructure& g, Mask u, Mask v) {
  if ((u & ~g.all_customers()) || (v & ~g.all_servers()))
    throw Error(Errc::UnknownClass, "facet subset outside the class sets");
  if ((u == 0) != (v == 0))
    throw Error(Errc::MixedEmptiness,
                "bullet sets must be empty together or nonempty together");
  if ((g.neighbors_of_customers(u) & v) != 0)
    throw Error(Errc::NotAFacet, "bullet pair contains a matching edge");

  Facet f;
  f.bullet_c = u;
  f.bullet_s = v;
  f.forced_c = g.neighbors_of_servers(v);
  f.forced_s = g.neighbors_of_customers(u);
  f.free_c = g.all_customers() & ~(f.bullet_c | f.forced_c);
  f.free_s = g.all_servers() & ~(f.bullet_s | f.forced_s);
  return f;
}

bool is_saturated(const Facet& f) { return f.free_c == 0 || f.free_s == 0; }

std::vector<Facet> enumerate_facets(const MatchingStructure& g) {
  if (g.customer_count() > 20 || g.server_count() > 20)
    throw Error(Errc::TooLarge, "facet enumeration is limited to 20 classes per side");

  using Pair = std::pair<Mask, Mask>;
  std::set<Pair> facets;
  std::set<Pair> fresh;
  for (int c = 0; c < g.customer_count(); ++c)
    for (int s = 0; s < g.server_count(); ++s)
      if (!g.has_edge(c, s)) fresh.insert({Mask(1) << c, Mask(1) << s});

  // Merging two facets that agree on one side yields a facet again, and every
  // facet arises this way from the single-class ones.
  while (!fresh.empty()) {
    facets.insert(fresh.begin(), fresh.end());
    std::vector<Pair> old(fresh.begin(), fresh.end());
    fresh.clear();
    for (size_t i = 0; i < old.size(); ++i)
      for (size_t j = i + 1; j < old.size(); ++j) {
        if (old[i].first == old[j].first || old[i].second == old[j].second)
          fresh.insert({old[i].first | old[j].first,
                        old[i].second | old[j].second});
      }
  }
  facets.insert({0, 0});

  std::vector<Facet> out;
  out.reserve(facets.size());
  for (const auto& [u, v] : facets) out.push_back(classify_facet(g, u, v));
  std::sort(out.begin(), out.end(), [](const Facet& a, const Facet& b) {
    return a.key() < b.key();
  });
  return out;
}

Facet facet_of_state(const MatchingStructure& g, std::span<const int64_t> x,
                     std::span<const int64_t> y) {
  if (static_cast<int>(x.size()) != g.customer_count() ||
      static_cast<int>(y.size()) != g.server_count())
    throw Error(Errc::InvalidState, "count vector has the wrong length");
  int64_t total_x = 0, total_y = 0;
  Mask u = 0, v = 0;
  for (int c = 0; c < g.customer_count(); ++c) {
    if (x[c] < 0) throw Error(Errc::InvalidState, "negative count");
    total_x += x[c];
    if (x[c] > 0) u |= Mask(1) << c;
  }
  for (int s = 0; s < g.server_count(); ++s) {
    if (y[s] < 0) throw Error(Errc::InvalidState, "negative count");
    total_y += y[s];
    if (y[s] > 0) v |= Mask(1) << s;
  }
  if (total_x != total_y)
    throw Error(Errc::InvalidState, "customer and server totals differ");
  if ((g.neighbors_of_customers(u) & v) != 0)
    throw Error(Errc::InvalidState,
                "buffered customers and servers contain a matchable pair");
  return classify_facet(g, u, v);
}

}  // namespace matchstab
