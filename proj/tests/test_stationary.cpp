#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "matchstab/fixtures.hpp"
#include "matchstab/simulate.hpp"
#include "matchstab/stationary.hpp"
#include "test_support.hpp"

using namespace matchstab;
using namespace matchstab::testing;

namespace {

PolicySpec spec_for(PolicyKind kind, const Model& model) {
  return PolicySpec::make(kind, model.structure,
                          model.measure ? &*model.measure : nullptr,
                          model.priorities);
}

}  // namespace

TEST_CASE("point mass on a matching pair keeps the chain at empty") {
  auto tiny = MatchingStructure::validate({"a"}, {"b"}, {{"a", "b"}}, {{"a", "b"}});
  auto m = product_measure(tiny, {Rational(1)}, {Rational(1)});
  PolicySpec policy;
  policy.kind = PolicyKind::MatchLongest;
  auto pi = truncated_stationary(*m.structure_ptr(), m, policy, 5);
  REQUIRE(pi.size() == 1);
  CHECK(pi[0].first.is_empty());
  CHECK(pi[0].second == doctest::Approx(1.0));
}

TEST_CASE("cap one confines the distribution to tiny states") {
  auto model = nn_model();
  PolicySpec policy = spec_for(PolicyKind::MatchLongest, model);
  auto pi = truncated_stationary(*model.structure, *model.measure, policy, 1);
  double mass = 0.0;
  for (const auto& [state, p] : pi) {
    CHECK(state.total() <= 1);
    mass += p;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("truncated stationary law is balanced under the exact kernel") {
  auto model = nn_model();
  for (PolicyKind kind : {PolicyKind::MatchShortest, PolicyKind::Priority,
                          PolicyKind::Random}) {
    PolicySpec policy = spec_for(kind, model);
    const auto& g = *model.structure;
    const auto& measure = *model.measure;
    int64_t cap = 8;
    auto pi = truncated_stationary(g, measure, policy, cap);
    // push the distribution through the kernel once; it must be unchanged
    std::map<CommutativeState, double> next;
    CommutativeState empty = CommutativeState::empty(g);
    for (const auto& [state, p] : pi) {
      if (p == 0.0) continue;
      for (auto [c, s] : g.arrivals()) {
        double arrival = measure.at(c, s).to_double();
        for (const auto& outcome : step_outcomes(g, policy, state, c, s)) {
          CommutativeState target =
              outcome.state.total() > cap ? empty : outcome.state;
          next[target] += p * arrival * outcome.probability.to_double();
        }
      }
    }
    for (const auto& [state, p] : pi) {
      CHECK(std::fabs(next[state] - p) < 1e-9);
      next.erase(state);
    }
    for (const auto& [state, p] : next) CHECK(std::fabs(p) < 1e-12);
  }
}

TEST_CASE("word-policy stationary law aggregates to count states") {
  auto model = nn_model();
  PolicySpec fifo = spec_for(PolicyKind::Fifo, model);
  auto pi = truncated_stationary(*model.structure, *model.measure, fifo, 4);
  double mass = 0.0;
  for (const auto& [state, p] : pi) {
    CHECK(state.total() <= 4);
    mass += p;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("reach set excludes the unreachable facet of the diagonal model") {
  auto model = nn_fdiag_model();
  CommutativeState target{{0, 1, 0}, {0, 0, 1}};
  require_valid_state(*model.structure, target);
  for (PolicyKind kind : {PolicyKind::MatchLongest, PolicyKind::MatchShortest,
                          PolicyKind::Priority, PolicyKind::Random,
                          PolicyKind::Fifo, PolicyKind::Lifo}) {
    PolicySpec policy = spec_for(kind, model);
    auto states = reach_set(*model.structure, *model.measure, policy, 6);
    CHECK(!states.empty());
    bool has_empty = std::any_of(
        states.begin(), states.end(),
        [](const CommutativeState& s) { return s.is_empty(); });
    CHECK(has_empty);
    for (const auto& s : states) CHECK(!(s == target));
  }
}

TEST_CASE("full arrivals make every small state reachable") {
  auto model = nn_model();
  PolicySpec policy = spec_for(PolicyKind::Random, model);
  auto states = reach_set(*model.structure, *model.measure, policy, 3);
  // oracle: every valid state with total <= 3 (enumerate via facets)
  size_t expected = 0;
  for (const Facet& f : enumerate_facets(*model.structure)) {
    int nc = popcount(f.bullet_c), ns = popcount(f.bullet_s);
    if (f.is_zero()) {
      expected += 1;
      continue;
    }
    // compositions of t into nc positive parts times ns positive parts
    for (int t = std::max(nc, ns); t <= 3; ++t) {
      auto comps = [](int total, int parts) {
        // C(total-1, parts-1)
        double out = 1;
        for (int i = 1; i < parts; ++i)
          out = out * (total - i) / i;
        return static_cast<size_t>(out + 0.5);
      };
      expected += comps(t, nc) * comps(t, ns);
    }
  }
  CHECK(states.size() == expected);
}
