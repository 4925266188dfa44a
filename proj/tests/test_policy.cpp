#include <doctest.h>

#include <set>

#include "matchstab/analysis.hpp"
#include "matchstab/simulate.hpp"
#include "matchstab/fixtures.hpp"
#include "test_support.hpp"

using namespace matchstab;
using namespace matchstab::testing;

namespace {

PolicySpec spec_for(PolicyKind kind, const Model& model) {
  return PolicySpec::make(kind, model.structure,
                          model.measure ? &*model.measure : nullptr,
                          model.priorities);
}

const std::vector<PolicyKind> kCountPolicies{
    PolicyKind::Priority, PolicyKind::Random, PolicyKind::MatchLongest,
    PolicyKind::MatchShortest, PolicyKind::Flow};

}  // namespace

TEST_CASE("policy names round-trip") {
  for (const char* name : {"fifo", "lifo", "pr", "random", "ml", "ms", "flow"})
    CHECK(policy_name(parse_policy(name)) == name);
  CHECK_THROWS_AS(parse_policy("nope"), Error);
}

TEST_CASE("count step follows the five cases") {
  auto model = nn_model();
  const auto& g = *model.structure;
  Xoshiro256pp rng(1);
  PolicySpec ml = spec_for(PolicyKind::MatchLongest, model);

  // double match: both arrivals take buffered partners
  CommutativeState deep{{0, 0, 2}, {0, 0, 2}};
  auto r = step_commutative(g, ml, deep, 0, 0, rng);
  CHECK(r.state == CommutativeState{{0, 0, 1}, {0, 0, 1}});
  CHECK(r.matched_customer == 2);
  CHECK(r.matched_server == 2);

  // stored: (1,1') is not an edge
  CommutativeState empty = CommutativeState::empty(g);
  auto stored = step_commutative(g, ml, empty, 0, 0, rng);
  CHECK(stored.state == CommutativeState{{1, 0, 0}, {1, 0, 0}});

  // matched on arrival: (1,2') is an edge
  auto matched = step_commutative(g, ml, empty, 0, 1, rng);
  CHECK(matched.state == empty);

  // ms picks the smallest positive count, ml the largest
  CommutativeState skew{{0, 2, 1}, {0, 0, 3}};
  PolicySpec ms = spec_for(PolicyKind::MatchShortest, model);
  auto picked_ms = step_commutative(g, ms, skew, 0, 0, rng);
  CHECK(picked_ms.matched_customer == 2);
  auto picked_ml = step_commutative(g, ml, skew, 0, 0, rng);
  CHECK(picked_ml.matched_customer == 1);
}

TEST_CASE("word step matches the fifo/lifo definitions") {
  auto g = nn_structure();

  WordState w;
  w.u = {1, 2};  // "23"
  w.v = {2, 2};  // "3'3'"
  auto fifo = step_word(*g, PolicyKind::Fifo, w, 0, 0);  // arrival (1,1')
  CHECK(fifo.state.u == std::vector<uint8_t>{2});
  CHECK(fifo.state.v == std::vector<uint8_t>{2});
  CHECK(fifo.matched_customer == 1);  // oldest of C(1') = {2,3}

  auto lifo = step_word(*g, PolicyKind::Lifo, w, 0, 0);
  CHECK(lifo.state.u == std::vector<uint8_t>{1});
  CHECK(lifo.matched_customer == 2);  // youngest eligible

  WordState empty;
  auto stored = step_word(*g, PolicyKind::Fifo, empty, 2, 2);  // (3,3') not in E
  CHECK(stored.state.u == std::vector<uint8_t>{2});
  CHECK(stored.state.v == std::vector<uint8_t>{2});

  CHECK_THROWS_AS(step_word(*g, PolicyKind::MatchLongest, empty, 0, 0), Error);
}

TEST_CASE("priority selection reproduces the arrival table") {
  auto model = nn_priority_model();
  const auto& g = *model.structure;
  PolicySpec pr = spec_for(PolicyKind::Priority, model);
  Xoshiro256pp rng(3);

  // state: x2 > 0, x3 > 0, y3' > 0 (facet ({2,3},{3'}))
  CommutativeState st{{0, 2, 1}, {0, 0, 3}};
  struct Row { int c, s, delta_x2; };
  // arrivals affecting the middle class, with their expected change of x2
  std::vector<Row> table{{0, 0, -1}, {0, 1, -1}, {1, 0, 0}, {1, 1, 0},
                         {1, 2, +1}, {2, 1, -1}, {2, 0, -1}};
  for (const auto& row : table) {
    auto r = step_commutative(g, pr, st, row.c, row.s, rng);
    CHECK(r.state.x[1] - st.x[1] == row.delta_x2);
  }
  // spot-check the selected matchings of the first two rows
  auto first = step_commutative(g, pr, st, 0, 0, rng);
  CHECK(first.matched_customer == 1);  // (2,1') preferred over (3,1')
  CHECK(first.matched_server == 2);    // customer 1 takes the buffered 3'
  auto second = step_commutative(g, pr, st, 0, 1, rng);
  CHECK(second.matched_customer == 1);  // buffer-first: (2,2') not (1,2')
}

TEST_CASE("priority matrices are validated") {
  auto g = nn_structure();
  CHECK_NOTHROW(PriorityMatrices::validate(*g, nn_default_priority_a(),
                                           nn_default_priority_b()));
  auto bad = nn_default_priority_a();
  bad[0][0] = 3;  // off the matching graph
  CHECK_THROWS_AS(PriorityMatrices::validate(*g, bad, nn_default_priority_b()),
                  Error);
  auto bad2 = nn_default_priority_a();
  bad2[0][1] = 1;  // row {1,1} is not a bijection
  CHECK_THROWS_AS(PriorityMatrices::validate(*g, bad2, nn_default_priority_b()),
                  Error);
  Model no_pr = nn_model();
  no_pr.priorities.reset();
  CHECK_THROWS_AS(spec_for(PolicyKind::Priority, no_pr), Error);
}

TEST_CASE("a million steps preserve state validity under every policy") {
  for (auto base : {nn_model(), nnn_model()}) {
    const auto& g = *base.structure;
    ArrivalSampler sampler(*base.measure);
    for (PolicyKind kind : kCountPolicies) {
      PolicySpec policy = spec_for(kind, base);
      Xoshiro256pp rng(99);
      CommutativeState st = CommutativeState::empty(g);
      for (int i = 0; i < 1'000'000; ++i) {
        auto [c, s] = sampler.draw(rng);
        st = step_commutative(g, policy, st, c, s, rng).state;
        if ((i & 63) == 0) require_valid_state(g, st);
      }
      CHECK_NOTHROW(require_valid_state(g, st));
    }
    for (PolicyKind kind : {PolicyKind::Fifo, PolicyKind::Lifo}) {
      Xoshiro256pp rng(100);
      WordState w;
      for (int i = 0; i < 1'000'000; ++i) {
        auto [c, s] = sampler.draw(rng);
        w = step_word(g, kind, w, c, s).state;
        if ((i & 63) == 0) require_valid_state(g, w.image(g));
      }
      CHECK(w.u.size() == w.v.size());
      CHECK_NOTHROW(require_valid_state(g, w.image(g)));
    }
  }
}

TEST_CASE("word steps project to admissible count steps") {
  auto model = nn_model();
  const auto& g = *model.structure;
  ArrivalSampler sampler(*model.measure);
  for (PolicyKind kind : {PolicyKind::Fifo, PolicyKind::Lifo}) {
    Xoshiro256pp rng(7);
    WordState w;
    for (int i = 0; i < 30'000; ++i) {
      auto [c, s] = sampler.draw(rng);
      CommutativeState before = w.image(g);
      auto r = step_word(g, kind, w, c, s);
      CommutativeState after = r.state.image(g);
      // the projected step must be one of the admissible count steps
      auto options = step_any_policy(g, before, c, s);
      bool found = false;
      for (const auto& opt : options) found = found || opt == after;
      REQUIRE(found);
      w = std::move(r.state);
    }
  }
}

TEST_CASE("match-the-longest minimizes the lyapunov drop of the removals") {
  // Comparing the buffer after removals only (the stored arrival is common to
  // every choice): the ML pick always achieves the minimum. The full
  // next-state value can be beaten by an adversary only in the tie corner
  // where the arriving class itself sits in the argmax set.
  auto model = nn_model();
  const auto& g = *model.structure;
  PolicySpec ml = spec_for(PolicyKind::MatchLongest, model);
  ArrivalSampler sampler(*model.measure);
  Xoshiro256pp rng(8);
  CommutativeState st = CommutativeState::empty(g);
  for (int i = 0; i < 40'000; ++i) {
    auto [c, s] = sampler.draw(rng);
    auto removal_value = [&](int cc, int ss) {
      CommutativeState t = st;
      if (cc >= 0) t.x[cc] -= 1;
      if (ss >= 0) t.y[ss] -= 1;
      return quadratic_lyapunov(t);
    };
    std::vector<int> elig_c, elig_s;
    for (int k : g.customer_neighbor_list(s))
      if (st.x[k] > 0) elig_c.push_back(k);
    for (int k : g.server_neighbor_list(c))
      if (st.y[k] > 0) elig_s.push_back(k);
    auto r = step_commutative(g, ml, st, c, s, rng);
    if (!elig_c.empty() || !elig_s.empty()) {
      int64_t best = INT64_MAX;
      for (int cc : elig_c.empty() ? std::vector<int>{-1} : elig_c)
        for (int ss : elig_s.empty() ? std::vector<int>{-1} : elig_s)
          best = std::min(best, removal_value(cc, ss));
      REQUIRE(removal_value(r.matched_customer, r.matched_server) == best);
    }
    st = r.state;
  }
}

TEST_CASE("buffer-first: a matchable arriving pair never self-matches") {
  auto model = nn_model();
  const auto& g = *model.structure;
  ArrivalSampler sampler(*model.measure);
  for (PolicyKind kind : kCountPolicies) {
    PolicySpec policy = spec_for(kind, model);
    Xoshiro256pp rng(11);
    CommutativeState st = CommutativeState::empty(g);
    for (int i = 0; i < 40'000; ++i) {
      auto [c, s] = sampler.draw(rng);
      bool buffered_partner =
          (g.customer_neighbors(s) &
           [&] { Mask m = 0; for (int k = 0; k < 3; ++k) if (st.x[k] > 0) m |= Mask(1) << k; return m; }()) != 0 ||
          (g.server_neighbors(c) &
           [&] { Mask m = 0; for (int k = 0; k < 3; ++k) if (st.y[k] > 0) m |= Mask(1) << k; return m; }()) != 0;
      auto r = step_commutative(g, policy, st, c, s, rng);
      if (g.has_edge(c, s) && buffered_partner) {
        // the pair departed with buffered partners or one side was stored:
        // never the unchanged state that an arrival self-match would leave
        CHECK(r.state.total() <= st.total());
        CHECK(!(r.state == st && r.matched_customer < 0 && r.matched_server < 0));
      }
      st = r.state;
    }
  }
}

TEST_CASE("quadratic lyapunov values") {
  CHECK(quadratic_lyapunov({{0, 0, 2}, {0, 0, 2}}) == 8);
  CHECK(quadratic_lyapunov({{0, 0, 0}, {0, 0, 0}}) == 0);
  CHECK(quadratic_lyapunov({{1, 2, 0}, {0, 0, 3}}) == 14);
}

TEST_CASE("flow tables: singleton rows, stochastic rows, positive slack") {
  auto model = nn_model();
  const auto& g = *model.structure;
  auto tables = flow_policy_table(g, *model.measure);

  // facet ({3},{3'}): both sides have singleton eligible sets
  Facet f = classify_facet(g, Mask(1) << 2, Mask(1) << 2);
  const auto& per = tables.at(f.key());
  REQUIRE(per.server_rows[0].classes == std::vector<int>{2});   // row of 1'
  CHECK(per.server_rows[0].probability[0] == Rational(1));
  REQUIRE(per.customer_rows[0].classes == std::vector<int>{2}); // row of 1
  CHECK(per.customer_rows[0].probability[0] == Rational(1));

  for (const auto& [key, entry] : tables.all()) {
    (void)key;
    for (const auto& rows : {entry.server_rows, entry.customer_rows})
      for (const auto& row : rows) {
        if (row.classes.empty()) continue;
        Rational total;
        for (const auto& p : row.probability) {
          CHECK(p.is_positive());
          CHECK(p <= Rational(1));
          total += p;
        }
        CHECK(total == Rational(1));
      }
    for (const auto& slack : {entry.slack_customer, entry.slack_server})
      for (const auto& eps : slack)
        CHECK(!eps.is_negative());
  }

  // the per-bullet-class slack is strictly positive and matches the
  // stochastic-row identity sum_s mu_S(s) P(s,c) = mu_C(c) + eps_c
  auto [mu_c, mu_s] = model.measure->marginals();
  for (const auto& [key, entry] : tables.all()) {
    Facet facet;
    Mask bullet_c = static_cast<Mask>(key >> 32);
    for (int c = 0; c < g.customer_count(); ++c) {
      if (!((bullet_c >> c) & 1u)) continue;
      CHECK(entry.slack_customer[c].is_positive());
      Rational weighted;
      for (int s = 0; s < g.server_count(); ++s) {
        const auto& row = entry.server_rows[s];
        for (size_t i = 0; i < row.classes.size(); ++i)
          if (row.classes[i] == c) weighted += mu_s[s] * row.probability[i];
      }
      CHECK(weighted == mu_c[c] + entry.slack_customer[c]);
    }
  }

  // an infeasible measure is rejected
  auto anti = nn_fanti_model();
  CHECK_THROWS_AS(flow_policy_table(*anti.structure, *anti.measure), Error);
}
