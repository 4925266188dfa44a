#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "matchstab/facet.hpp"
#include "matchstab/model.hpp"
#include "matchstab/rng.hpp"

namespace matchstab {

enum class PolicyKind {
  Fifo,          // match the oldest buffered partner (word state)
  Lifo,          // match the youngest buffered partner (word state)
  Priority,      // fixed priority matrices
  Random,        // partner class drawn proportionally to buffered counts
  MatchLongest,  // largest buffered count, ties uniform
  MatchShortest, // smallest positive buffered count, ties uniform
  Flow,          // facet-dependent randomization from a max-flow solution
};

PolicyKind parse_policy(const std::string& name);  // fifo,lifo,pr,random,ml,ms,flow
std::string policy_name(PolicyKind kind);
bool is_word_policy(PolicyKind kind);

/// Buffered counts per class. Valid states have equal totals and no
/// matchable buffered pair.
struct CommutativeState {
  std::vector<int64_t> x, y;

  static CommutativeState empty(const MatchingStructure& g) {
    return {std::vector<int64_t>(g.customer_count(), 0),
            std::vector<int64_t>(g.server_count(), 0)};
  }
  int64_t total() const {
    int64_t t = 0;
    for (auto v : x) t += v;
    return t;
  }
  bool is_empty() const { return total() == 0; }
  bool operator==(const CommutativeState& o) const { return x == o.x && y == o.y; }
  bool operator<(const CommutativeState& o) const {
    return x != o.x ? x < o.x : y < o.y;
  }
};

void require_valid_state(const MatchingStructure& g, const CommutativeState& st);

/// Buffered items in arrival order, oldest first; entries are class indices.
struct WordState {
  std::vector<uint8_t> u, v;

  bool is_empty() const { return u.empty(); }
  CommutativeState image(const MatchingStructure& g) const;
  /// Canonical word for a count state: classes in canonical order, each
  /// repeated its count.
  static WordState from_counts(const MatchingStructure& g,
                               const CommutativeState& st);
};

constexpr int64_t kBufferCap = 1'000'000;

/// Priority matrices: A[c][s] ranks servers for an arriving customer c,
/// B[c][s] ranks customers for an arriving server s. Row c of A must be a
/// bijection from S(c) onto 1..|S(c)| (zero off the matching graph); column s
/// of B the same for C(s).
struct PriorityMatrices {
  std::vector<std::vector<int>> a, b;

  static PriorityMatrices validate(const MatchingStructure& g,
                                   std::vector<std::vector<int>> a,
                                   std::vector<std::vector<int>> b);
};

/// Facet-dependent matching probabilities built from max flows on the
/// networks restricted to the bullet classes of one side and the forced-zero
/// classes of the other. For each nonzero facet and each forced-zero server
/// class s, row(s) is a distribution over the bullet customer classes of
/// C(s); symmetrically for forced-zero customers.
class FlowPolicyTables {
 public:
  struct Row {
    std::vector<int> classes;          // ascending
    std::vector<Rational> probability; // strictly positive, sums to 1
    // cumulative integer thresholds over a common denominator, for sampling
    std::vector<int64_t> cumulative;
    int64_t denominator = 0;

    int sample(Xoshiro256pp& rng) const;
  };

  struct PerFacet {
    std::vector<Row> server_rows;    // indexed by server class (empty if unused)
    std::vector<Row> customer_rows;  // indexed by customer class
    std::vector<Rational> slack_customer;  // eps_c per bullet customer
    std::vector<Rational> slack_server;    // eps_s per bullet server
  };

  const PerFacet& at(uint64_t facet_key) const;
  bool contains(uint64_t facet_key) const {
    return tables_.count(facet_key) != 0;
  }
  const std::unordered_map<uint64_t, PerFacet>& all() const { return tables_; }

  friend FlowPolicyTables flow_policy_table(const MatchingStructure& g,
                                            const ArrivalMeasure& measure);

 private:
  std::unordered_map<uint64_t, PerFacet> tables_;
};

FlowPolicyTables flow_policy_table(const MatchingStructure& g,
                                   const ArrivalMeasure& measure);

/// A fully resolved policy: kind plus whatever state it needs.
struct PolicySpec {
  PolicyKind kind = PolicyKind::Random;
  std::optional<PriorityMatrices> priorities;
  std::shared_ptr<const FlowPolicyTables> flow_tables;

  /// Validates priorities for Priority and builds the per-facet tables for
  /// Flow (which needs the measure and the strict stability conditions).
  static PolicySpec make(PolicyKind kind, const StructurePtr& structure,
                         const ArrivalMeasure* measure,
                         const std::optional<std::pair<std::vector<std::vector<int>>,
                                                       std::vector<std::vector<int>>>>&
                             priorities);
};

/// One transition of the buffer chain. `matched_customer` is the buffered
/// customer class taken by the arriving server (-1 when it was stored or
/// matched on arrival), `matched_server` the buffered server class taken by
/// the arriving customer.
struct StepResult {
  CommutativeState state;
  int matched_customer = -1;
  int matched_server = -1;
};

StepResult step_commutative(const MatchingStructure& g, const PolicySpec& policy,
                            const CommutativeState& state, int c, int s,
                            Xoshiro256pp& rng);

struct WordStepResult {
  WordState state;
  int matched_customer = -1;
  int matched_server = -1;
};

WordStepResult step_word(const MatchingStructure& g, PolicyKind kind,
                         const WordState& state, int c, int s);

/// Exact one-step distribution for count-based policies (everything except
/// fifo/lifo). Outcomes carry positive rational probabilities summing to 1.
struct StepOutcome {
  CommutativeState state;
  Rational probability;
};

std::vector<StepOutcome> step_outcomes(const MatchingStructure& g,
                                       const PolicySpec& policy,
                                       const CommutativeState& state, int c,
                                       int s);

/// All states reachable in one step under *some* admissible policy, i.e. the
/// transition relation with the selector left free.
std::vector<CommutativeState> step_any_policy(const MatchingStructure& g,
                                              const CommutativeState& state,
                                              int c, int s);

/// Which of the five transition cases applies: +1 stored pair, 0 matched on
/// arrival, -1 double match, 0 one-sided matches.
int step_buffer_delta(const MatchingStructure& g, const CommutativeState& state,
                      int c, int s);

/// Sum of squared buffered counts.
int64_t quadratic_lyapunov(const CommutativeState& state);

}  // namespace matchstab
