#include "matchstab/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "matchstab/simulate.hpp"

namespace matchstab {
namespace {

constexpr size_t kStateLimit = 200'000;

struct SparseKernel {
  // rows[i] lists (column, probability)
  std::vector<std::vector<std::pair<int, double>>> rows;
};

/// Power iteration on the time-averaged kernel (I + P)/2, which has the same
/// stationary vectors as P but cannot oscillate on periodic chains.
std::vector<double> stationary_of(const SparseKernel& kernel, int start) {
  const int n = static_cast<int>(kernel.rows.size());
  std::vector<double> pi(n, 0.0), next(n, 0.0);
  pi[start] = 1.0;
  for (int iter = 0; iter < 4'000'000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      if (pi[i] == 0.0) continue;
      next[i] += 0.5 * pi[i];
      for (auto [j, p] : kernel.rows[i]) next[j] += 0.5 * pi[i] * p;
    }
    double mass = 0.0;
    for (double v : next) mass += v;
    for (double& v : next) v /= mass;
    double residual = 0.0;
    for (int i = 0; i < n; ++i) residual += std::fabs(next[i] - pi[i]);
    pi.swap(next);
    if (residual < 5e-13) break;
  }
  // Residual against the undamped kernel.
  std::fill(next.begin(), next.end(), 0.0);
  for (int i = 0; i < n; ++i)
    for (auto [j, p] : kernel.rows[i]) next[j] += pi[i] * p;
  double residual = 0.0;
  for (int i = 0; i < n; ++i) residual += std::fabs(next[i] - pi[i]);
  if (residual > 1e-9)
    throw Error(Errc::Internal, "power iteration did not converge");
  return pi;
}

template <class State, class Expand>
std::pair<std::vector<State>, SparseKernel> build_reachable_kernel(
    const State& start, Expand&& expand) {
  std::map<State, int> index;
  std::vector<State> states{start};
  index.emplace(start, 0);
  SparseKernel kernel;
  for (size_t head = 0; head < states.size(); ++head) {
    State current = states[head];
    kernel.rows.emplace_back();
    auto& row = kernel.rows.back();
    std::map<int, double> merged;
    for (auto& [next, p] : expand(current)) {
      auto [it, fresh] = index.emplace(next, static_cast<int>(states.size()));
      if (fresh) {
        states.push_back(next);
        if (states.size() > kStateLimit)
          throw Error(Errc::StateSpaceTooLarge,
                      "truncated chain exceeds the state limit");
      }
      merged[it->second] += p;
    }
    row.assign(merged.begin(), merged.end());
  }
  return {std::move(states), std::move(kernel)};
}

}  // namespace

std::vector<std::pair<CommutativeState, double>> truncated_stationary(
    const MatchingStructure& g, const ArrivalMeasure& measure,
    const PolicySpec& policy, int64_t cap) {
  if (cap < 1) throw Error(Errc::BadInput, "cap must be at least 1");
  ArrivalSampler sampler(measure);
  const auto& support = sampler.support();

  if (!is_word_policy(policy.kind)) {
    CommutativeState empty = CommutativeState::empty(g);
    auto expand = [&](const CommutativeState& st) {
      std::vector<std::pair<CommutativeState, double>> out;
      for (auto [c, s] : support) {
        double p = measure.at(c, s).to_double();
        for (auto& outcome : step_outcomes(g, policy, st, c, s)) {
          CommutativeState next = std::move(outcome.state);
          if (next.total() > cap) next = empty;  // redirect past the cap
          out.push_back({std::move(next), p * outcome.probability.to_double()});
        }
      }
      return out;
    };
    auto [states, kernel] = build_reachable_kernel(empty, expand);
    auto pi = stationary_of(kernel, 0);
    std::vector<std::pair<CommutativeState, double>> result;
    for (size_t i = 0; i < states.size(); ++i)
      result.push_back({states[i], pi[i]});
    std::sort(result.begin(), result.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return result;
  }

  // Word policies: deterministic kernel on words, aggregated to count states.
  using Word = std::pair<std::vector<uint8_t>, std::vector<uint8_t>>;
  Word empty_word;
  auto expand = [&](const Word& w) {
    std::vector<std::pair<Word, double>> out;
    WordState ws{w.first, w.second};
    for (auto [c, s] : support) {
      double p = measure.at(c, s).to_double();
      auto r = step_word(g, policy.kind, ws, c, s);
      Word next{std::move(r.state.u), std::move(r.state.v)};
      if (static_cast<int64_t>(next.first.size()) > cap) next = empty_word;
      out.push_back({std::move(next), p});
    }
    return out;
  };
  auto [words, kernel] = build_reachable_kernel(empty_word, expand);
  auto pi = stationary_of(kernel, 0);
  std::map<CommutativeState, double> aggregated;
  for (size_t i = 0; i < words.size(); ++i) {
    WordState ws{words[i].first, words[i].second};
    aggregated[ws.image(g)] += pi[i];
  }
  return {aggregated.begin(), aggregated.end()};
}

std::vector<CommutativeState> reach_set(const MatchingStructure& g,
                                        const ArrivalMeasure& measure,
                                        const PolicySpec& policy, int64_t cap) {
  if (cap < 0) throw Error(Errc::BadInput, "cap must be nonnegative");
  ArrivalSampler sampler(measure);
  const auto& support = sampler.support();

  if (!is_word_policy(policy.kind)) {
    std::set<CommutativeState> seen;
    std::vector<CommutativeState> queue{CommutativeState::empty(g)};
    seen.insert(queue[0]);
    for (size_t head = 0; head < queue.size(); ++head) {
      CommutativeState current = queue[head];
      for (auto [c, s] : support)
        for (auto& outcome : step_outcomes(g, policy, current, c, s)) {
          if (outcome.state.total() > cap) continue;
          if (seen.insert(outcome.state).second) {
            queue.push_back(std::move(outcome.state));
            if (seen.size() > kStateLimit)
              throw Error(Errc::StateSpaceTooLarge, "reach set exceeds the limit");
          }
        }
    }
    return {seen.begin(), seen.end()};
  }

  using Word = std::pair<std::vector<uint8_t>, std::vector<uint8_t>>;
  std::set<Word> seen;
  std::vector<Word> queue{Word{}};
  seen.insert(queue[0]);
  for (size_t head = 0; head < queue.size(); ++head) {
    WordState ws{queue[head].first, queue[head].second};
    for (auto [c, s] : support) {
      auto r = step_word(g, policy.kind, ws, c, s);
      if (static_cast<int64_t>(r.state.u.size()) > cap) continue;
      Word next{std::move(r.state.u), std::move(r.state.v)};
      if (seen.insert(next).second) {
        queue.push_back(std::move(next));
        if (seen.size() > kStateLimit)
          throw Error(Errc::StateSpaceTooLarge, "reach set exceeds the limit");
      }
    }
  }
  std::set<CommutativeState> images;
  for (const auto& w : seen) {
    WordState ws{w.first, w.second};
    images.insert(ws.image(g));
  }
  return {images.begin(), images.end()};
}

}  // namespace matchstab
