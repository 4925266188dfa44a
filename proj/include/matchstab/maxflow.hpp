#pragma once

#include <vector>

#include "matchstab/error.hpp"

namespace matchstab {

/// Edmonds-Karp maximum flow over any exactly ordered value type (integers,
/// Rational, EtaValue). Augmenting paths are found by breadth-first search
/// with arcs scanned in insertion order, so the resulting flow is a
/// deterministic function of the construction sequence.
template <class Value>
class FlowNetwork {
 public:
  FlowNetwork(int nodes, int source, int sink)
      : adj_(nodes), source_(source), sink_(sink) {}

  /// Returns an arc handle usable with flow() after run().
  int add_arc(int from, int to, Value capacity) {
    int id = static_cast<int>(half_.size());
    half_.push_back({to, capacity});
    half_.push_back({from, Value{}});
    adj_[from].push_back(id);
    adj_[to].push_back(id + 1);
    return id;
  }

  Value run() {
    Value total{};
    const int n = static_cast<int>(adj_.size());
    std::vector<int> parent_arc(n);
    while (true) {
      std::fill(parent_arc.begin(), parent_arc.end(), -1);
      parent_arc[source_] = -2;
      std::vector<int> queue{source_};
      for (size_t head = 0; head < queue.size() && parent_arc[sink_] == -1;
           ++head) {
        int v = queue[head];
        for (int id : adj_[v]) {
          const Half& h = half_[id];
          if (parent_arc[h.to] == -1 && Value{} < h.residual) {
            parent_arc[h.to] = id;
            queue.push_back(h.to);
          }
        }
      }
      if (parent_arc[sink_] == -1) break;

      bool have_bottleneck = false;
      Value bottleneck{};
      for (int v = sink_; v != source_;) {
        const Half& h = half_[parent_arc[v]];
        if (!have_bottleneck || h.residual < bottleneck) {
          bottleneck = h.residual;
          have_bottleneck = true;
        }
        v = half_[parent_arc[v] ^ 1].to;
      }
      for (int v = sink_; v != source_;) {
        int id = parent_arc[v];
        half_[id].residual -= bottleneck;
        half_[id ^ 1].residual += bottleneck;
        v = half_[id ^ 1].to;
      }
      total += bottleneck;
    }
    return total;
  }

  /// Flow pushed through a forward arc.
  Value flow(int arc_id) const { return half_[arc_id ^ 1].residual; }

  /// Nodes reachable from the source in the residual graph; the arcs leaving
  /// this set form a minimum cut.
  std::vector<char> source_side() const {
    std::vector<char> seen(adj_.size(), 0);
    seen[source_] = 1;
    std::vector<int> queue{source_};
    for (size_t head = 0; head < queue.size(); ++head) {
      for (int id : adj_[queue[head]]) {
        const Half& h = half_[id];
        if (!seen[h.to] && Value{} < h.residual) {
          seen[h.to] = 1;
          queue.push_back(h.to);
        }
      }
    }
    return seen;
  }

 private:
  struct Half {
    int to;
    Value residual;
  };

  std::vector<std::vector<int>> adj_;
  std::vector<Half> half_;
  int source_, sink_;
};

}  // namespace matchstab
