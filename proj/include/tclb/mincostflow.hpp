#pragma once

#include <optional>
#include <queue>
#include <vector>

#include "tclb/rational.hpp"

namespace tclb {

// Exact min-cost flow by successive shortest augmenting paths with rational
// node potentials. Arcs are uncapacitated; costs must be nonnegative.
// Determinism: Dijkstra breaks distance ties by lowest node id, arc scan
// order is insertion order, and the lowest-id supply/demand nodes are served
// first.
class MinCostFlow {
 public:
  explicit MinCostFlow(int nodes) : supply_(nodes, Rational(0)), head_(nodes, -1) {}

  // Adds a forward arc and its (initially empty) residual twin.
  int add_arc(int from, int to, const Rational& cost) {
    if (cost < 0) throw std::invalid_argument("MinCostFlow: negative arc cost");
    int id = static_cast<int>(arcs_.size());
    arcs_.push_back({to, head_[from], cost, Rational(0), true});
    head_[from] = id;
    arcs_.push_back({from, head_[to], -cost, Rational(0), false});
    head_[to] = id + 1;
    return id;
  }

  void set_supply(int node, const Rational& b) { supply_[node] = b; }

  // Runs to completion; returns total cost. Throws if supplies cannot be met.
  Rational solve() {
    const int n = static_cast<int>(supply_.size());
    potential_.assign(n, Rational(0));
    Rational total_cost(0);
    std::vector<Rational> need = supply_;
    for (;;) {
      int src = -1;
      for (int v = 0; v < n; ++v)
        if (need[v] > 0) {
          src = v;
          break;
        }
      if (src == -1) break;

      // Dijkstra over the residual network with reduced costs.
      std::vector<std::optional<Rational>> dist(n);
      std::vector<int> parent_arc(n, -1);
      using Item = std::pair<Rational, int>;
      auto cmp = [](const Item& a, const Item& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second > b.second;
      };
      std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);
      dist[src] = Rational(0);
      pq.push({Rational(0), src});
      while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (*dist[u] < d) continue;
        for (int a = head_[u]; a != -1; a = arcs_[a].next) {
          const Arc& arc = arcs_[a];
          if (!residual_positive(a)) continue;
          Rational rc = arc.cost - potential_[arc.to] + potential_[u];
          Rational nd = d + rc;
          if (!dist[arc.to] || nd < *dist[arc.to]) {
            dist[arc.to] = nd;
            parent_arc[arc.to] = a;
            pq.push({nd, arc.to});
          }
        }
      }

      int sink = -1;
      for (int v = 0; v < n; ++v) {
        if (need[v] < 0 && dist[v]) {
          if (sink == -1 || *dist[v] < *dist[sink]) sink = v;
        }
      }
      if (sink == -1) throw std::invalid_argument("MinCostFlow: demand unreachable");

      // update potentials (cap at dist[sink] for unreached/further nodes)
      for (int v = 0; v < n; ++v) {
        Rational dv = dist[v] ? std::min(*dist[v], *dist[sink]) : *dist[sink];
        potential_[v] += dv;
      }

      // bottleneck along the path
      Rational deficit = -need[sink];
      Rational amount = std::min(need[src], deficit);
      for (int v = sink; v != src;) {
        int a = parent_arc[v];
        if (!arcs_[a].forward) amount = std::min(amount, arcs_[a ^ 1].flow);
        v = arcs_[a ^ 1].to;
      }
      for (int v = sink; v != src;) {
        int a = parent_arc[v];
        if (arcs_[a].forward) {
          arcs_[a].flow += amount;
          total_cost += amount * arcs_[a].cost;
        } else {
          arcs_[a ^ 1].flow -= amount;
          total_cost += amount * arcs_[a].cost;  // negative
        }
        v = arcs_[a ^ 1].to;
      }
      need[src] -= amount;
      need[sink] += amount;
      if (++iterations_ > kMaxIterations)
        throw std::logic_error("MinCostFlow: iteration limit exceeded");
    }
    return total_cost;
  }

  // Flow on forward arc id (as returned by add_arc).
  const Rational& flow(int arc_id) const { return arcs_[arc_id].flow; }
  const std::vector<Rational>& potentials() const { return potential_; }

 private:
  struct Arc {
    int to;
    int next;  // next arc out of the same tail
    Rational cost;
    Rational flow;  // stored on the forward arc only
    bool forward;
  };

  bool residual_positive(int a) const {
    return arcs_[a].forward || arcs_[a ^ 1].flow > 0;
  }

  static constexpr long kMaxIterations = 10'000'000;
  std::vector<Rational> supply_;
  std::vector<int> head_;
  std::vector<Arc> arcs_;
  std::vector<Rational> potential_;
  long iterations_ = 0;
};

}  // namespace tclb
