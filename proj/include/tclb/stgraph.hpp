#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "tclb/rational.hpp"

namespace tclb {

using VertexId = int;

struct DirectedEdge {
  VertexId tail = 0;
  VertexId head = 0;
  Rational length;     // = d(tail, head), in (0, 1]
  Rational thickness;  // in (0, 1]
};

// Finite directed graph with source and sink, rational edge lengths and a
// thickness function. Construction checks structural sanity only; the
// source/sink axioms are checked by validate() so that plain weighted graphs
// (e.g. exported grids) can ride in the same container.
class StGraph {
 public:
  StGraph(std::vector<VertexId> vertices, std::vector<DirectedEdge> edges,
          VertexId source, VertexId sink)
      : vertices_(std::move(vertices)),
        edges_(std::move(edges)),
        source_(source),
        sink_(sink) {
    std::sort(vertices_.begin(), vertices_.end());
    if (std::adjacent_find(vertices_.begin(), vertices_.end()) != vertices_.end())
      throw std::invalid_argument("StGraph: duplicate vertex id");
    if (!has_vertex(source_) || !has_vertex(sink_))
      throw std::invalid_argument("StGraph: source/sink not in vertex set");
    if (source_ == sink_) throw std::invalid_argument("StGraph: source equals sink");
    adjacency_.assign(vertices_.size(), {});
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      const auto& e = edges_[k];
      if (!has_vertex(e.tail) || !has_vertex(e.head))
        throw std::invalid_argument("StGraph: edge endpoint not in vertex set");
      if (e.tail == e.head) throw std::invalid_argument("StGraph: self loop");
      if (e.length <= 0 || e.length > 1)
        throw std::invalid_argument("StGraph: edge length outside (0,1]");
      if (e.thickness <= 0 || e.thickness > 1)
        throw std::invalid_argument("StGraph: edge thickness outside (0,1]");
      adjacency_[vertex_index(e.tail)].push_back({vertex_index(e.head), static_cast<int>(k)});
      adjacency_[vertex_index(e.head)].push_back({vertex_index(e.tail), static_cast<int>(k)});
    }
  }

  const std::vector<VertexId>& vertices() const { return vertices_; }
  const std::vector<DirectedEdge>& edges() const { return edges_; }
  VertexId source() const { return source_; }
  VertexId sink() const { return sink_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool has_vertex(VertexId v) const {
    return std::binary_search(vertices_.begin(), vertices_.end(), v);
  }
  int vertex_index(VertexId v) const {
    auto it = std::lower_bound(vertices_.begin(), vertices_.end(), v);
    if (it == vertices_.end() || *it != v)
      throw std::invalid_argument("StGraph: unknown vertex id " + std::to_string(v));
    return static_cast<int>(it - vertices_.begin());
  }
  VertexId max_vertex_id() const { return vertices_.empty() ? -1 : vertices_.back(); }

  // Symmetrized adjacency as (neighbor index, edge index) pairs.
  const std::vector<std::vector<std::pair<int, int>>>& adjacency() const { return adjacency_; }

 private:
  std::vector<VertexId> vertices_;
  std::vector<DirectedEdge> edges_;
  VertexId source_, sink_;
  std::vector<std::vector<std::pair<int, int>>> adjacency_;
};

inline StGraph trivial_st_path() {
  return StGraph({0, 1}, {{0, 1, Rational(1), Rational(1)}}, 0, 1);
}

namespace detail {

// Dijkstra from a vertex index over symmetrized edges; exact comparisons.
inline std::vector<std::optional<Rational>> dijkstra(const StGraph& g, int src_index) {
  const auto& adj = g.adjacency();
  std::vector<std::optional<Rational>> dist(adj.size());
  // (distance, vertex index); lowest vertex index wins ties for determinism
  using Item = std::pair<Rational, int>;
  auto cmp = [](const Item& a, const Item& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second > b.second;
  };
  std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);
  dist[src_index] = Rational(0);
  pq.push({Rational(0), src_index});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (*dist[u] < d) continue;
    for (const auto& [v, k] : adj[u]) {
      Rational nd = d + g.edges()[k].length;
      if (!dist[v] || nd < *dist[v]) {
        dist[v] = nd;
        pq.push({nd, v});
      }
    }
  }
  return dist;
}

}  // namespace detail

inline Rational geodesic_distance(const StGraph& g, VertexId u, VertexId v) {
  int ui = g.vertex_index(u), vi = g.vertex_index(v);
  if (ui == vi) return Rational(0);
  auto dist = detail::dijkstra(g, ui);
  if (!dist[vi])
    throw std::invalid_argument("geodesic_distance: vertices are disconnected");
  return *dist[vi];
}

// All-pairs distances, indexed by vertex index. Throws on disconnected graphs.
inline std::vector<std::vector<Rational>> distance_matrix(const StGraph& g) {
  std::vector<std::vector<Rational>> m;
  m.reserve(g.vertex_count());
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    auto dist = detail::dijkstra(g, static_cast<int>(i));
    std::vector<Rational> row;
    row.reserve(dist.size());
    for (auto& d : dist) {
      if (!d) throw std::invalid_argument("distance_matrix: graph is disconnected");
      row.push_back(*d);
    }
    m.push_back(std::move(row));
  }
  return m;
}

inline Rational thickness_length_sum(const StGraph& g) {
  Rational s(0);
  for (const auto& e : g.edges()) s += e.thickness * e.length;
  return s;
}

inline std::vector<DirectedEdge> edge_boundary(const StGraph& g, const std::set<VertexId>& a) {
  std::vector<DirectedEdge> out;
  for (const auto& e : g.edges()) {
    int in = static_cast<int>(a.count(e.tail)) + static_cast<int>(a.count(e.head));
    if (in == 1) out.push_back(e);
  }
  return out;
}

inline Rational boundary_thickness(const StGraph& g, const std::set<VertexId>& a) {
  Rational s(0);
  for (const auto& e : edge_boundary(g, a)) s += e.thickness;
  return s;
}

// One directed source->sink edge path with a rational weight; a list of these
// with weights summing to 1 witnesses the thickness axiom.
struct PathWeight {
  std::vector<int> edge_indices;
  Rational weight;
};

struct ValidationReport {
  bool unit_st_distance = false;       // axiom (a)
  bool directed_paths_geodesic = false;  // axiom (b)
  bool thickness_is_path_flow = false;   // axiom (c)
  std::vector<std::string> failures;
  std::vector<PathWeight> path_decomposition;  // witness for (c) when it holds
  bool all_pass() const {
    return unit_st_distance && directed_paths_geodesic && thickness_is_path_flow;
  }
};

// Checks the three source/sink axioms.
//  (a) d(s,t) = 1.
//  (b) every directed path is a geodesic. Verified as: the directed graph is
//      acyclic, every edge lies on a directed s->t path, each edge length
//      equals the geodesic distance of its endpoints, and for every directed-
//      reachable pair the longest directed path length equals that distance
//      (so all directed routes between two vertices are tight).
//  (c) thickness is a unit s->t flow; a path decomposition is peeled off as a
//      witness.
inline ValidationReport validate(const StGraph& g) {
  ValidationReport rep;
  const int n = static_cast<int>(g.vertex_count());
  const int si = g.vertex_index(g.source()), ti = g.vertex_index(g.sink());

  std::vector<std::vector<std::pair<int, int>>> out(n), in(n);  // (vertex, edge idx)
  for (std::size_t k = 0; k < g.edge_count(); ++k) {
    const auto& e = g.edges()[k];
    out[g.vertex_index(e.tail)].push_back({g.vertex_index(e.head), static_cast<int>(k)});
    in[g.vertex_index(e.head)].push_back({g.vertex_index(e.tail), static_cast<int>(k)});
  }

  // --- axiom (a)
  std::vector<std::optional<Rational>> dist_s = detail::dijkstra(g, si);
  if (dist_s[ti] && *dist_s[ti] == 1) {
    rep.unit_st_distance = true;
  } else {
    rep.failures.push_back("axiom (a): d(source, sink) != 1");
  }

  // --- axiom (b)
  bool acyclic = true;
  std::vector<int> topo;
  {
    std::vector<int> indeg(n, 0);
    for (int v = 0; v < n; ++v)
      for (auto& [w, k] : out[v]) (void)k, ++indeg[w];
    std::vector<int> stack;
    for (int v = 0; v < n; ++v)
      if (indeg[v] == 0) stack.push_back(v);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      topo.push_back(v);
      for (auto& [w, k] : out[v]) {
        (void)k;
        if (--indeg[w] == 0) stack.push_back(w);
      }
    }
    acyclic = static_cast<int>(topo.size()) == n;
  }

  bool axiom_b = acyclic;
  if (!acyclic) rep.failures.push_back("axiom (b): directed cycle present");

  if (acyclic) {
    // every edge on some directed s->t path
    std::vector<char> from_s(n, 0), to_t(n, 0);
    from_s[si] = 1;
    for (int v : topo)
      if (from_s[v])
        for (auto& [w, k] : out[v]) (void)k, from_s[w] = 1;
    to_t[ti] = 1;
    for (auto it = topo.rbegin(); it != topo.rend(); ++it)
      if (to_t[*it])
        for (auto& [w, k] : in[*it]) (void)k, to_t[w] = 1;
    for (const auto& e : g.edges()) {
      if (!from_s[g.vertex_index(e.tail)] || !to_t[g.vertex_index(e.head)]) {
        axiom_b = false;
        rep.failures.push_back("axiom (b): edge not on any directed source->sink path");
        break;
      }
    }

    // each edge is itself a geodesic, and all directed routes are tight:
    // longest directed path between any reachable pair equals the distance.
    for (int u = 0; u < n && axiom_b; ++u) {
      auto dist_u = detail::dijkstra(g, u);
      // longest directed path from u via DAG DP in topological order
      std::vector<std::optional<Rational>> longest(n);
      longest[u] = Rational(0);
      for (int v : topo) {
        if (!longest[v]) continue;
        for (auto& [w, k] : out[v]) {
          Rational cand = *longest[v] + g.edges()[k].length;
          if (!longest[w] || cand > *longest[w]) longest[w] = cand;
        }
      }
      for (int v = 0; v < n; ++v) {
        if (v == u || !longest[v]) continue;
        if (!dist_u[v] || *longest[v] != *dist_u[v]) {
          axiom_b = false;
          rep.failures.push_back("axiom (b): a directed path is not a geodesic");
          break;
        }
      }
    }
    if (axiom_b) {
      for (const auto& e : g.edges()) {
        if (geodesic_distance(g, e.tail, e.head) != e.length) {
          axiom_b = false;
          rep.failures.push_back("axiom (b): edge length differs from geodesic distance");
          break;
        }
      }
    }
  }
  rep.directed_paths_geodesic = axiom_b;

  // --- axiom (c): thickness has divergence +1 at s, -1 at t, 0 elsewhere,
  // and (on a DAG) peels into weighted s->t directed edge paths.
  bool axiom_c = true;
  for (int v = 0; v < n; ++v) {
    Rational div(0);
    for (auto& [w, k] : out[v]) (void)w, div += g.edges()[k].thickness;
    for (auto& [w, k] : in[v]) (void)w, div -= g.edges()[k].thickness;
    Rational want = (v == si) ? Rational(1) : (v == ti ? Rational(-1) : Rational(0));
    if (div != want) {
      axiom_c = false;
      rep.failures.push_back("axiom (c): thickness flow conservation fails at a vertex");
      break;
    }
  }
  if (axiom_c && acyclic) {
    std::vector<Rational> residual;
    residual.reserve(g.edge_count());
    for (const auto& e : g.edges()) residual.push_back(e.thickness);
    Rational remaining(1);
    while (remaining > 0) {
      // walk a positive-residual directed path from s; lowest head id first
      std::vector<int> path;
      int v = si;
      Rational cap = remaining;
      while (v != ti) {
        int pick = -1;
        for (auto& [w, k] : out[v]) {
          (void)w;
          if (residual[k] > 0 && (pick == -1 || g.edges()[k].head < g.edges()[pick].head))
            pick = k;
        }
        if (pick == -1) break;  // conservation violated; cannot happen if checks above pass
        path.push_back(pick);
        cap = std::min(cap, residual[pick]);
        v = g.vertex_index(g.edges()[pick].head);
      }
      if (v != ti) {
        axiom_c = false;
        rep.failures.push_back("axiom (c): path peeling got stuck");
        break;
      }
      for (int k : path) residual[k] -= cap;
      rep.path_decomposition.push_back({path, cap});
      remaining -= cap;
    }
    if (axiom_c) {
      for (const auto& r : residual) {
        if (r != 0) {
          axiom_c = false;
          rep.failures.push_back("axiom (c): residual thickness after peeling");
          break;
        }
      }
    }
  } else if (axiom_c && !acyclic) {
    axiom_c = false;
    rep.failures.push_back("axiom (c): decomposition needs an acyclic orientation");
  }
  rep.thickness_is_path_flow = axiom_c;
  if (!axiom_c) rep.path_decomposition.clear();
  return rep;
}

}  // namespace tclb
