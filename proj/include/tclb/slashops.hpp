#pragma once

#include <algorithm>
#include <vector>

#include "tclb/rational.hpp"
#include "tclb/stgraph.hpp"

namespace tclb {

namespace detail {

// Internal vertices of h (everything except its source and sink), ascending.
inline std::vector<VertexId> internal_vertices(const StGraph& h) {
  std::vector<VertexId> internal;
  for (VertexId v : h.vertices())
    if (v != h.source() && v != h.sink()) internal.push_back(v);
  return internal;
}

}  // namespace detail

// Replaces the edges of g listed in `subset` (indices into g.edges(),
// ascending) each by a fresh copy of h, identifying tail ~ s_H and
// head ~ t_H. Lengths and thicknesses multiply. Equivalent to iterating
// single-edge replacement over the subset in ascending order; built in one
// pass so large powers stay linear.
inline StGraph restricted_slash(const StGraph& g, std::vector<int> subset, const StGraph& h) {
  std::sort(subset.begin(), subset.end());
  subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
  for (int k : subset)
    if (k < 0 || k >= static_cast<int>(g.edge_count()))
      throw std::invalid_argument("restricted_slash: edge index out of range");

  std::vector<VertexId> vertices = g.vertices();
  std::vector<DirectedEdge> edges;
  std::vector<char> replaced(g.edge_count(), 0);
  for (int k : subset) replaced[k] = 1;
  for (std::size_t k = 0; k < g.edge_count(); ++k)
    if (!replaced[k]) edges.push_back(g.edges()[k]);

  const std::vector<VertexId> h_internal = detail::internal_vertices(h);
  VertexId next_id = g.max_vertex_id() + 1;
  for (int k : subset) {
    const DirectedEdge& e = g.edges()[k];
    std::vector<VertexId> image(h.max_vertex_id() + 1, -1);
    image[h.source()] = e.tail;
    image[h.sink()] = e.head;
    for (VertexId v : h_internal) {
      image[v] = next_id++;
      vertices.push_back(image[v]);
    }
    for (const auto& he : h.edges())
      edges.push_back({image[he.tail], image[he.head], e.length * he.length,
                       e.thickness * he.thickness});
  }
  return StGraph(std::move(vertices), std::move(edges), g.source(), g.sink());
}

inline StGraph edge_replace(const StGraph& g, int edge_index, const StGraph& h) {
  if (edge_index < 0 || edge_index >= static_cast<int>(g.edge_count()))
    throw std::invalid_argument("edge_replace: edge index out of range");
  return restricted_slash(g, {edge_index}, h);
}

inline StGraph slash_product(const StGraph& g, const StGraph& h) {
  std::vector<int> all(g.edge_count());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = static_cast<int>(k);
  return restricted_slash(g, all, h);
}

inline StGraph slash_power(const StGraph& g, int n) {
  if (n < 0) throw std::invalid_argument("slash_power: negative exponent");
  StGraph acc = trivial_st_path();
  for (int i = 0; i < n; ++i) acc = slash_product(acc, g);
  return acc;
}

// An elementary replacement graph: a single thickness-1 path, or a cycle of
// two thickness-1/2 sides each with at least two edges. Sides list edge
// lengths from source to sink; each side must sum to 1.
struct ElementarySpec {
  bool is_cycle = false;
  std::vector<std::vector<Rational>> sides;  // 1 side for a path, 2 for a cycle

  void check() const {
    if (is_cycle) {
      if (sides.size() != 2) throw std::invalid_argument("elementary cycle needs two sides");
      for (const auto& s : sides)
        if (s.size() < 2)
          throw std::invalid_argument("elementary cycle side needs at least three vertices");
    } else {
      if (sides.size() != 1) throw std::invalid_argument("elementary path needs one side");
      if (sides[0].empty()) throw std::invalid_argument("elementary path needs an edge");
    }
    for (const auto& s : sides) {
      Rational total(0);
      for (const auto& len : s) {
        if (len <= 0) throw std::invalid_argument("elementary side has nonpositive length");
        total += len;
      }
      if (total != 1) throw std::invalid_argument("elementary side lengths must sum to 1");
    }
  }

  bool is_trivial() const { return !is_cycle && sides.size() == 1 && sides[0].size() == 1; }

  StGraph to_graph() const {
    check();
    std::vector<VertexId> vertices = {0, 1};
    std::vector<DirectedEdge> edges;
    Rational th = is_cycle ? Rational(1, 2) : Rational(1);
    VertexId next = 2;
    for (const auto& side : sides) {
      VertexId prev = 0;
      for (std::size_t i = 0; i < side.size(); ++i) {
        VertexId to = (i + 1 == side.size()) ? 1 : next++;
        if (to != 1) vertices.push_back(to);
        edges.push_back({prev, to, side[i], th});
        prev = to;
      }
    }
    return StGraph(std::move(vertices), std::move(edges), 0, 1);
  }
};

inline ElementarySpec trivial_path_spec() { return {false, {{Rational(1)}}}; }

// Pa union_{e_rep} Cy: a path with one edge replaced by a cycle.
struct CycleWithHandles {
  ElementarySpec pa;     // the handle path
  int e_rep_index = 0;   // which edge of pa is replaced
  ElementarySpec cy;     // the cycle
  Rational d_rep;        // d_Pa(e_rep)
  Rational ht_cyc;       // sum over sides of the max distance to {s, t} in Cy

  StGraph to_st_graph() const {
    return edge_replace(pa.to_graph(), e_rep_index, cy.to_graph());
  }
};

namespace detail {

// Height of one cycle side: max over its vertices of the distance to
// {source, sink}, both measured inside the normalized cycle metric; on a
// geodesic side with prefix p that distance is min(p, 1-p).
inline Rational side_height(const std::vector<Rational>& side) {
  Rational best(0), prefix(0);
  for (std::size_t i = 0; i + 1 < side.size(); ++i) {
    prefix += side[i];
    Rational complement = Rational(1) - prefix;
    Rational height = std::min(prefix, complement);
    if (height > best) best = height;
  }
  return best;
}

}  // namespace detail

inline CycleWithHandles make_cycle_with_handles(ElementarySpec pa, int e_rep_index,
                                                ElementarySpec cy) {
  pa.check();
  cy.check();
  if (!cy.is_cycle) throw std::invalid_argument("cycle-with-handles: replacement must be a cycle");
  if (pa.is_cycle) throw std::invalid_argument("cycle-with-handles: base must be a path");
  if (e_rep_index < 0 || e_rep_index >= static_cast<int>(pa.sides[0].size()))
    throw std::invalid_argument("cycle-with-handles: replaced edge out of range");
  CycleWithHandles out;
  out.d_rep = pa.sides[0][e_rep_index];
  out.ht_cyc = detail::side_height(cy.sides[0]) + detail::side_height(cy.sides[1]);
  out.pa = std::move(pa);
  out.e_rep_index = e_rep_index;
  out.cy = std::move(cy);
  return out;
}

inline ElementarySpec diamond_cycle_spec() {
  return {true, {{Rational(1, 2), Rational(1, 2)}, {Rational(1, 2), Rational(1, 2)}}};
}

inline CycleWithHandles diamond() {
  return make_cycle_with_handles(trivial_path_spec(), 0, diamond_cycle_spec());
}

inline CycleWithHandles laakso() {
  ElementarySpec pa{false, {{Rational(1, 4), Rational(1, 2), Rational(1, 4)}}};
  return make_cycle_with_handles(std::move(pa), 1, diamond_cycle_spec());
}

// Closed forms for slash power sizes.
inline mpz_class power_edge_count(std::size_t base_edges, int n) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base_edges),
                static_cast<unsigned long>(n));
  return r;
}
inline mpz_class power_vertex_count(std::size_t base_vertices, std::size_t base_edges, int n) {
  if (base_edges == 1) return mpz_class(2 + static_cast<long>(base_vertices - 2) * n);
  mpz_class en = power_edge_count(base_edges, n);
  return 2 + mpz_class(static_cast<long>(base_vertices - 2)) * (en - 1) /
                 (static_cast<long>(base_edges) - 1);
}

}  // namespace tclb
