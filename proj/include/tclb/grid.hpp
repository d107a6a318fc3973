#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "tclb/cert.hpp"
#include "tclb/measure.hpp"
#include "tclb/sqrtcert.hpp"
#include "tclb/stgraph.hpp"
#include "tclb/transport.hpp"
#include "tclb/walsh.hpp"

namespace tclb {

// The dyadic planar grid: vertices {0..2^n}^2 with unit-length edges to the
// right and up, uniform thickness 1/|E|, and the l1 metric.
class GridGraph {
 public:
  explicit GridGraph(int n) : n_(n) {
    if (n < 2) throw std::invalid_argument("GridGraph: n must be at least 2");
    side_ = (1 << n) + 1;
    edge_count_ = 2l * (1l << n) * side_;
    // |E| = 2^{n+1} (2^n + 1)
    if (edge_count_ != (2l << n) * side_) throw std::logic_error("GridGraph: edge count");
  }

  int n() const { return n_; }
  int side() const { return side_; }                      // 2^n + 1 vertices per row
  long vertex_count() const { return 1l * side_ * side_; }
  long edge_count() const { return edge_count_; }
  Rational thickness() const { return make_rational(1, edge_count_); }

  VertexId vid(int x, int y) const { return y * side_ + x; }
  std::pair<int, int> coords(VertexId v) const { return {v % side_, v / side_}; }
  bool in_range(int x, int y) const { return 0 <= x && x < side_ && 0 <= y && y < side_; }

  Rational distance(VertexId u, VertexId v) const {
    auto [ux, uy] = coords(u);
    auto [vx, vy] = coords(v);
    return Rational(std::abs(ux - vx) + std::abs(uy - vy));
  }

  std::vector<VertexId> vertices() const {
    std::vector<VertexId> out(vertex_count());
    for (long i = 0; i < vertex_count(); ++i) out[i] = static_cast<VertexId>(i);
    return out;
  }

  // Directed edges: (u, u+(1,0)) then (u, u+(0,1)), row-major.
  template <class F>
  void for_each_edge(F&& f) const {
    for (int y = 0; y < side_; ++y)
      for (int x = 0; x < side_; ++x) {
        if (x + 1 < side_) f(vid(x, y), vid(x + 1, y));
        if (y + 1 < side_) f(vid(x, y), vid(x, y + 1));
      }
  }

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(vertex_count());
    for_each_edge([&](VertexId u, VertexId v) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    });
    return adj;
  }

  // Container export: unit lengths, uniform thickness, corner source/sink.
  // The result is a plain weighted graph, not an st-graph.
  StGraph to_graph() const {
    std::vector<DirectedEdge> edges;
    edges.reserve(edge_count_);
    Rational th = thickness();
    for_each_edge([&](VertexId u, VertexId v) { edges.push_back({u, v, Rational(1), th}); });
    return StGraph(vertices(), std::move(edges), vid(0, 0), vid(side_ - 1, side_ - 1));
  }

 private:
  int n_;
  int side_;
  long edge_count_;
};

inline GridGraph make_grid(int n) { return GridGraph(n); }

// Index into the depth-(n-2) quadtree of dyadic subgrids. Digit layout
// follows the quadrant convention 1 = upper right, 2 = upper left,
// 3 = lower left, 4 = lower right.
struct TreeIndex {
  std::vector<std::uint8_t> digits;

  int generation() const { return static_cast<int>(digits.size()); }
  bool operator<(const TreeIndex& o) const {
    if (digits.size() != o.digits.size()) return digits.size() < o.digits.size();
    return digits < o.digits;
  }
  bool operator==(const TreeIndex& o) const { return digits == o.digits; }
  std::string str() const {
    std::string s;
    for (auto d : digits) s += static_cast<char>('0' + d);
    return s.empty() ? "-" : s;
  }
};

struct CrossMeasure {
  TreeIndex index;
  VertexId center;
  std::vector<VertexId> vertical, horizontal;  // full lines, center included
  SignedMeasure measure;                       // center atoms cancel
};

// The cross-shaped measures mu_t: +4^{-n} on the vertical center line of the
// dyadic subgrid Q_t, -4^{-n} on the horizontal one; the shared center
// cancels and falls out of the support.
class CrossMeasureFamily {
 public:
  CrossMeasureFamily(int n, std::vector<CrossMeasure> measures)
      : n_(n), measures_(std::move(measures)) {}

  int n() const { return n_; }
  int max_generation() const { return n_ - 2; }
  const std::vector<CrossMeasure>& measures() const { return measures_; }

  std::vector<const CrossMeasure*> generation(int k) const {
    std::vector<const CrossMeasure*> out;
    for (const auto& m : measures_)
      if (m.index.generation() == k) out.push_back(&m);
    return out;
  }

  // The canonical constants the family is certified against.
  static Rational c1() { return Rational(1, 2); }
  static Rational c2() { return Rational(4); }
  static Rational c3() { return Rational(16); }
  static Rational c4() { return Rational(1); }

 private:
  int n_;
  std::vector<CrossMeasure> measures_;
};

inline CrossMeasureFamily cross_measures(int n) {
  GridGraph grid(n);
  std::vector<CrossMeasure> out;
  Rational atom = make_rational(1, mpz_class(1) << (2 * n));  // 4^{-n}
  // enumerate T_0, T_1, ... in lexicographic digit order
  std::vector<TreeIndex> level = {TreeIndex{}};
  for (int k = 0; k <= n - 2; ++k) {
    for (const auto& t : level) {
      // subgrid corner and size from the digit path
      int size = 1 << n;
      int x0 = 0, y0 = 0;
      for (auto d : t.digits) {
        size /= 2;
        switch (d) {
          case 1: x0 += size, y0 += size; break;
          case 2: y0 += size; break;
          case 3: break;
          case 4: x0 += size; break;
          default: throw std::logic_error("cross_measures: bad digit");
        }
      }
      const int half = size / 2, quarter = size / 4;
      const int cx = x0 + half, cy = y0 + half;
      CrossMeasure m;
      m.index = t;
      m.center = grid.vid(cx, cy);
      std::map<VertexId, Rational> atoms;
      for (int y = cy - quarter; y <= cy + quarter; ++y) {
        m.vertical.push_back(grid.vid(cx, y));
        atoms[grid.vid(cx, y)] += atom;
      }
      for (int x = cx - quarter; x <= cx + quarter; ++x) {
        m.horizontal.push_back(grid.vid(x, cy));
        atoms[grid.vid(x, cy)] -= atom;
      }
      m.measure = SignedMeasure(std::move(atoms));
      out.push_back(std::move(m));
    }
    if (k == n - 2) break;
    std::vector<TreeIndex> next;
    for (const auto& t : level)
      for (std::uint8_t d = 1; d <= 4; ++d) {
        TreeIndex child = t;
        child.digits.push_back(d);
        next.push_back(std::move(child));
      }
    level = std::move(next);
  }
  return CrossMeasureFamily(n, std::move(out));
}

struct PropertyReport {
  // tightest constants achieved by the family (exact)
  Rational c1_achieved, c2_achieved, c3_achieved, c4_achieved;
  bool p5_connected = false;
  bool p1 = false, p2 = false, p3 = false, p4 = false, p5 = false;
  bool all() const { return p1 && p2 && p3 && p4 && p5; }
  std::map<std::string, Rational> tc_norms;  // per tree index
};

namespace detail {

inline Rational support_diameter(const GridGraph& grid, const std::vector<VertexId>& support) {
  Rational best(0);
  for (std::size_t i = 0; i < support.size(); ++i)
    for (std::size_t j = i + 1; j < support.size(); ++j)
      best = std::max(best, grid.distance(support[i], support[j]));
  return best;
}

inline Rational support_distance(const GridGraph& grid, const std::vector<VertexId>& a,
                                 const std::vector<VertexId>& b) {
  std::optional<Rational> best;
  for (VertexId u : a)
    for (VertexId v : b) {
      Rational d = grid.distance(u, v);
      if (!best || d < *best) best = d;
    }
  return *best;
}

}  // namespace detail

// Exact verification of the five support properties. C4 is maximized over
// contiguous sub-intervals of both lines (the extremal sets for both closed
// forms of the mass bound).
inline PropertyReport check_properties(const CrossMeasureFamily& fam) {
  GridGraph grid(fam.n());
  PropertyReport rep;
  rep.c1_achieved = Rational(0);
  rep.c2_achieved = Rational(0);
  rep.c3_achieved = Rational(0);
  rep.c4_achieved = Rational(0);
  rep.p5_connected = true;
  const int n = fam.n();
  const Rational atom = make_rational(1, mpz_class(1) << (2 * n));

  auto l1 = [&](VertexId u, VertexId v) { return grid.distance(u, v); };
  for (const auto& m : fam.measures()) {
    const int k = m.index.generation();
    // P1
    auto support = m.measure.support();
    Rational diam = detail::support_diameter(grid, support);
    rep.c1_achieved = std::max(rep.c1_achieved, Rational(diam / rational_pow2(n - k)));
    // P3 (exact transportation cost)
    Rational tc = tc_norm_metric(support, l1, m.measure).cost;
    rep.tc_norms[m.index.str()] = tc;
    rep.c3_achieved = std::max(rep.c3_achieved, Rational(make_rational(1, mpz_class(1) << (2 * k)) / tc));
    // P4 over sub-intervals of each line
    const Rational mass_cap = rational_pow2(-n - 1 - k);
    for (const auto* line : {&m.vertical, &m.horizontal}) {
      for (std::size_t i = 0; i < line->size(); ++i) {
        long count = 0;
        for (std::size_t j = i; j < line->size(); ++j) {
          if ((*line)[j] != m.center) ++count;
          Rational mu_abs = atom * count;
          Rational diameter_cap = atom * static_cast<long>(j - i + 1);
          Rational cap = std::min(mass_cap, diameter_cap);
          if (cap > 0) rep.c4_achieved = std::max(rep.c4_achieved, Rational(mu_abs / cap));
        }
      }
    }
    // P5: support plus the center is connected
    std::set<VertexId> cross(support.begin(), support.end());
    cross.insert(m.center);
    std::vector<VertexId> stack = {m.center};
    std::set<VertexId> seen = {m.center};
    while (!stack.empty()) {
      VertexId v = stack.back();
      stack.pop_back();
      auto [x, y] = grid.coords(v);
      for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
        if (!grid.in_range(x + dx, y + dy)) continue;
        VertexId w = grid.vid(x + dx, y + dy);
        if (cross.count(w) && !seen.count(w)) {
          seen.insert(w);
          stack.push_back(w);
        }
      }
    }
    if (seen.size() != cross.size()) rep.p5_connected = false;
  }
  // P2 over all pairs
  for (std::size_t i = 0; i < fam.measures().size(); ++i)
    for (std::size_t j = i + 1; j < fam.measures().size(); ++j) {
      const auto& a = fam.measures()[i];
      const auto& b = fam.measures()[j];
      int kmax = std::max(a.index.generation(), b.index.generation());
      Rational dist =
          detail::support_distance(grid, a.measure.support(), b.measure.support());
      rep.c2_achieved = std::max(rep.c2_achieved, Rational(rational_pow2(n - kmax) / dist));
    }

  rep.p1 = rep.c1_achieved <= CrossMeasureFamily::c1();
  rep.p2 = rep.c2_achieved <= CrossMeasureFamily::c2();
  rep.p3 = rep.c3_achieved <= CrossMeasureFamily::c3();
  rep.p4 = rep.c4_achieved <= CrossMeasureFamily::c4();
  rep.p5 = rep.p5_connected;
  return rep;
}

struct C2AlphaResult {
  Rational alpha_claimed;
  std::optional<Rational> alpha_verified;  // min over rows of the exact norm
};

// min_i || sum_t theta_i(t) mu_t ||_TC over generation k, claimed at
// (C1 C2 C3)^{-1} and recomputed exactly when the instance is within budget.
inline C2AlphaResult condition_c2_alpha(const CrossMeasureFamily& fam, int k,
                                        const OrthogonalSystem& sys,
                                        long atom_budget = 4096) {
  auto gen = fam.generation(k);
  if (static_cast<long>(gen.size()) != sys.size)
    throw std::invalid_argument("condition_c2_alpha: system size mismatch");
  C2AlphaResult out;
  out.alpha_claimed = Rational(1) / (CrossMeasureFamily::c1() * CrossMeasureFamily::c2() *
                                     CrossMeasureFamily::c3());
  GridGraph grid(fam.n());
  long atoms = 0;
  for (const auto* m : gen) atoms += static_cast<long>(m->measure.atoms().size());
  if (atoms * sys.size > atom_budget) return out;  // verification skipped

  auto l1 = [&](VertexId u, VertexId v) { return grid.distance(u, v); };
  std::optional<Rational> minimum;
  for (int i = 0; i < sys.size; ++i) {
    SignedMeasure combo;
    for (int t = 0; t < sys.size; ++t)
      combo = combo + gen[t]->measure * Rational(static_cast<int>(sys.rows[i][t]));
    Rational norm = tc_norm_metric(combo.support(), l1, combo).cost;
    if (!minimum || norm < *minimum) minimum = norm;
  }
  out.alpha_verified = minimum;
  if (minimum && *minimum < out.alpha_claimed)
    throw std::logic_error("condition_c2_alpha: verified minimum fell below the claim");
  return out;
}

// ---------------------------------------------------------------------------
// Simply connected sets
// ---------------------------------------------------------------------------

// Small undirected graph in mask form for subset enumeration.
struct AdjacencyGraph {
  int n = 0;
  std::vector<std::uint64_t> nbr;

  static AdjacencyGraph from_grid(const GridGraph& g) {
    if (g.vertex_count() > 64)
      throw std::invalid_argument("AdjacencyGraph: grid exceeds 64 vertices");
    AdjacencyGraph a;
    a.n = static_cast<int>(g.vertex_count());
    a.nbr.assign(a.n, 0);
    g.for_each_edge([&](VertexId u, VertexId v) {
      a.nbr[u] |= 1ull << v;
      a.nbr[v] |= 1ull << u;
    });
    return a;
  }

  static AdjacencyGraph from_graph(const StGraph& g) {
    if (g.vertex_count() > 64)
      throw std::invalid_argument("AdjacencyGraph: graph exceeds 64 vertices");
    AdjacencyGraph a;
    a.n = static_cast<int>(g.vertex_count());
    a.nbr.assign(a.n, 0);
    for (const auto& e : g.edges()) {
      int u = g.vertex_index(e.tail), v = g.vertex_index(e.head);
      a.nbr[u] |= 1ull << v;
      a.nbr[v] |= 1ull << u;
    }
    return a;
  }

  std::uint64_t full() const { return (n == 64) ? ~0ull : ((1ull << n) - 1); }

  bool connected(std::uint64_t mask) const {
    if (mask == 0) return true;
    std::uint64_t seen = mask & (~mask + 1);
    for (;;) {
      std::uint64_t grow = seen, t = seen;
      while (t) {
        int v = __builtin_ctzll(t);
        t &= t - 1;
        grow |= nbr[v] & mask;
      }
      if (grow == seen) return seen == mask;
      seen = grow;
    }
  }
};

namespace detail {

template <class F>
void enumerate_connected_rec(const AdjacencyGraph& g, std::uint64_t s, std::uint64_t cand,
                             std::uint64_t forbidden, F&& yield) {
  yield(s);
  std::uint64_t tried = 0, c = cand;
  while (c) {
    std::uint64_t u = c & (~c + 1);
    c ^= u;
    int ui = __builtin_ctzll(u);
    std::uint64_t f2 = forbidden | tried;
    std::uint64_t cand2 = (c | (g.nbr[ui] & ~(s | u) & ~f2)) & ~f2;
    enumerate_connected_rec(g, s | u, cand2, f2, yield);
    tried |= u;
  }
}

}  // namespace detail

// Yields exactly the proper nonempty vertex sets A with both A and its
// complement connected, as bit masks in a deterministic order. Enumeration
// grows connected sets from each anchor vertex; complements are then
// filtered, which visits far fewer candidates than a raw subset scan.
template <class F>
void enumerate_simply_connected(const AdjacencyGraph& g, int budget, F&& yield) {
  if (g.n > 64 || g.n > budget)
    throw std::invalid_argument("enumerate_simply_connected: graph exceeds the budget");
  const std::uint64_t full = g.full();
  for (int v = 0; v < g.n; ++v) {
    std::uint64_t anchor = 1ull << v;
    std::uint64_t banned = (anchor << 1) - 1;  // v and everything below it
    detail::enumerate_connected_rec(g, anchor, g.nbr[v] & ~banned, banned,
                                    [&](std::uint64_t s) {
                                      std::uint64_t comp = full & ~s;
                                      if (comp != 0 && g.connected(comp)) yield(s);
                                    });
  }
}

struct SobolevRatio {
  std::vector<std::pair<int, Rational>> per_generation_squares;  // (k, sum |mu_t(A)|^2)
  Rational rhs;  // |boundary| / |E|

  // certified lhs <= c * rhs
  bool certified_le(const QSqrt2& c) const {
    SqrtSum lhs;
    for (const auto& [k, sq] : per_generation_squares) (void)k, lhs.add_sqrt(Rational(1), sq);
    return lhs.le(c * QSqrt2(rhs));
  }
};

// Both sides of the grid Sobolev inequality for an indicator set.
inline SobolevRatio sobolev_ratio(const CrossMeasureFamily& fam, const std::vector<char>& in_a) {
  GridGraph grid(fam.n());
  SobolevRatio out;
  std::map<int, Rational> squares;
  for (const auto& m : fam.measures()) {
    Rational v = m.measure.mass_on([&](VertexId x) { return in_a[x] != 0; });
    if (v != 0) squares[m.index.generation()] += v * v;
  }
  for (const auto& [k, sq] : squares) out.per_generation_squares.push_back({k, sq});
  long boundary = 0;
  grid.for_each_edge([&](VertexId u, VertexId v) {
    if (in_a[u] != in_a[v]) ++boundary;
  });
  out.rhs = make_rational(boundary, grid.edge_count());
  return out;
}

// W^{1,1}(th) seminorm of an arbitrary vertex function on the grid.
inline Rational grid_w11_norm(const GridGraph& grid, const std::vector<Rational>& f) {
  Rational s(0);
  grid.for_each_edge([&](VertexId u, VertexId v) { s += rational_abs(f[u] - f[v]); });
  return s * grid.thickness();
}

// lhs of the Sobolev inequality for an arbitrary vertex function, compared
// against c * ||f||_W11 with certified square roots.
inline bool grid_function_sobolev(const CrossMeasureFamily& fam, const std::vector<Rational>& f,
                                  const QSqrt2& c) {
  GridGraph grid(fam.n());
  std::map<int, Rational> squares;
  for (const auto& m : fam.measures()) {
    Rational integral(0);
    for (const auto& [v, q] : m.measure.atoms()) integral += q * f[v];
    squares[m.index.generation()] += integral * integral;
  }
  SqrtSum lhs;
  for (const auto& [k, sq] : squares) (void)k, lhs.add_sqrt(Rational(1), sq);
  return lhs.le(c * QSqrt2(grid_w11_norm(grid, f)));
}

struct TopologyReport {
  std::vector<VertexId> vertex_boundary;
  bool vertex_boundary_connected = false;
  bool diameter_bound = false;     // min(diam A, diam A^c) <= 2 diam dV A
  bool edge_vertex_bound = false;  // |dV A| <= 2 |dE A|
  std::optional<bool> separated_bound;  // r |S| <= 3 |A| for a supplied (r, S)
  long edge_boundary_size = 0;
};

// Planar-topology facts for a vertex set of the grid. The connectivity of
// the vertex boundary is only guaranteed for simply connected sets; callers
// choose what to feed in.
inline TopologyReport planar_topology_checks(
    const GridGraph& grid, const std::vector<char>& in_a,
    std::optional<std::pair<long, std::vector<VertexId>>> separated = std::nullopt) {
  TopologyReport rep;
  std::set<VertexId> vb;
  grid.for_each_edge([&](VertexId u, VertexId v) {
    if (in_a[u] != in_a[v]) {
      ++rep.edge_boundary_size;
      vb.insert(u);
      vb.insert(v);
    }
  });
  rep.vertex_boundary.assign(vb.begin(), vb.end());
  rep.edge_vertex_bound =
      static_cast<long>(rep.vertex_boundary.size()) <= 2 * rep.edge_boundary_size;

  // connectivity of the vertex boundary in the grid
  if (!vb.empty()) {
    std::set<VertexId> seen = {*vb.begin()};
    std::vector<VertexId> stack = {*vb.begin()};
    while (!stack.empty()) {
      VertexId v = stack.back();
      stack.pop_back();
      auto [x, y] = grid.coords(v);
      for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
        if (!grid.in_range(x + dx, y + dy)) continue;
        VertexId w = grid.vid(x + dx, y + dy);
        if (vb.count(w) && !seen.count(w)) {
          seen.insert(w);
          stack.push_back(w);
        }
      }
    }
    rep.vertex_boundary_connected = seen.size() == vb.size();
  }

  // diameter inequality
  auto diam_of = [&](bool inside) {
    long best = -1;  // -1 encodes an empty set
    std::vector<VertexId> pts;
    for (VertexId v = 0; v < static_cast<VertexId>(grid.vertex_count()); ++v)
      if ((in_a[v] != 0) == inside) pts.push_back(v);
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i; j < pts.size(); ++j) {
        auto [ax, ay] = grid.coords(pts[i]);
        auto [bx, by] = grid.coords(pts[j]);
        best = std::max(best, static_cast<long>(std::abs(ax - bx) + std::abs(ay - by)));
      }
    return best;
  };
  long da = diam_of(true), dc = diam_of(false);
  long dvb = -1;
  for (std::size_t i = 0; i < rep.vertex_boundary.size(); ++i)
    for (std::size_t j = i; j < rep.vertex_boundary.size(); ++j) {
      auto [ax, ay] = grid.coords(rep.vertex_boundary[i]);
      auto [bx, by] = grid.coords(rep.vertex_boundary[j]);
      dvb = std::max(dvb, static_cast<long>(std::abs(ax - bx) + std::abs(ay - by)));
    }
  if (da < 0 || dc < 0)
    rep.diameter_bound = true;  // empty side: nothing to bound
  else
    rep.diameter_bound = std::min(da, dc) <= 2 * dvb;

  if (separated) {
    auto& [r, s_set] = *separated;
    long size_a = 0;
    for (char c : in_a) size_a += (c != 0);
    bool hypothesis = s_set.size() >= 2;
    for (VertexId v : s_set) hypothesis = hypothesis && in_a[v] != 0;
    for (std::size_t i = 0; i < s_set.size() && hypothesis; ++i)
      for (std::size_t j = i + 1; j < s_set.size(); ++j)
        if (grid.distance(s_set[i], s_set[j]) < r) hypothesis = false;
    rep.separated_bound =
        !hypothesis || r * static_cast<long>(s_set.size()) <= 3 * size_a;
  }
  return rep;
}

// Extreme-point characterization of the W^{1,1}(nu) unit ball: norm exactly
// one, two-valued, and the level set simply connected.
inline bool extreme_point_test(const StGraph& g, const std::vector<Rational>& nu,
                               const std::map<VertexId, Rational>& f) {
  if (nu.size() != g.edge_count())
    throw std::invalid_argument("extreme_point_test: one nu value per edge required");
  for (const auto& w : nu)
    if (w <= 0) throw std::invalid_argument("extreme_point_test: nu must be fully supported");
  Rational norm(0);
  for (std::size_t k = 0; k < g.edge_count(); ++k) {
    const auto& e = g.edges()[k];
    norm += nu[k] * rational_abs(f.at(e.head) - f.at(e.tail));
  }
  if (norm != 1) return false;
  std::set<Rational> values;
  for (VertexId v : g.vertices()) values.insert(f.at(v));
  if (values.size() != 2) return false;
  AdjacencyGraph adj = AdjacencyGraph::from_graph(g);
  std::uint64_t level = 0;
  const Rational top = *values.rbegin();
  for (VertexId v : g.vertices())
    if (f.at(v) == top) level |= 1ull << g.vertex_index(v);
  return adj.connected(level) && adj.connected(adj.full() & ~level);
}

// Seeded random simply connected subset (grown from a random vertex,
// complement-connectivity filtered by retry).
inline std::vector<char> random_simply_connected(const GridGraph& grid, std::mt19937_64& rng,
                                                 int target_size) {
  auto adj = grid.adjacency();
  const long n = grid.vertex_count();
  for (;;) {
    std::vector<char> in_a(n, 0);
    std::vector<VertexId> frontier = {static_cast<VertexId>(rng() % n)};
    in_a[frontier[0]] = 1;
    int size = 1;
    while (size < target_size && !frontier.empty()) {
      std::size_t pick = rng() % frontier.size();
      VertexId v = frontier[pick];
      std::vector<VertexId> fresh;
      for (VertexId w : adj[v])
        if (!in_a[w]) fresh.push_back(w);
      if (fresh.empty()) {
        frontier.erase(frontier.begin() + static_cast<long>(pick));
        continue;
      }
      VertexId w = fresh[rng() % fresh.size()];
      in_a[w] = 1;
      ++size;
      frontier.push_back(w);
    }
    // complement connectivity
    std::vector<char> seen(n, 0);
    VertexId start = -1;
    for (VertexId v = 0; v < n; ++v)
      if (!in_a[v]) {
        start = v;
        break;
      }
    if (start < 0) continue;
    std::vector<VertexId> stack = {start};
    seen[start] = 1;
    long reached = 1, outside = 0;
    for (VertexId v = 0; v < n; ++v) outside += !in_a[v];
    while (!stack.empty()) {
      VertexId v = stack.back();
      stack.pop_back();
      for (VertexId w : adj[v])
        if (!in_a[w] && !seen[w]) {
          seen[w] = 1;
          ++reached;
          stack.push_back(w);
        }
    }
    if (reached == outside) return in_a;
  }
}

struct GridCertifyOptions {
  long c2_atom_budget = 4096;      // flow-verification budget per generation
  int stored_system_max = 16;      // largest Walsh system embedded verbatim
  int sampled_sets = 300;          // simply connected sets per sampled c1 pass
  int sampled_functions = 100;     // random integer functions per sampled c1 pass
  int property_check_max_n = 4;    // run check_properties through this n
  std::uint64_t seed = 0;
};

namespace detail {

// Sampled (C1) transcript: random simply connected sets and random integer
// functions, all certified against c * ||.||_W11.
inline long grid_c1_sample(const CrossMeasureFamily& fam, const QSqrt2& c,
                           const GridCertifyOptions& opt) {
  GridGraph grid(fam.n());
  std::mt19937_64 rng(opt.seed);
  long checked = 0;
  for (int trial = 0; trial < opt.sampled_sets; ++trial) {
    int target = 1 + static_cast<int>(rng() % (grid.vertex_count() - 1));
    auto in_a = random_simply_connected(grid, rng, target);
    if (!sobolev_ratio(fam, in_a).certified_le(c))
      throw std::logic_error("grid certificate: indicator Sobolev check failed");
    ++checked;
  }
  for (int trial = 0; trial < opt.sampled_functions; ++trial) {
    std::vector<Rational> f(grid.vertex_count());
    for (auto& v : f) v = Rational(static_cast<long>(rng() % 21) - 10);
    if (!grid_function_sobolev(fam, f, c))
      throw std::logic_error("grid certificate: function Sobolev check failed");
    ++checked;
  }
  return checked;
}

}  // namespace detail

// Distortion lower-bound certificate for TC(Gr_n): bound (n-1)/5760 with the
// canonical family constants, alpha_k = (C1 C2 C3)^{-1} per generation and
// Sobolev constant C4 (20 + 40 C2).
inline Certificate grid_certificate(int n, const GridCertifyOptions& opt = {}) {
  if (n < 2) throw std::invalid_argument("grid_certificate: n must be at least 2");
  Json payload{{"kind", "grid-cross"}, {"n", n}};

  const Rational c_sob =
      CrossMeasureFamily::c4() * (Rational(20) + Rational(40) * CrossMeasureFamily::c2());
  const Rational alpha = Rational(1) / (CrossMeasureFamily::c1() * CrossMeasureFamily::c2() *
                                        CrossMeasureFamily::c3());

  ConditionC1Evidence c1;
  c1.thickness_length_sum = Rational(1);  // |E| edges, thickness 1/|E|, unit lengths
  c1.sobolev_constant = QSqrt2(c_sob);
  ConditionC2Evidence c2;

  if (n <= opt.property_check_max_n) {
    CrossMeasureFamily fam = cross_measures(n);
    PropertyReport props = check_properties(fam);
    if (!props.all())
      throw std::logic_error("grid_certificate: family properties failed verification");
    long checked = detail::grid_c1_sample(fam, QSqrt2(c_sob), opt);
    c1.mode = "sampled";
    c1.witness_data = Json{{"method", "simply-connected-sample"},
                           {"checks", checked},
                           {"seed", opt.seed},
                           {"c1_achieved", to_string(props.c1_achieved)},
                           {"c2_achieved", to_string(props.c2_achieved)},
                           {"c3_achieved", to_string(props.c3_achieved)},
                           {"c4_achieved", to_string(props.c4_achieved)}};
    for (int k = 0; k <= n - 2; ++k) {
      C2PerClass cls;
      cls.k = k;
      cls.system_size = 1l << (2 * k);
      cls.alpha = alpha;
      if (cls.system_size <= opt.stored_system_max) {
        cls.system = walsh_system(static_cast<int>(cls.system_size));
        auto res = condition_c2_alpha(fam, k, cls.system, opt.c2_atom_budget);
        if (res.alpha_verified) {
          cls.mode = "exhaustive";
          cls.witness_data = Json{{"method", "exact-flows"},
                                  {"min_norm", to_string(*res.alpha_verified)}};
        } else {
          cls.mode = "cited";
          cls.witness_data = Json{{"method", "separated-additivity"}};
        }
      } else {
        cls.mode = "cited";
        cls.witness_data = Json{{"method", "separated-additivity"}};
      }
      c2.per_class.push_back(std::move(cls));
    }
  } else {
    c1.mode = "cited";
    c1.witness_data = Json{{"method", "theorem"}};
    for (int k = 0; k <= n - 2; ++k) {
      C2PerClass cls;
      cls.k = k;
      cls.system_size = 1l << (2 * k);
      cls.alpha = alpha;
      cls.mode = "cited";
      cls.witness_data = Json{{"method", "separated-additivity"}};
      c2.per_class.push_back(std::move(cls));
    }
  }

  Certificate cert = assemble("grid", std::move(payload), std::move(c1), std::move(c2));
  // sanity envelope: the claimed bound never crosses 1 + log2 |V|; since
  // |V| >= 4^n the envelope is at least 2n + 1
  Rational envelope(2l * n + 1);
  if (QSqrt2(envelope) < cert.claimed_bound)
    throw std::logic_error("grid_certificate: bound exceeds the log envelope");
  cert.checks.push_back(Json{{"name", "log-envelope"},
                             {"envelope_at_least", to_string(envelope)},
                             {"bound_decimal", cert.claimed_bound.to_double()}});
  return cert;
}

}  // namespace tclb
