#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "tclb/measure.hpp"
#include "tclb/metricspace.hpp"
#include "tclb/mincostflow.hpp"
#include "tclb/stgraph.hpp"

namespace tclb {

struct TransportPlan {
  struct Move {
    VertexId from, to;
    Rational amount;  // > 0
  };
  std::vector<Move> moves;

  SignedMeasure induced_measure() const {
    std::map<VertexId, Rational> a;
    Rational zero(0);
    for (const auto& m : moves) {
      a[m.from] += m.amount;
      a[m.to] -= m.amount;
    }
    return SignedMeasure(std::move(a));
  }

  template <class DistFn>
  Rational cost(DistFn&& d) const {
    Rational c(0);
    for (const auto& m : moves) c += m.amount * d(m.from, m.to);
    return c;
  }
};

struct LipschitzWitness {
  std::map<VertexId, Rational> values;
  Rational claimed_constant = Rational(1);
};

struct TransportResult {
  Rational cost;
  TransportPlan plan;
  LipschitzWitness dual;
};

namespace detail {

// Transportation solve over an explicit metric: bipartite network from the
// positive part to the negative part with costs d(x, y). The dual witness is
// rebuilt from the optimal potentials as f(p) = min_j (d(p, y_j) - beta_j),
// which is 1-Lipschitz by construction and integrates to the optimal cost.
template <class DistFn>
TransportResult tc_norm_impl(const std::vector<VertexId>& points, DistFn&& d,
                             const SignedMeasure& mu) {
  TransportResult res;
  res.cost = Rational(0);
  if (mu.is_zero()) {
    for (VertexId p : points) res.dual.values[p] = Rational(0);
    return res;
  }

  std::vector<std::pair<VertexId, Rational>> pos, neg;
  for (const auto& [v, q] : mu.atoms()) {
    if (q > 0)
      pos.push_back({v, q});
    else
      neg.push_back({v, -q});
  }

  const int np = static_cast<int>(pos.size()), nn = static_cast<int>(neg.size());
  MinCostFlow mcf(np + nn);
  std::vector<std::vector<int>> arc_id(np, std::vector<int>(nn));
  for (int i = 0; i < np; ++i) mcf.set_supply(i, pos[i].second);
  for (int j = 0; j < nn; ++j) mcf.set_supply(np + j, -neg[j].second);
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < nn; ++j)
      arc_id[i][j] = mcf.add_arc(i, np + j, d(pos[i].first, neg[j].first));

  res.cost = mcf.solve();

  for (int i = 0; i < np; ++i)
    for (int j = 0; j < nn; ++j)
      if (mcf.flow(arc_id[i][j]) > 0)
        res.plan.moves.push_back({pos[i].first, neg[j].first, mcf.flow(arc_id[i][j])});

  const auto& pot = mcf.potentials();
  for (VertexId p : points) {
    Rational best;
    bool first = true;
    for (int j = 0; j < nn; ++j) {
      Rational cand = d(p, neg[j].first) - pot[np + j];
      if (first || cand < best) {
        best = cand;
        first = false;
      }
    }
    res.dual.values[p] = best;
  }
  if (mu.integrate(res.dual.values) != res.cost)
    throw std::logic_error("tc_norm: dual witness does not certify the optimum");
  if (res.plan.cost(d) != res.cost)
    throw std::logic_error("tc_norm: plan cost mismatch");
  return res;
}

}  // namespace detail

// Transportation cost norm on a finite metric space.
inline TransportResult tc_norm(const FiniteMetricSpace& space, const SignedMeasure& mu) {
  for (const auto& [v, q] : mu.atoms()) {
    (void)q;
    if (!space.has_point(v))
      throw std::invalid_argument("tc_norm: measure supported outside the space");
  }
  return detail::tc_norm_impl(
      space.points(), [&](VertexId u, VertexId v) { return space.d(u, v); }, mu);
}

// Same, with distances supplied by a callable (used by the grid, whose l1
// metric is cheaper computed than tabulated).
template <class DistFn>
TransportResult tc_norm_metric(const std::vector<VertexId>& points, DistFn&& d,
                               const SignedMeasure& mu) {
  return detail::tc_norm_impl(points, std::forward<DistFn>(d), mu);
}

// Independent edge-flow formulation on a graph: minimize sum_e d(e) |flow(e)|
// subject to divergence(flow) = mu, over symmetrized edges. Agrees exactly
// with tc_norm on the induced metric space.
inline TransportResult tc_norm_graph(const StGraph& g, const SignedMeasure& mu) {
  for (const auto& [v, q] : mu.atoms()) {
    (void)q;
    if (!g.has_vertex(v))
      throw std::invalid_argument("tc_norm_graph: measure supported outside the graph");
  }
  TransportResult res;
  res.cost = Rational(0);
  if (mu.is_zero()) {
    for (VertexId v : g.vertices()) res.dual.values[v] = Rational(0);
    return res;
  }

  const int n = static_cast<int>(g.vertex_count());
  MinCostFlow mcf(n);
  struct ArcRef {
    int id;
    int from, to;  // vertex indices
  };
  std::vector<ArcRef> arcs;
  for (const auto& e : g.edges()) {
    int u = g.vertex_index(e.tail), v = g.vertex_index(e.head);
    arcs.push_back({mcf.add_arc(u, v, e.length), u, v});
    arcs.push_back({mcf.add_arc(v, u, e.length), v, u});
  }
  for (const auto& [v, q] : mu.atoms()) mcf.set_supply(g.vertex_index(v), q);

  res.cost = mcf.solve();

  // witness: negated potentials are 1-Lipschitz for the graph metric
  const auto& pot = mcf.potentials();
  for (int i = 0; i < n; ++i) res.dual.values[g.vertices()[i]] = -pot[i];
  if (mu.integrate(res.dual.values) != res.cost)
    throw std::logic_error("tc_norm_graph: dual witness does not certify the optimum");

  // plan: peel the arc flow into supply->demand paths; every flow-carrying
  // path is tight, so moving along it costs exactly the endpoint distance
  std::vector<std::vector<std::pair<int, int>>> out(n);  // (arc pos, to)
  std::vector<Rational> residual(arcs.size());
  for (std::size_t k = 0; k < arcs.size(); ++k) {
    residual[k] = mcf.flow(arcs[k].id);
    if (residual[k] > 0) out[arcs[k].from].push_back({static_cast<int>(k), arcs[k].to});
  }
  std::vector<Rational> excess(n, Rational(0));
  for (const auto& [v, q] : mu.atoms()) excess[g.vertex_index(v)] = q;
  for (;;) {
    int src = -1;
    for (int v = 0; v < n; ++v)
      if (excess[v] > 0) {
        src = v;
        break;
      }
    if (src == -1) break;
    std::vector<int> path_arcs;
    int v = src;
    Rational cap = excess[src];
    std::vector<char> seen(n, 0);
    while (excess[v] >= 0) {
      if (seen[v]) throw std::logic_error("tc_norm_graph: cycle in optimal flow");
      seen[v] = 1;
      int pick = -1;
      for (auto& [k, w] : out[v]) {
        (void)w;
        if (residual[k] > 0) {
          pick = k;
          break;
        }
      }
      if (pick == -1) throw std::logic_error("tc_norm_graph: flow decomposition stuck");
      path_arcs.push_back(pick);
      cap = std::min(cap, residual[pick]);
      v = arcs[pick].to;
    }
    Rational deficit = -excess[v];
    cap = std::min(cap, deficit);
    for (int k : path_arcs) residual[k] -= cap;
    excess[src] -= cap;
    excess[v] += cap;
    res.plan.moves.push_back({g.vertices()[src], g.vertices()[v], cap});
  }
  auto metric_d = [&](VertexId a, VertexId b) { return geodesic_distance(g, a, b); };
  if (res.plan.cost(metric_d) != res.cost)
    throw std::logic_error("tc_norm_graph: plan cost mismatch");
  if (!(res.plan.induced_measure() == mu))
    throw std::logic_error("tc_norm_graph: plan does not realize the measure");
  return res;
}

inline bool verify_lipschitz(const FiniteMetricSpace& space, const LipschitzWitness& w) {
  for (VertexId v : space.points())
    if (!w.values.count(v))
      throw std::invalid_argument("verify_lipschitz: witness missing a point value");
  const auto& pts = space.points();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      Rational gap = rational_abs(w.values.at(pts[i]) - w.values.at(pts[j]));
      if (gap > w.claimed_constant * space.d(pts[i], pts[j])) return false;
    }
  return true;
}

// McShane extension f(v) = min_u (partial(u) + d(u, v)).
inline LipschitzWitness mcshane_extend(const FiniteMetricSpace& space,
                                       const std::map<VertexId, Rational>& partial) {
  if (partial.empty()) throw std::invalid_argument("mcshane_extend: empty domain");
  for (auto it = partial.begin(); it != partial.end(); ++it) {
    if (!space.has_point(it->first))
      throw std::invalid_argument("mcshane_extend: domain point outside the space");
    for (auto jt = std::next(it); jt != partial.end(); ++jt)
      if (rational_abs(it->second - jt->second) > space.d(it->first, jt->first))
        throw std::invalid_argument("mcshane_extend: partial function is not 1-Lipschitz");
  }
  LipschitzWitness w;
  for (VertexId v : space.points()) {
    Rational best;
    bool first = true;
    for (const auto& [u, fu] : partial) {
      Rational cand = fu + space.d(u, v);
      if (first || cand < best) {
        best = cand;
        first = false;
      }
    }
    w.values[v] = best;
  }
  return w;
}

struct AdditivityCheck {
  Rational lhs, rhs;
  bool ok;
};

// Separated-support additivity lower bound:
// || sum g_i mu_i || >= (A B)^{-1} sum |g_i| ||mu_i||  when every support has
// diameter <= A and distinct supports are >= 1/B apart.
inline AdditivityCheck additivity_lower_bound(const FiniteMetricSpace& space,
                                              const std::vector<SignedMeasure>& family,
                                              const std::vector<Rational>& g,
                                              const Rational& a_diam,
                                              const Rational& b_sep_inv) {
  if (family.size() != g.size())
    throw std::invalid_argument("additivity_lower_bound: size mismatch");
  if (a_diam <= 0 || b_sep_inv <= 0)
    throw std::invalid_argument("additivity_lower_bound: nonpositive A or B");
  std::vector<std::vector<VertexId>> supports;
  for (const auto& mu : family) {
    if (mu.is_zero())
      throw std::invalid_argument("additivity_lower_bound: zero measure in family");
    supports.push_back(mu.support());
    for (std::size_t i = 0; i < supports.back().size(); ++i)
      for (std::size_t j = i + 1; j < supports.back().size(); ++j)
        if (space.d(supports.back()[i], supports.back()[j]) > a_diam)
          throw std::invalid_argument("additivity_lower_bound: support diameter exceeds A");
  }
  Rational min_sep = Rational(1) / b_sep_inv;
  for (std::size_t i = 0; i < supports.size(); ++i)
    for (std::size_t j = i + 1; j < supports.size(); ++j)
      for (VertexId u : supports[i])
        for (VertexId v : supports[j])
          if (space.d(u, v) < min_sep)
            throw std::invalid_argument("additivity_lower_bound: supports closer than 1/B");

  SignedMeasure combo;
  Rational rhs(0);
  for (std::size_t i = 0; i < family.size(); ++i) {
    combo = combo + family[i] * g[i];
    if (g[i] != 0) rhs += rational_abs(g[i]) * tc_norm(space, family[i]).cost;
  }
  AdditivityCheck out;
  out.lhs = tc_norm(space, combo).cost;
  out.rhs = rhs / (a_diam * b_sep_inv);
  out.ok = out.lhs >= out.rhs;
  return out;
}

}  // namespace tclb
