#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tclb/stgraph.hpp"

namespace tclb {

namespace detail {

struct CanonState {
  const StGraph* g;
  std::vector<std::vector<std::pair<int, int>>> out, in;  // (neighbor idx, edge idx)

  // Refine colors by neighborhood signatures until stable; colors are
  // renumbered 0.. in signature order so the result is canonical.
  void refine(std::vector<long>& color) const {
    const int n = static_cast<int>(color.size());
    for (;;) {
      using Sig = std::pair<long, std::vector<std::tuple<int, std::string, std::string, long>>>;
      std::vector<Sig> sigs(n);
      for (int v = 0; v < n; ++v) {
        sigs[v].first = color[v];
        for (auto& [w, k] : out[v])
          sigs[v].second.push_back({0, g->edges()[k].length.get_str(),
                                    g->edges()[k].thickness.get_str(), color[w]});
        for (auto& [w, k] : in[v])
          sigs[v].second.push_back({1, g->edges()[k].length.get_str(),
                                    g->edges()[k].thickness.get_str(), color[w]});
        std::sort(sigs[v].second.begin(), sigs[v].second.end());
      }
      std::map<Sig, long> rank;
      for (int v = 0; v < n; ++v) rank[sigs[v]] = 0;
      long next = 0;
      for (auto& [sig, r] : rank) r = next++;
      bool changed = false;
      for (int v = 0; v < n; ++v) {
        long nc = rank[sigs[v]];
        changed |= (nc != color[v]);
        color[v] = nc;
      }
      long classes = next;
      if (!changed || classes == n) return;
    }
  }

  std::string serialize(const std::vector<long>& color) const {
    const int n = static_cast<int>(color.size());
    std::vector<int> rank(n);
    {
      std::vector<int> order(n);
      for (int i = 0; i < n; ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](int a, int b) { return color[a] < color[b]; });
      for (int i = 0; i < n; ++i) rank[order[i]] = i;
    }
    std::vector<std::string> lines;
    for (const auto& e : g->edges())
      lines.push_back(std::to_string(rank[g->vertex_index(e.tail)]) + ">" +
                      std::to_string(rank[g->vertex_index(e.head)]) + ":" +
                      e.length.get_str() + ":" + e.thickness.get_str());
    std::sort(lines.begin(), lines.end());
    std::string out_str = "V" + std::to_string(n) + ";s" +
                          std::to_string(rank[g->vertex_index(g->source())]) + ";t" +
                          std::to_string(rank[g->vertex_index(g->sink())]);
    for (auto& l : lines) out_str += ";" + l;
    return out_str;
  }

  // Individualize-and-refine: on a non-discrete partition, split the first
  // non-singleton cell on each of its members and keep the lexicographically
  // smallest completion.
  std::string canon(std::vector<long> color) const {
    refine(color);
    const int n = static_cast<int>(color.size());
    std::map<long, std::vector<int>> cells;
    for (int v = 0; v < n; ++v) cells[color[v]].push_back(v);
    const std::vector<int>* split = nullptr;
    for (auto& [c, members] : cells)
      if (members.size() > 1) {
        split = &members;
        break;
      }
    if (!split) return serialize(color);
    std::string best;
    for (int v : *split) {
      std::vector<long> next(color);
      for (long& c : next) c *= 2;
      next[v] += 1;
      std::string s = canon(std::move(next));
      if (best.empty() || s < best) best = s;
    }
    return best;
  }
};

}  // namespace detail

// Canonical form of an st-graph under isomorphisms fixing source and sink
// and preserving lengths and thicknesses.
inline std::string canonical_form(const StGraph& g) {
  detail::CanonState st;
  st.g = &g;
  const int n = static_cast<int>(g.vertex_count());
  st.out.assign(n, {});
  st.in.assign(n, {});
  for (std::size_t k = 0; k < g.edge_count(); ++k) {
    const auto& e = g.edges()[k];
    st.out[g.vertex_index(e.tail)].push_back({g.vertex_index(e.head), static_cast<int>(k)});
    st.in[g.vertex_index(e.head)].push_back({g.vertex_index(e.tail), static_cast<int>(k)});
  }
  std::vector<long> color(n, 0);
  color[g.vertex_index(g.source())] = 1;
  color[g.vertex_index(g.sink())] = 2;
  return st.canon(std::move(color));
}

namespace detail {

// Colors both graphs with the same refinement and returns per-vertex colors,
// or nothing when the color class sizes already rule an isomorphism out.
inline std::optional<std::pair<std::vector<long>, std::vector<long>>> joint_refine(
    const StGraph& a, const StGraph& b) {
  const int n = static_cast<int>(a.vertex_count());
  auto signature_pass = [&](const StGraph& g, std::vector<long>& color) {
    using Sig = std::pair<long, std::vector<std::tuple<int, std::string, std::string, long>>>;
    std::vector<Sig> sigs(n);
    for (std::size_t k = 0; k < g.edge_count(); ++k) {
      const auto& e = g.edges()[k];
      int u = g.vertex_index(e.tail), v = g.vertex_index(e.head);
      sigs[u].second.push_back({0, e.length.get_str(), e.thickness.get_str(), color[v]});
      sigs[v].second.push_back({1, e.length.get_str(), e.thickness.get_str(), color[u]});
    }
    for (int v = 0; v < n; ++v) {
      sigs[v].first = color[v];
      std::sort(sigs[v].second.begin(), sigs[v].second.end());
    }
    return sigs;
  };
  std::vector<long> ca(n, 0), cb(n, 0);
  ca[a.vertex_index(a.source())] = 1;
  ca[a.vertex_index(a.sink())] = 2;
  cb[b.vertex_index(b.source())] = 1;
  cb[b.vertex_index(b.sink())] = 2;
  for (;;) {
    auto sa = signature_pass(a, ca);
    auto sb = signature_pass(b, cb);
    std::map<std::decay_t<decltype(sa[0])>, long> rank;
    for (int v = 0; v < n; ++v) {
      rank[sa[v]] = 0;
      rank[sb[v]] = 0;
    }
    long next = 0;
    for (auto& [sig, r] : rank) (void)sig, r = next++;
    bool changed = false;
    std::map<long, int> count_a, count_b;
    for (int v = 0; v < n; ++v) {
      long na = rank[sa[v]], nb = rank[sb[v]];
      changed |= (na != ca[v]) || (nb != cb[v]);
      ca[v] = na;
      cb[v] = nb;
      ++count_a[na];
      ++count_b[nb];
    }
    if (count_a != count_b) return std::nullopt;
    if (!changed) return std::make_pair(ca, cb);
  }
}

}  // namespace detail

// Isomorphism respecting source, sink, lengths and thicknesses. Uses joint
// partition refinement for pruning and backtracking to complete a map; on
// symmetric graphs the first consistent branch succeeds, which keeps this
// usable where a canonical form would have to enumerate automorphisms.
inline bool isomorphic(const StGraph& a, const StGraph& b) {
  if (a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count()) return false;
  auto colors = detail::joint_refine(a, b);
  if (!colors) return false;
  const int n = static_cast<int>(a.vertex_count());
  auto& [ca, cb] = *colors;

  // directed edge data between vertex indices, as sorted multisets
  auto edge_table = [&](const StGraph& g) {
    std::map<std::pair<int, int>, std::vector<std::string>> t;
    for (const auto& e : g.edges())
      t[{g.vertex_index(e.tail), g.vertex_index(e.head)}].push_back(
          e.length.get_str() + ":" + e.thickness.get_str());
    for (auto& [key, v] : t) (void)key, std::sort(v.begin(), v.end());
    return t;
  };
  auto ta = edge_table(a), tb = edge_table(b);

  // map vertices in order of ascending color class size (most constrained first)
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::map<long, int> class_size;
  for (int v = 0; v < n; ++v) ++class_size[ca[v]];
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    if (class_size[ca[x]] != class_size[ca[y]]) return class_size[ca[x]] < class_size[ca[y]];
    if (ca[x] != ca[y]) return ca[x] < ca[y];
    return x < y;
  });

  std::vector<int> image(n, -1);
  std::vector<char> used(n, 0);
  std::function<bool(int)> place = [&](int pos) {
    if (pos == n) return true;
    int va = order[pos];
    for (int vb = 0; vb < n; ++vb) {
      if (used[vb] || cb[vb] != ca[va]) continue;
      bool ok = true;
      for (int prev = 0; prev < pos && ok; ++prev) {
        int ua = order[prev], ub = image[ua];
        for (auto [x, y] : {std::pair{va, ua}, {ua, va}}) {
          auto ita = ta.find({x, y});
          auto itb = tb.find({x == va ? vb : ub, y == va ? vb : ub});
          bool ea = ita != ta.end(), eb = itb != tb.end();
          if (ea != eb || (ea && ita->second != itb->second)) {
            ok = false;
            break;
          }
        }
      }
      if (!ok) continue;
      image[va] = vb;
      used[vb] = 1;
      if (place(pos + 1)) return true;
      image[va] = -1;
      used[vb] = 0;
    }
    return false;
  };
  return place(0);
}

}  // namespace tclb
