#pragma once

#include <climits>
#include <random>
#include <vector>

#include "tclb/slashops.hpp"
#include "tclb/stgraph.hpp"

namespace tclb {

// Registry entry for one edge label of a development. Labels form a rooted
// tree: the root is the single edge of the trivial path, and replacing a
// label spawns one child per edge of the replacement graph. A label
// identifies the same combinatorial edge across all stages of its lifetime.
struct LabelInfo {
  int parent = -1;
  int slot = -1;  // index within the parent's replacement
  VertexId tail = 0, head = 0;
  Rational length, thickness;
  int birth = 0;
  int death = INT_MAX;  // label is in E^(n) for birth <= n < death
  bool cycle_replaced = false;
  std::vector<int> children;
  // populated when cycle_replaced: chosen far vertices and side heights
  VertexId x1 = -1, x2 = -1;
  Rational ht1, ht2;
};

struct DevEvent {
  int stage = 0;  // transforms G^(stage) into G^(stage+1)
  int label = 0;
  ElementarySpec elem;
};

// An elementary development: a sequence of graphs grown from the trivial
// path by single-edge replacements with elementary graphs. Vertex ids are
// stable across stages (0 = source, 1 = sink).
class Development {
 public:
  Development() {
    LabelInfo root;
    root.tail = 0;
    root.head = 1;
    root.length = Rational(1);
    root.thickness = Rational(1);
    labels_.push_back(std::move(root));
    vertex_count_ = 2;
  }

  int stages() const { return static_cast<int>(events_.size()) + 1; }
  int final_stage() const { return stages() - 1; }
  int label_count() const { return static_cast<int>(labels_.size()); }
  int vertex_count() const { return vertex_count_; }
  const LabelInfo& label(int id) const {
    if (id < 0 || id >= label_count())
      throw std::invalid_argument("Development: unknown edge label");
    return labels_[id];
  }
  const std::vector<DevEvent>& events() const { return events_; }
  const std::vector<int>& power_stages() const { return power_stages_; }
  const std::vector<int>& subdivision_stages() const { return subdivision_stages_; }

  bool alive_at(int id, int stage) const {
    const auto& l = labels_[id];
    return l.birth <= stage && stage < l.death;
  }

  std::vector<int> live_labels(int stage) const {
    check_stage(stage);
    std::vector<int> out;
    for (int id = 0; id < label_count(); ++id)
      if (alive_at(id, stage)) out.push_back(id);
    return out;
  }

  std::vector<int> cycle_labels() const {
    std::vector<int> out;
    for (int id = 0; id < label_count(); ++id)
      if (labels_[id].cycle_replaced) out.push_back(id);
    return out;
  }

  StGraph stage_graph(int stage) const {
    check_stage(stage);
    std::vector<VertexId> vertices;
    std::vector<DirectedEdge> edges;
    std::vector<char> present(vertex_count_, 0);
    present[0] = present[1] = 1;
    for (int id : live_labels(stage)) {
      const auto& l = labels_[id];
      present[l.tail] = present[l.head] = 1;
      edges.push_back({l.tail, l.head, l.length, l.thickness});
    }
    for (VertexId v = 0; v < vertex_count_; ++v)
      if (present[v]) vertices.push_back(v);
    return StGraph(std::move(vertices), std::move(edges), 0, 1);
  }

  StGraph final_graph() const { return stage_graph(final_stage()); }

  // Replaces a live label; returns the ids of the children, in slot order.
  std::vector<int> apply_event(int label_id, const ElementarySpec& spec) {
    spec.check();
    label(label_id);
    if (labels_[label_id].death != INT_MAX)
      throw std::invalid_argument("Development: label already replaced");
    const int stage = static_cast<int>(events_.size());
    if (labels_[label_id].birth > stage)
      throw std::logic_error("Development: label not yet born");
    labels_[label_id].death = stage + 1;
    labels_[label_id].cycle_replaced = spec.is_cycle;
    // copies: pushing children reallocates labels_
    const VertexId parent_tail = labels_[label_id].tail;
    const VertexId parent_head = labels_[label_id].head;
    const Rational parent_length = labels_[label_id].length;
    const Rational parent_thickness = labels_[label_id].thickness;

    const Rational th_factor = spec.is_cycle ? Rational(1, 2) : Rational(1);
    std::vector<int> children;
    int slot = 0;
    for (std::size_t side = 0; side < spec.sides.size(); ++side) {
      VertexId prev = parent_tail;
      Rational prefix(0);
      Rational best_height(0);
      VertexId best_vertex = -1;
      for (std::size_t i = 0; i < spec.sides[side].size(); ++i) {
        const bool last = (i + 1 == spec.sides[side].size());
        VertexId to = last ? parent_head : vertex_count_++;
        LabelInfo child;
        child.parent = label_id;
        child.slot = slot++;
        child.tail = prev;
        child.head = to;
        child.length = parent_length * spec.sides[side][i];
        child.thickness = parent_thickness * th_factor;
        child.birth = stage + 1;
        children.push_back(static_cast<int>(labels_.size()));
        labels_.push_back(std::move(child));
        if (!last) {
          prefix += spec.sides[side][i];
          Rational complement = Rational(1) - prefix;
          Rational height = std::min(prefix, complement);
          if (height > best_height) {
            best_height = height;
            best_vertex = to;
          }
        }
        prev = to;
      }
      if (spec.is_cycle) {
        // a farthest internal vertex of the side from {e^-, e^+}; ties go
        // to the smallest vertex id, which is the first one created
        if (side == 0) {
          labels_[label_id].x1 = best_vertex;
          labels_[label_id].ht1 = best_height;
        } else {
          labels_[label_id].x2 = best_vertex;
          labels_[label_id].ht2 = best_height;
        }
      }
    }
    labels_[label_id].children = children;
    events_.push_back({stage, label_id, spec});
    return children;
  }

  bool is_ancestor_or_equal(int ancestor, int descendant) const {
    for (int v = descendant; v != -1; v = labels_[v].parent)
      if (v == ancestor) return true;
    return false;
  }
  bool incomparable(int a, int b) const {
    return !is_ancestor_or_equal(a, b) && !is_ancestor_or_equal(b, a);
  }

  // E^(n)_{<= e}: the live labels at `stage` descending from `label`.
  std::vector<int> descendant_edges(int label_id, int stage) const {
    check_stage(stage);
    label(label_id);
    std::vector<int> out, stack = {label_id};
    while (!stack.empty()) {
      int id = stack.back();
      stack.pop_back();
      if (alive_at(id, stage)) out.push_back(id);
      for (int c : labels_[id].children) stack.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // Root-path of a label (sequence of slots); empty for the root.
  std::vector<int> label_path(int label_id) const {
    label(label_id);
    std::vector<int> path;
    for (int v = label_id; labels_[v].parent != -1; v = labels_[v].parent)
      path.push_back(labels_[v].slot);
    std::reverse(path.begin(), path.end());
    return path;
  }

  int label_by_path(const std::vector<int>& path) const {
    int id = 0;
    for (int slot : path) {
      const auto& ch = labels_[id].children;
      if (slot < 0 || slot >= static_cast<int>(ch.size()))
        throw std::invalid_argument("Development: no label with the given path");
      id = ch[slot];
    }
    return id;
  }

  // Per_A(E') = sum of thickness over boundary labels of A in E'.
  Rational perimeter(const std::vector<char>& in_a, const std::vector<int>& label_set) const {
    Rational s(0);
    for (int id : label_set) {
      const auto& l = label(id);
      if (static_cast<bool>(in_a[l.tail]) != static_cast<bool>(in_a[l.head])) s += l.thickness;
    }
    return s;
  }

  Rational perimeter_at_stage(const std::vector<char>& in_a, int stage) const {
    return perimeter(in_a, live_labels(stage));
  }

  // Per(A): by perimeter monotonicity the supremum over stages is attained
  // at the final stage of a stabilized development.
  Rational total_perimeter(const std::vector<char>& in_a) const {
    return perimeter_at_stage(in_a, final_stage());
  }

  // True iff every path between x1 and x2 in G^(stage) meets both
  // {f1^-, f1^+} and {f2^-, f2^+}. Requires f1, f2 incomparable and x1, x2
  // descendant vertices of f1, f2.
  bool check_bottleneck(int f1, int f2, VertexId x1, VertexId x2, int stage) const {
    if (!incomparable(f1, f2))
      throw std::invalid_argument("check_bottleneck: labels are comparable");
    if (!is_descendant_vertex(f1, x1) || !is_descendant_vertex(f2, x2))
      throw std::invalid_argument("check_bottleneck: not a descendant vertex");
    StGraph g = stage_graph(stage);
    auto blocks = [&](const LabelInfo& f) {
      if (x1 == f.tail || x1 == f.head || x2 == f.tail || x2 == f.head) return true;
      return !reachable_avoiding(g, x1, x2, f.tail, f.head);
    };
    return blocks(label(f1)) && blocks(label(f2));
  }

  // Deterministic random development for property sweeps.
  static Development random_development(std::uint64_t seed, int n_events) {
    std::mt19937_64 rng(seed);
    Development dev;
    auto random_side = [&](int k) {
      // k parts with dyadic lengths summing to 1: distinct cuts in (0,1)
      std::vector<int> cuts;
      while (static_cast<int>(cuts.size()) < k - 1) {
        int c = 1 + static_cast<int>(rng() % 7);  // eighths
        bool dup = false;
        for (int c0 : cuts) dup |= (c0 == c);
        if (!dup) cuts.push_back(c);
      }
      cuts.push_back(0);
      cuts.push_back(8);
      std::sort(cuts.begin(), cuts.end());
      std::vector<Rational> side;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        side.push_back(make_rational(cuts[i + 1] - cuts[i], 8));
      return side;
    };
    for (int i = 0; i < n_events; ++i) {
      auto live = dev.live_labels(dev.final_stage());
      int target = live[rng() % live.size()];
      ElementarySpec spec;
      if (rng() % 2 == 0) {
        spec.is_cycle = false;
        spec.sides = {random_side(2 + static_cast<int>(rng() % 2))};
      } else {
        spec.is_cycle = true;
        spec.sides = {random_side(2 + static_cast<int>(rng() % 2)),
                      random_side(2 + static_cast<int>(rng() % 2))};
      }
      dev.apply_event(target, spec);
    }
    return dev;
  }

 private:
  void check_stage(int stage) const {
    if (stage < 0 || stage >= stages())
      throw std::invalid_argument("Development: stage out of range");
  }

  bool is_descendant_vertex(int f, VertexId x) const {
    std::vector<int> stack = {f};
    while (!stack.empty()) {
      int id = stack.back();
      stack.pop_back();
      if (labels_[id].tail == x || labels_[id].head == x) return true;
      for (int c : labels_[id].children) stack.push_back(c);
    }
    return false;
  }

  static bool reachable_avoiding(const StGraph& g, VertexId from, VertexId to,
                                 VertexId ban1, VertexId ban2) {
    const auto& adj = g.adjacency();
    std::vector<char> seen(adj.size(), 0);
    int b1 = g.vertex_index(ban1), b2 = g.vertex_index(ban2);
    std::vector<int> stack = {g.vertex_index(from)};
    seen[stack[0]] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      if (v == g.vertex_index(to)) return true;
      for (const auto& [w, k] : adj[v]) {
        (void)k;
        if (w == b1 || w == b2 || seen[w]) continue;
        seen[w] = 1;
        stack.push_back(w);
      }
    }
    return false;
  }

  std::vector<LabelInfo> labels_;
  std::vector<DevEvent> events_;
  int vertex_count_ = 0;
  std::vector<int> power_stages_;        // filled by develop()
  std::vector<int> subdivision_stages_;  // stage of each (cwh^m)_sub

  friend Development develop(const CycleWithHandles& cwh, int n);
};

// Builds the elementary development whose stages pass through every slash
// power cwh^{circled m} for m <= n, with the subdivision pass interlacing
// each cycle pass. Identity replacements by a trivial handle path are
// skipped, so for the diamond the cycle pass acts on the power's own edges.
inline Development develop(const CycleWithHandles& cwh, int n) {
  if (n < 0) throw std::invalid_argument("develop: negative power");
  Development dev;
  dev.power_stages_ = {0};
  const bool trivial_pa = cwh.pa.is_trivial();
  for (int m = 0; m < n; ++m) {
    std::vector<int> rep_labels;
    if (trivial_pa) {
      rep_labels = dev.live_labels(dev.final_stage());
    } else {
      for (int id : dev.live_labels(dev.final_stage())) {
        auto children = dev.apply_event(id, cwh.pa);
        rep_labels.push_back(children[cwh.e_rep_index]);
      }
    }
    dev.subdivision_stages_.push_back(dev.final_stage());
    for (int id : rep_labels) dev.apply_event(id, cwh.cy);
    dev.power_stages_.push_back(dev.final_stage());
  }
  return dev;
}

}  // namespace tclb
