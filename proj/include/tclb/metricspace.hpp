#pragma once

#include <map>
#include <vector>

#include "tclb/rational.hpp"
#include "tclb/stgraph.hpp"

namespace tclb {

// Finite metric space over vertex ids with an exact distance matrix.
class FiniteMetricSpace {
 public:
  // Checks the metric axioms exactly, including the full triangle sweep.
  FiniteMetricSpace(std::vector<VertexId> points, std::vector<std::vector<Rational>> dist)
      : FiniteMetricSpace(std::move(points), std::move(dist), Trusted{false}) {}

  // Shortest-path distances form a metric by construction, so the cubic
  // triangle sweep is skipped for graph-derived spaces.
  static FiniteMetricSpace from_graph(const StGraph& g) {
    return FiniteMetricSpace(g.vertices(), distance_matrix(g), Trusted{true});
  }

  const std::vector<VertexId>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool has_point(VertexId v) const { return index_.count(v) != 0; }
  int point_index(VertexId v) const {
    auto it = index_.find(v);
    if (it == index_.end())
      throw std::invalid_argument("metric: unknown point id " + std::to_string(v));
    return it->second;
  }

  const Rational& d(VertexId u, VertexId v) const {
    return dist_[point_index(u)][point_index(v)];
  }

 private:
  struct Trusted {
    bool trusted;
  };

  FiniteMetricSpace(std::vector<VertexId> points, std::vector<std::vector<Rational>> dist,
                    Trusted t)
      : points_(std::move(points)), dist_(std::move(dist)) {
    const std::size_t n = points_.size();
    if (dist_.size() != n) throw std::invalid_argument("metric: matrix size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      if (dist_[i].size() != n) throw std::invalid_argument("metric: matrix row size mismatch");
      index_[points_[i]] = static_cast<int>(i);
    }
    if (index_.size() != n) throw std::invalid_argument("metric: duplicate point");
    for (std::size_t i = 0; i < n; ++i) {
      if (dist_[i][i] != 0) throw std::invalid_argument("metric: nonzero diagonal");
      for (std::size_t j = 0; j < n; ++j) {
        if (dist_[i][j] != dist_[j][i]) throw std::invalid_argument("metric: asymmetric");
        if (i != j && dist_[i][j] <= 0)
          throw std::invalid_argument("metric: nonpositive distance between distinct points");
      }
    }
    if (t.trusted) return;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          if (dist_[i][k] > dist_[i][j] + dist_[j][k])
            throw std::invalid_argument("metric: triangle inequality fails");
  }

  std::vector<VertexId> points_;
  std::vector<std::vector<Rational>> dist_;
  std::map<VertexId, int> index_;
};

}  // namespace tclb
