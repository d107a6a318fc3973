#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "tclb/certify.hpp"
#include "tclb/grid.hpp"

using namespace tclb;

TEST_CASE("grid counts and metric") {
  GridGraph g2 = make_grid(2);
  CHECK(g2.vertex_count() == 25);
  CHECK(g2.edge_count() == 40);
  GridGraph g3 = make_grid(3);
  CHECK(g3.vertex_count() == 81);
  CHECK(g3.edge_count() == 144);
  CHECK_THROWS_AS(make_grid(1), std::invalid_argument);
  for (int n = 2; n <= 5; ++n) {
    GridGraph g = make_grid(n);
    CHECK(g.edge_count() == (2l << n) * ((1l << n) + 1));
    CHECK(g.distance(g.vid(0, 0), g.vid(g.side() - 1, g.side() - 1)) == rational_pow2(n + 1));
  }
  // uniform thickness normalizes exactly
  CHECK(thickness_length_sum(g2.to_graph()) == 1);
}

TEST_CASE("cross measures have canceling centers and dyadic supports") {
  for (int n = 2; n <= 3; ++n) {
    auto fam = cross_measures(n);
    long expected = 0;
    for (int k = 0; k <= n - 2; ++k) expected += 1l << (2 * k);
    CHECK(static_cast<long>(fam.measures().size()) == expected);
    for (const auto& m : fam.measures()) {
      int k = m.index.generation();
      // support = two lines sharing a canceled center
      CHECK(static_cast<long>(m.measure.support().size()) ==
            2 * ((1l << (n - k - 1)) + 1) - 2);
      CHECK(m.measure.at(m.center) == 0);
      Rational total(0);
      for (const auto& [v, q] : m.measure.atoms()) (void)v, total += q;
      CHECK(total == 0);
    }
  }
}

TEST_CASE("cross measure of the whole grid matches the center cross") {
  GridGraph grid(2);
  auto fam = cross_measures(2);
  REQUIRE(fam.measures().size() == 1);
  const auto& m = fam.measures()[0];
  CHECK(m.center == grid.vid(2, 2));
  CHECK(m.measure.at(grid.vid(2, 1)) == Rational(1, 16));
  CHECK(m.measure.at(grid.vid(2, 3)) == Rational(1, 16));
  CHECK(m.measure.at(grid.vid(1, 2)) == Rational(-1, 16));
  CHECK(m.measure.at(grid.vid(3, 2)) == Rational(-1, 16));
  CHECK(m.measure.support().size() == 4);
  // exact transportation cost: both positive atoms travel distance 2
  auto res = tc_norm_metric(m.measure.support(),
                            [&](VertexId u, VertexId v) { return grid.distance(u, v); },
                            m.measure);
  CHECK(res.cost == Rational(1, 4));
  CHECK(res.cost >= Rational(1, 8));  // the additive lower bound from the proof
}

TEST_CASE("family properties hold with the canonical constants") {
  for (int n = 2; n <= 3; ++n) {
    auto fam = cross_measures(n);
    auto rep = check_properties(fam);
    INFO("n=" << n << " C1=" << rep.c1_achieved.get_str() << " C2=" << rep.c2_achieved.get_str()
              << " C3=" << rep.c3_achieved.get_str() << " C4=" << rep.c4_achieved.get_str());
    CHECK(rep.all());
    CHECK(rep.c1_achieved <= Rational(1, 2));
    CHECK(rep.c2_achieved <= Rational(4));
    CHECK(rep.c3_achieved <= Rational(16));
    CHECK(rep.c4_achieved <= Rational(2));
    // every norm beats 4^{-k}/16
    for (const auto& m : fam.measures()) {
      Rational norm = rep.tc_norms.at(m.index.str());
      CHECK(norm >= make_rational(1, mpz_class(1) << (2 * m.index.generation())) / 16);
    }
  }
}

TEST_CASE("walsh systems") {
  CHECK(walsh_system(1).rows == std::vector<std::vector<std::int8_t>>{{1}});
  auto w2 = walsh_system(2);
  CHECK(w2.rows == std::vector<std::vector<std::int8_t>>{{1, 1}, {1, -1}});
  for (int m : {4, 8, 16}) {
    auto sys = walsh_system(m);
    CHECK(sys.verify_orthogonal());
    // Gram matrix = m * identity
    for (int i = 0; i < m; ++i) {
      long self = 0;
      for (int t = 0; t < m; ++t) self += sys.rows[i][t] * sys.rows[i][t];
      CHECK(self == m);
    }
  }
  CHECK_THROWS_AS(walsh_system(3), std::invalid_argument);
  CHECK_THROWS_AS(walsh_system(0), std::invalid_argument);
}

TEST_CASE("condition (C2) verified exactly on small grids") {
  for (int n = 2; n <= 3; ++n) {
    auto fam = cross_measures(n);
    for (int k = 0; k <= n - 2; ++k) {
      auto sys = walsh_system(1 << (2 * k));
      auto res = condition_c2_alpha(fam, k, sys);
      CHECK(res.alpha_claimed == Rational(1, 32));
      REQUIRE(res.alpha_verified.has_value());
      CHECK(*res.alpha_verified >= res.alpha_claimed);
    }
  }
  auto fam = cross_measures(2);
  CHECK_THROWS_AS(condition_c2_alpha(fam, 0, walsh_system(4)), std::invalid_argument);
}

TEST_CASE("parseval step with cleared denominators") {
  // sum_i (int f d nu~_i)^2 <= |M_k| sum_t (int f d mu_t)^2
  auto fam = cross_measures(3);
  GridGraph grid(3);
  std::mt19937_64 rng(17);
  auto gen = fam.generation(1);
  auto sys = walsh_system(4);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Rational> f(grid.vertex_count());
    for (auto& v : f) v = Rational(static_cast<long>(rng() % 13) - 6);
    Rational lhs(0), rhs(0);
    for (int i = 0; i < sys.size; ++i) {
      Rational integral(0);
      for (int t = 0; t < sys.size; ++t)
        for (const auto& [v, q] : gen[t]->measure.atoms())
          integral += Rational(static_cast<int>(sys.rows[i][t])) * q * f[v];
      lhs += integral * integral;
    }
    for (int t = 0; t < sys.size; ++t) {
      Rational integral(0);
      for (const auto& [v, q] : gen[t]->measure.atoms()) integral += q * f[v];
      rhs += integral * integral;
    }
    CHECK(lhs <= Rational(4) * rhs);
  }
}

TEST_CASE("simply connected enumeration on tiny graphs") {
  // path on 3 vertices: {a}, {c}, {ab}, {bc}
  AdjacencyGraph path;
  path.n = 3;
  path.nbr = {0b010, 0b101, 0b010};
  std::vector<std::uint64_t> sets;
  enumerate_simply_connected(path, 25, [&](std::uint64_t s) { sets.push_back(s); });
  CHECK(sets.size() == 4);

  // 4-cycle: 4 singletons, 4 adjacent pairs, and (by complement closure)
  // the 4 triples
  AdjacencyGraph cyc;
  cyc.n = 4;
  cyc.nbr = {0b1010, 0b0101, 0b1010, 0b0101};
  sets.clear();
  std::set<std::uint64_t> uniq;
  enumerate_simply_connected(cyc, 25, [&](std::uint64_t s) {
    sets.push_back(s);
    uniq.insert(s);
  });
  CHECK(sets.size() == 12);
  CHECK(uniq.size() == 12);
  // complement closure
  for (std::uint64_t s : sets) CHECK(uniq.count(0b1111ull & ~s));

  CHECK_THROWS_AS(enumerate_simply_connected(cyc, 3, [](std::uint64_t) {}),
                  std::invalid_argument);
}

TEST_CASE("simply connected enumeration agrees with brute force on the grid") {
  GridGraph grid(2);
  auto adj = AdjacencyGraph::from_grid(grid);
  long count = 0;
  enumerate_simply_connected(adj, 25, [&](std::uint64_t) { ++count; });
  CHECK(count == 32426);  // brute-force reference over all 2^25 subsets
}

TEST_CASE("sobolev ratio basics") {
  auto fam = cross_measures(2);
  GridGraph grid(2);
  // single corner vertex: boundary two edges
  std::vector<char> corner(grid.vertex_count(), 0);
  corner[grid.vid(0, 0)] = 1;
  auto r = sobolev_ratio(fam, corner);
  CHECK(r.rhs == Rational(1, 20));
  CHECK(r.per_generation_squares.empty());  // mu vanishes on the corner
  CHECK(r.certified_le(QSqrt2(Rational(180))));

  // a set capturing one positive atom
  std::vector<char> atom_set(grid.vertex_count(), 0);
  atom_set[grid.vid(2, 1)] = 1;
  auto r2 = sobolev_ratio(fam, atom_set);
  REQUIRE(r2.per_generation_squares.size() == 1);
  CHECK(r2.per_generation_squares[0].second == Rational(1, 256));
  CHECK(r2.certified_le(QSqrt2(Rational(180))));
}

TEST_CASE("planar topology checks") {
  GridGraph grid(2);
  // left half: x <= 1
  std::vector<char> half(grid.vertex_count(), 0);
  for (int y = 0; y < grid.side(); ++y)
    for (int x = 0; x <= 1; ++x) half[grid.vid(x, y)] = 1;
  auto rep = planar_topology_checks(grid, half);
  CHECK(rep.vertex_boundary_connected);
  CHECK(rep.vertex_boundary.size() == 10);  // two full columns
  CHECK(rep.edge_vertex_bound);
  CHECK(rep.diameter_bound);

  // single vertex: diam(A)=0
  std::vector<char> one(grid.vertex_count(), 0);
  one[grid.vid(1, 1)] = 1;
  auto rep1 = planar_topology_checks(grid, one);
  CHECK(rep1.diameter_bound);
  CHECK(rep1.edge_vertex_bound);

  // supplied separated set
  std::vector<VertexId> s = {grid.vid(0, 0), grid.vid(0, 4)};
  auto rep2 = planar_topology_checks(grid, half, std::make_pair(4l, s));
  REQUIRE(rep2.separated_bound.has_value());
  CHECK(*rep2.separated_bound);
}

TEST_CASE("extreme point test") {
  StGraph g = diamond().to_st_graph();
  std::vector<Rational> nu(g.edge_count(), Rational(1, 8));
  // indicator of the simply connected set {source}, normalized: boundary
  // mass is 2 * 1/8 = 1/4, so f = 4 * 1_{source}
  std::map<VertexId, Rational> f;
  for (VertexId v : g.vertices()) f[v] = (v == g.source()) ? Rational(4) : Rational(0);
  CHECK(extreme_point_test(g, nu, f));
  // constant function has norm 0
  std::map<VertexId, Rational> c;
  for (VertexId v : g.vertices()) c[v] = Rational(3);
  CHECK(!extreme_point_test(g, nu, c));
  // three-valued function of norm 1 on a path of 4 vertices
  StGraph path({0, 1, 2, 3},
               {{0, 2, Rational(1, 3), Rational(1)},
                {2, 3, Rational(1, 3), Rational(1)},
                {3, 1, Rational(1, 3), Rational(1)}},
               0, 1);
  std::vector<Rational> nu_p(3, Rational(1));
  std::map<VertexId, Rational> three = {
      {0, Rational(0)}, {2, Rational(1, 2)}, {3, Rational(1)}, {1, Rational(1)}};
  Rational norm = rational_abs(three[2] - three[0]) + rational_abs(three[3] - three[2]) +
                  rational_abs(three[1] - three[3]);
  REQUIRE(norm == 1);
  CHECK(!extreme_point_test(path, nu_p, three));
}

TEST_CASE("grid certificates carry the closed-form bound") {
  auto c2 = grid_certificate(2);
  CHECK(c2.claimed_bound == QSqrt2(Rational(1, 5760)));
  CHECK(c2.theorem == "grid");
  auto c11 = grid_certificate(11);
  CHECK(c11.claimed_bound == QSqrt2(make_rational(10, 5760)));
  CHECK(c11.claimed_bound == QSqrt2(Rational(1, 576)));
  for (const auto& cls : c11.c2.per_class) CHECK(cls.mode == "cited");
}

TEST_CASE("linear transfer check") {
  auto fam = cross_measures(2);
  GridGraph grid(2);
  // zero map
  CHECK(linear_sobolev_transfer_check(fam, {std::vector<Rational>(grid.vertex_count())}));
  // random integer columns
  std::mt19937_64 rng(3);
  std::vector<std::vector<Rational>> cols;
  for (int j = 0; j < 3; ++j) {
    std::vector<Rational> f(grid.vertex_count());
    for (auto& v : f) v = Rational(static_cast<long>(rng() % 9) - 4);
    cols.push_back(std::move(f));
  }
  CHECK(linear_sobolev_transfer_check(fam, cols));
  // indicator columns of simply connected sets
  std::vector<Rational> ind(grid.vertex_count(), Rational(0));
  for (int y = 0; y <= 2; ++y)
    for (int x = 0; x <= 2; ++x) ind[grid.vid(x, y)] = Rational(1);
  CHECK(linear_sobolev_transfer_check(fam, {ind}));
}

TEST_CASE("additivity bound drives condition (C2) for generation-one crosses") {
  // the separated-support path: cross measures of T_1 on Gr_3 combined with
  // Walsh signs satisfy the additivity lower bound with A = 2, 1/B = 1
  const int n = 3;
  auto fam = cross_measures(n);
  GridGraph grid(n);
  std::vector<VertexId> pts = grid.vertices();
  std::vector<std::vector<Rational>> mat(pts.size(), std::vector<Rational>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) mat[i][j] = grid.distance(pts[i], pts[j]);
  FiniteMetricSpace space(pts, mat);

  auto gen = fam.generation(1);
  std::vector<SignedMeasure> measures;
  for (const auto* m : gen) measures.push_back(m->measure);
  auto sys = walsh_system(4);
  for (int i = 0; i < sys.size; ++i) {
    std::vector<Rational> g;
    for (int t = 0; t < sys.size; ++t) g.push_back(Rational(static_cast<int>(sys.rows[i][t])));
    auto r = additivity_lower_bound(space, measures, g, Rational(2), Rational(1));
    CHECK(r.ok);
    CHECK(r.lhs >= Rational(1, 32));  // the claimed alpha_k
  }
}

TEST_CASE("generation-zero alpha equals the norm of the central cross") {
  auto fam = cross_measures(3);
  GridGraph grid(3);
  auto res = condition_c2_alpha(fam, 0, walsh_system(1));
  REQUIRE(res.alpha_verified.has_value());
  Rational direct = tc_norm_metric(fam.measures()[0].measure.support(),
                                   [&](VertexId u, VertexId v) { return grid.distance(u, v); },
                                   fam.measures()[0].measure)
                        .cost;
  CHECK(*res.alpha_verified == direct);
  CHECK(*res.alpha_verified >= Rational(1, 16));
}

TEST_CASE("central cross cost on Gr_2 agrees with assignment brute force") {
  GridGraph grid(2);
  auto fam = cross_measures(2);
  const auto& mu = fam.measures()[0].measure;
  // two positive and two negative equal atoms: try both matchings
  std::vector<VertexId> pos, neg;
  for (const auto& [v, q] : mu.atoms()) (q > 0 ? pos : neg).push_back(v);
  REQUIRE(pos.size() == 2);
  REQUIRE(neg.size() == 2);
  Rational straight = grid.distance(pos[0], neg[0]) + grid.distance(pos[1], neg[1]);
  Rational crossed = grid.distance(pos[0], neg[1]) + grid.distance(pos[1], neg[0]);
  Rational oracle = std::min(straight, crossed) * Rational(1, 16);
  auto res = tc_norm_metric(mu.support(),
                            [&](VertexId u, VertexId v) { return grid.distance(u, v); }, mu);
  CHECK(res.cost == oracle);
  CHECK(res.cost == Rational(1, 4));
}

TEST_CASE("planar topology facts hold on random simply connected sets of Gr_3") {
  GridGraph grid(3);
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 20; ++trial) {
    int target = 2 + static_cast<int>(rng() % 40);
    auto in_a = random_simply_connected(grid, rng, target);
    auto rep = planar_topology_checks(grid, in_a);
    CHECK(rep.vertex_boundary_connected);
    CHECK(rep.diameter_bound);
    CHECK(rep.edge_vertex_bound);
  }
}

TEST_CASE("normalized indicators of simply connected sets are extreme points") {
  StGraph d = slash_power(diamond().to_st_graph(), 1);
  std::vector<Rational> nu;
  for (const auto& e : d.edges()) nu.push_back(e.thickness * e.length);
  auto adj = AdjacencyGraph::from_graph(d);
  long extreme = 0;
  enumerate_simply_connected(adj, 25, [&](std::uint64_t mask) {
    Rational boundary(0);
    for (std::size_t k = 0; k < d.edge_count(); ++k) {
      const auto& e = d.edges()[k];
      bool tin = mask & (1ull << d.vertex_index(e.tail));
      bool hin = mask & (1ull << d.vertex_index(e.head));
      if (tin != hin) boundary += nu[k];
    }
    REQUIRE(boundary > 0);
    std::map<VertexId, Rational> f;
    for (VertexId v : d.vertices())
      f[v] = (mask & (1ull << d.vertex_index(v))) ? Rational(1) / boundary : Rational(0);
    CHECK(extreme_point_test(d, nu, f));
    // scaling breaks the unit norm
    std::map<VertexId, Rational> scaled = f;
    for (auto& [v, val] : scaled) (void)v, val *= 2;
    CHECK(!extreme_point_test(d, nu, scaled));
    ++extreme;
  });
  CHECK(extreme > 0);
}
