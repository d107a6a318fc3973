#include <catch2/catch_amalgamated.hpp>

#include "tclb/canonical.hpp"
#include "tclb/json_io.hpp"

using namespace tclb;

TEST_CASE("graph json round trip") {
  StGraph la = laakso().to_st_graph();
  Json j = graph_to_json(la);
  StGraph back = graph_from_json(j);
  CHECK(back.vertices() == la.vertices());
  CHECK(back.source() == la.source());
  CHECK(back.sink() == la.sink());
  REQUIRE(back.edge_count() == la.edge_count());
  CHECK(graph_to_json(back) == j);
  CHECK(isomorphic(back, la));
}

TEST_CASE("graph json rejects malformed input") {
  Json j = graph_to_json(trivial_st_path());
  Json bad = j;
  bad["edges"][0]["length"] = "1/0";
  CHECK_THROWS_AS(graph_from_json(bad), std::invalid_argument);
  Json bad2 = j;
  bad2["edges"][0]["thickness"] = "5/4";  // outside (0, 1]
  CHECK_THROWS_AS(graph_from_json(bad2), std::invalid_argument);
  Json bad3 = j;
  bad3["source"] = 42;
  CHECK_THROWS_AS(graph_from_json(bad3), std::invalid_argument);
}

TEST_CASE("measure json round trip") {
  std::map<VertexId, Rational> atoms = {
      {0, Rational(3, 4)}, {2, Rational(-1, 2)}, {5, Rational(-1, 4)}};
  SignedMeasure mu(atoms);
  Json j = measure_to_json(mu);
  CHECK(measure_from_json(j) == mu);
  CHECK(j.at("atoms").at("0").get<std::string>() == "3/4");

  Json bad = j;
  bad["atoms"]["0"] = "1/1";  // breaks the zero-mass invariant
  CHECK_THROWS_AS(measure_from_json(bad), std::invalid_argument);
  Json bad2 = j;
  bad2["atoms"]["-3"] = "0";
  CHECK_THROWS_AS(measure_from_json(bad2), std::invalid_argument);
}

TEST_CASE("development json round trip reproduces the registry") {
  for (auto dev : {develop(diamond(), 2), develop(laakso(), 1),
                   Development::random_development(4, 6)}) {
    Json j = development_to_json(dev);
    Development back = development_from_json(j);
    CHECK(back.label_count() == dev.label_count());
    CHECK(back.vertex_count() == dev.vertex_count());
    CHECK(back.stages() == dev.stages());
    for (int id = 0; id < dev.label_count(); ++id) {
      CHECK(back.label(id).thickness == dev.label(id).thickness);
      CHECK(back.label(id).length == dev.label(id).length);
      CHECK(back.label(id).birth == dev.label(id).birth);
      CHECK(back.label(id).death == dev.label(id).death);
      CHECK(back.label(id).cycle_replaced == dev.label(id).cycle_replaced);
    }
    CHECK(development_to_json(back) == j);
  }
}

TEST_CASE("cwh json round trip") {
  for (const auto& cwh : {diamond(), laakso()}) {
    Json j = cwh_to_json(cwh);
    CycleWithHandles back = cwh_from_json(j);
    CHECK(back.d_rep == cwh.d_rep);
    CHECK(back.ht_cyc == cwh.ht_cyc);
    CHECK(back.e_rep_index == cwh.e_rep_index);
    CHECK(cwh_to_json(back) == j);
  }
}

TEST_CASE("transport result json") {
  StGraph d = diamond().to_st_graph();
  auto res = tc_norm_graph(d, SignedMeasure::dirac_difference(d.source(), d.sink()));
  Json j = transport_result_to_json(res);
  CHECK(j.at("cost").get<std::string>() == "1");
  CHECK(j.at("plan").size() == res.plan.moves.size());
  CHECK(j.at("dual").at("claimed_constant").get<std::string>() == "1");
}

TEST_CASE("byte-stable serialization") {
  auto dev = develop(diamond(), 2);
  CHECK(development_to_json(dev).dump() == development_to_json(dev).dump());
  auto c = graph_to_json(laakso().to_st_graph());
  CHECK(c.dump() == graph_to_json(laakso().to_st_graph()).dump());
}
