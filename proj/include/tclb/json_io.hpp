#pragma once

#include <json.hpp>

#include "tclb/development.hpp"
#include "tclb/measure.hpp"
#include "tclb/slashops.hpp"
#include "tclb/stgraph.hpp"
#include "tclb/transport.hpp"

namespace tclb {

using Json = nlohmann::ordered_json;

// Graph schema:
// {"vertices": [int], "source": int, "sink": int,
//  "edges": [{"tail": int, "head": int, "length": "p/q", "thickness": "p/q"}]}
inline Json graph_to_json(const StGraph& g) {
  Json j;
  j["vertices"] = Json::array();
  for (VertexId v : g.vertices()) j["vertices"].push_back(v);
  j["source"] = g.source();
  j["sink"] = g.sink();
  j["edges"] = Json::array();
  for (const auto& e : g.edges())
    j["edges"].push_back(Json{{"tail", e.tail},
                              {"head", e.head},
                              {"length", to_string(e.length)},
                              {"thickness", to_string(e.thickness)}});
  return j;
}

inline StGraph graph_from_json(const Json& j) {
  std::vector<VertexId> vertices;
  for (const auto& v : j.at("vertices")) vertices.push_back(v.get<VertexId>());
  std::vector<DirectedEdge> edges;
  for (const auto& e : j.at("edges"))
    edges.push_back({e.at("tail").get<VertexId>(), e.at("head").get<VertexId>(),
                     parse_rational(e.at("length").get<std::string>()),
                     parse_rational(e.at("thickness").get<std::string>())});
  return StGraph(std::move(vertices), std::move(edges), j.at("source").get<VertexId>(),
                 j.at("sink").get<VertexId>());
}

// Measure schema: {"atoms": {"<vertex>": "p/q", ...}}
inline Json measure_to_json(const SignedMeasure& mu) {
  Json atoms = Json::object();
  for (const auto& [v, q] : mu.atoms()) atoms[std::to_string(v)] = to_string(q);
  return Json{{"atoms", atoms}};
}

inline SignedMeasure measure_from_json(const Json& j) {
  std::map<VertexId, Rational> atoms;
  for (const auto& [key, val] : j.at("atoms").items()) {
    std::size_t pos = 0;
    int v = std::stoi(key, &pos);
    if (pos != key.size() || v < 0)
      throw std::invalid_argument("measure: vertex keys must be nonnegative integers");
    atoms[v] += parse_rational(val.get<std::string>());
  }
  return SignedMeasure(std::move(atoms));
}

inline Json elementary_to_json(const ElementarySpec& spec) {
  Json sides = Json::array();
  for (const auto& side : spec.sides) {
    Json s = Json::array();
    for (const auto& len : side) s.push_back(to_string(len));
    sides.push_back(s);
  }
  return Json{{"kind", spec.is_cycle ? "cycle" : "path"}, {"side_lengths", sides}};
}

inline ElementarySpec elementary_from_json(const Json& j) {
  ElementarySpec spec;
  std::string kind = j.at("kind").get<std::string>();
  if (kind != "path" && kind != "cycle")
    throw std::invalid_argument("elementary: kind must be path or cycle");
  spec.is_cycle = (kind == "cycle");
  for (const auto& side : j.at("side_lengths")) {
    std::vector<Rational> s;
    for (const auto& len : side) s.push_back(parse_rational(len.get<std::string>()));
    spec.sides.push_back(std::move(s));
  }
  spec.check();
  return spec;
}

// Development schema: stages are implicit in event order; labels are slot
// paths from the root edge.
inline Json development_to_json(const Development& dev) {
  Json events = Json::array();
  for (const auto& ev : dev.events()) {
    Json path = Json::array();
    for (int slot : dev.label_path(ev.label)) path.push_back(slot);
    events.push_back(Json{
        {"stage", ev.stage}, {"edge_label", path}, {"elementary", elementary_to_json(ev.elem)}});
  }
  return Json{{"kind", "development"}, {"events", events}};
}

inline Development development_from_json(const Json& j) {
  Development dev;
  for (const auto& ev : j.at("events")) {
    std::vector<int> path;
    for (const auto& slot : ev.at("edge_label")) path.push_back(slot.get<int>());
    if (ev.at("stage").get<int>() != static_cast<int>(dev.events().size()))
      throw std::invalid_argument("development: stages must be consecutive");
    dev.apply_event(dev.label_by_path(path), elementary_from_json(ev.at("elementary")));
  }
  return dev;
}

inline Json cwh_to_json(const CycleWithHandles& cwh) {
  return Json{{"kind", "cycle-with-handles"},
              {"pa", elementary_to_json(cwh.pa)},
              {"e_rep_index", cwh.e_rep_index},
              {"cy", elementary_to_json(cwh.cy)}};
}

inline CycleWithHandles cwh_from_json(const Json& j) {
  return make_cycle_with_handles(elementary_from_json(j.at("pa")),
                                 j.at("e_rep_index").get<int>(),
                                 elementary_from_json(j.at("cy")));
}

// Full transport output for external re-verification.
inline Json transport_result_to_json(const TransportResult& res) {
  Json moves = Json::array();
  for (const auto& m : res.plan.moves)
    moves.push_back(Json{{"from", m.from}, {"to", m.to}, {"amount", to_string(m.amount)}});
  Json dual = Json::object();
  for (const auto& [v, f] : res.dual.values) dual[std::to_string(v)] = to_string(f);
  return Json{{"cost", to_string(res.cost)},
              {"plan", moves},
              {"dual", Json{{"claimed_constant", to_string(res.dual.claimed_constant)},
                            {"values", dual}}}};
}

}  // namespace tclb
