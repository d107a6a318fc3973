#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "tclb/hash.hpp"
#include "tclb/qsqrt2.hpp"
#include "tclb/rational.hpp"
#include "tclb/version.hpp"
#include "tclb/walsh.hpp"

namespace tclb {

using Json = nlohmann::ordered_json;

inline Json qsqrt2_to_json(const QSqrt2& v) {
  return Json{{"a", to_string(v.a)}, {"b", to_string(v.b)}};
}
inline QSqrt2 qsqrt2_from_json(const Json& j) {
  return {parse_rational(j.at("a").get<std::string>()),
          parse_rational(j.at("b").get<std::string>())};
}

// Verification provenance of a stored inequality. "exhaustive" and "sampled"
// are machine-verified (completely or on a seeded sample); "cited" marks
// inequalities carried by a theorem rather than re-checked, so certificates
// never overstate what was actually computed.
inline bool known_mode(const std::string& m) {
  return m == "exhaustive" || m == "sampled" || m == "cited";
}

struct ConditionC1Evidence {
  Rational thickness_length_sum = Rational(1);  // must equal 1 exactly
  QSqrt2 sobolev_constant;
  std::string mode = "cited";
  Json witness_data = Json::object();

  Json to_json() const {
    return Json{{"thickness_length_sum", to_string(thickness_length_sum)},
                {"sobolev_constant", qsqrt2_to_json(sobolev_constant)},
                {"mode", mode},
                {"witness_data", witness_data}};
  }
  static ConditionC1Evidence from_json(const Json& j) {
    ConditionC1Evidence e;
    e.thickness_length_sum = parse_rational(j.at("thickness_length_sum").get<std::string>());
    e.sobolev_constant = qsqrt2_from_json(j.at("sobolev_constant"));
    e.mode = j.at("mode").get<std::string>();
    e.witness_data = j.at("witness_data");
    if (!known_mode(e.mode)) throw std::invalid_argument("certificate: unknown c1 mode");
    return e;
  }
};

struct C2PerClass {
  int k = 0;            // thickness or generation class
  long system_size = 0;  // |M_k|, a power of 2
  OrthogonalSystem system;  // stored explicitly only when verified
  Rational alpha;
  std::string mode = "cited";
  Json witness_data = Json::object();

  Json to_json() const {
    Json rows = Json::array();
    for (const auto& r : system.rows) {
      Json row = Json::array();
      for (auto v : r) row.push_back(static_cast<int>(v));
      rows.push_back(row);
    }
    return Json{{"k", k},
                {"system_size", system_size},
                {"system_rows", rows},
                {"alpha", to_string(alpha)},
                {"mode", mode},
                {"witness_data", witness_data}};
  }
  static C2PerClass from_json(const Json& j) {
    C2PerClass c;
    c.k = j.at("k").get<int>();
    c.system_size = j.at("system_size").get<long>();
    for (const auto& row : j.at("system_rows")) {
      std::vector<std::int8_t> r;
      for (const auto& v : row) r.push_back(static_cast<std::int8_t>(v.get<int>()));
      c.system.rows.push_back(std::move(r));
    }
    c.system.size = static_cast<int>(c.system.rows.size());
    c.alpha = parse_rational(j.at("alpha").get<std::string>());
    c.mode = j.at("mode").get<std::string>();
    c.witness_data = j.at("witness_data");
    if (!known_mode(c.mode)) throw std::invalid_argument("certificate: unknown c2 mode");
    return c;
  }
};

struct ConditionC2Evidence {
  std::vector<C2PerClass> per_class;

  Json to_json() const {
    Json arr = Json::array();
    for (const auto& c : per_class) arr.push_back(c.to_json());
    return Json{{"per_class", arr}};
  }
  static ConditionC2Evidence from_json(const Json& j) {
    ConditionC2Evidence e;
    for (const auto& c : j.at("per_class")) e.per_class.push_back(C2PerClass::from_json(c));
    return e;
  }
};

// A machine-verifiable lower-bound claim: bound = C^{-1} sum_k alpha_k with
// C the Sobolev constant of the c1 evidence. The payload carries everything
// needed to rebuild the graph and measure family; its hash pins it.
struct Certificate {
  int version = 1;
  std::string theorem;  // "grid" | "development" | "cycle-with-handles" | "general-power"
  Json payload = Json::object();
  std::string graph_hash;
  ConditionC1Evidence c1;
  ConditionC2Evidence c2;
  QSqrt2 claimed_bound;
  std::string toolchain = kToolchainVersion;
  Json checks = Json::array();

  Json to_json() const {
    return Json{{"version", version},
                {"theorem", theorem},
                {"graph_hash", graph_hash},
                {"bound", qsqrt2_to_json(claimed_bound)},
                {"c1", c1.to_json()},
                {"c2", c2.to_json()},
                {"checks", checks},
                {"payload", payload},
                {"toolchain", toolchain}};
  }

  static Certificate from_json(const Json& j) {
    Certificate c;
    c.version = j.at("version").get<int>();
    if (c.version != 1) throw std::invalid_argument("certificate: unsupported version");
    c.theorem = j.at("theorem").get<std::string>();
    c.graph_hash = j.at("graph_hash").get<std::string>();
    c.claimed_bound = qsqrt2_from_json(j.at("bound"));
    c.c1 = ConditionC1Evidence::from_json(j.at("c1"));
    c.c2 = ConditionC2Evidence::from_json(j.at("c2"));
    c.checks = j.at("checks");
    c.payload = j.at("payload");
    c.toolchain = j.at("toolchain").get<std::string>();
    return c;
  }
};

inline std::string payload_hash(const Json& payload) { return fnv1a64_hex(payload.dump()); }

inline QSqrt2 certificate_bound(const ConditionC1Evidence& c1, const ConditionC2Evidence& c2) {
  QSqrt2 alpha_sum(Rational(0));
  for (const auto& c : c2.per_class) alpha_sum = alpha_sum + QSqrt2(c.alpha);
  return c1.sobolev_constant.inverse() * alpha_sum;
}

// Assembles a certificate and pins the payload hash; the bound is computed,
// never taken on faith.
inline Certificate assemble(std::string theorem, Json payload, ConditionC1Evidence c1,
                            ConditionC2Evidence c2) {
  if (c1.thickness_length_sum != 1)
    throw std::invalid_argument("assemble: thickness normalization is not 1");
  for (const auto& c : c2.per_class) {
    if (c.alpha < 0) throw std::invalid_argument("assemble: negative alpha");
    if (c.system_size <= 0 || (c.system_size & (c.system_size - 1)) != 0)
      throw std::invalid_argument("assemble: orthogonal system size must be a power of 2");
    if (!c.system.rows.empty() &&
        (static_cast<long>(c.system.rows.size()) != c.system_size || !c.system.verify_orthogonal()))
      throw std::invalid_argument("assemble: stored system is not orthogonal");
  }
  Certificate cert;
  cert.theorem = std::move(theorem);
  cert.payload = std::move(payload);
  cert.graph_hash = payload_hash(cert.payload);
  cert.c1 = std::move(c1);
  cert.c2 = std::move(c2);
  cert.claimed_bound = certificate_bound(cert.c1, cert.c2);
  return cert;
}

}  // namespace tclb
