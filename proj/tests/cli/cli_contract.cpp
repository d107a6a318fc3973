// Exercises the command-line interface end to end: schemas, determinism,
// and the verifier exit-code contract. Takes the binary path as argv[1].

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace {

using Json = nlohmann::ordered_json;

std::string g_cli;
int g_failures = 0;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args, const std::string& stdin_file = "") {
  std::string cmd = g_cli + " " + args;
  if (!stdin_file.empty()) cmd += " < " + stdin_file;
  cmd += " 2>/dev/null";
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    res.exit_code = -1;
    return res;
  }
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), got);
  int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

void expect(bool ok, const std::string& what) {
  if (ok) {
    std::printf("[ ok ] %s\n", what.c_str());
  } else {
    std::printf("[FAIL] %s\n", what.c_str());
    ++g_failures;
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: cli_contract <path-to-cli>\n");
    return 2;
  }
  g_cli = argv[1];
  const std::string tmp = "cli_contract_tmp";
  if (std::system(("mkdir -p " + tmp).c_str()) != 0) return 2;

  // generate: schema and counts
  auto grid = run("generate grid --n 2");
  expect(grid.exit_code == 0, "generate grid --n 2 exits 0");
  {
    Json j = Json::parse(grid.out);
    expect(j.at("vertices").size() == 25, "grid JSON has 25 vertices");
    expect(j.at("edges").size() == 40, "grid JSON has 40 edges");
  }
  expect(run("generate grid --n 1").exit_code == 2, "generate grid --n 1 exits 2");

  auto power = run("generate slash-power --base diamond --n 2");
  expect(Json::parse(power.out).at("vertices").size() == 12,
         "slash-power diamond n=2 has 12 vertices");

  // determinism: identical invocations are byte-identical
  expect(run("generate grid --n 3").out == run("generate grid --n 3").out,
         "generate is deterministic");
  expect(run("certify cwh --base laakso --n 3 --seed 5").out ==
             run("certify cwh --base laakso --n 3 --seed 5").out,
         "certify is deterministic given the seed");

  // tc-norm on a two-atom measure: cost equals the distance
  write_file(tmp + "/d.json", run("generate diamond").out);
  write_file(tmp + "/mu.json", R"({"atoms": {"0": "1", "1": "-1"}})");
  auto tc = run("tc-norm --graph " + tmp + "/d.json --measure " + tmp + "/mu.json");
  expect(tc.exit_code == 0, "tc-norm exits 0");
  expect(Json::parse(tc.out).at("cost").get<std::string>() == "1",
         "source-to-sink measure costs 1");

  // malformed rational and nonzero mass are parameter errors
  write_file(tmp + "/bad.json", R"({"atoms": {"0": "1/0", "1": "-1"}})");
  expect(run("tc-norm --graph " + tmp + "/d.json --measure " + tmp + "/bad.json").exit_code == 2,
         "malformed rational 1/0 exits 2");
  write_file(tmp + "/mass.json", R"({"atoms": {"0": "1", "1": "-1/2"}})");
  expect(run("tc-norm --graph " + tmp + "/d.json --measure " + tmp + "/mass.json").exit_code == 2,
         "nonzero total mass exits 2");

  // certify values
  auto c11 = run("certify grid --n 11");
  {
    Json j = Json::parse(c11.out);
    expect(j.at("bound").at("a").get<std::string>() == "1/576" &&
               j.at("bound").at("b").get<std::string>() == "0",
           "grid n=11 bound is 10/5760");
  }

  // verify exit-code contract
  write_file(tmp + "/cert.json", run("certify cwh --base laakso --n 2").out);
  expect(run("verify " + tmp + "/cert.json").exit_code == 0, "verify round trip exits 0");
  expect(run("verify -", tmp + "/cert.json").exit_code == 0, "verify reads stdin");
  {
    Json j = Json::parse(run("certify cwh --base diamond --n 2").out);
    j["bound"]["a"] = "1000000";
    write_file(tmp + "/tampered.json", j.dump());
    expect(run("verify " + tmp + "/tampered.json").exit_code == 1, "tampered bound exits 1");
    Json j2 = Json::parse(run("certify grid --n 2").out);
    j2["graph_hash"] = "0000000000000000";
    write_file(tmp + "/tampered2.json", j2.dump());
    expect(run("verify " + tmp + "/tampered2.json").exit_code == 1, "tampered hash exits 1");
  }
  write_file(tmp + "/garbage.json", "{\"not\": \"a certificate\"}");
  expect(run("verify " + tmp + "/garbage.json").exit_code == 2, "malformed certificate exits 2");
  write_file(tmp + "/notjson.json", "###");
  expect(run("verify " + tmp + "/notjson.json").exit_code == 2, "non-JSON input exits 2");

  // enumerate-sc on a 3-path
  write_file(tmp + "/path.json",
             R"({"vertices": [0, 1, 2], "source": 0, "sink": 1,
                 "edges": [{"tail": 0, "head": 2, "length": "1/2", "thickness": "1"},
                           {"tail": 2, "head": 1, "length": "1/2", "thickness": "1"}]})");
  auto sc = run("enumerate-sc --graph " + tmp + "/path.json");
  {
    int lines = 0;
    for (char c : sc.out) lines += (c == '\n');
    expect(sc.exit_code == 0 && lines == 4, "path on 3 vertices has 4 simply connected sets");
  }

  // sweep commands succeed and are seed-deterministic
  auto sweep1 = run("dev-sweep --base diamond --n 1 --seed 7");
  auto sweep2 = run("dev-sweep --base diamond --n 1 --seed 7");
  expect(sweep1.exit_code == 0 && sweep1.out == sweep2.out, "dev-sweep deterministic");
  auto sob = run("sobolev-check --n 2 --seed 3");
  expect(sob.exit_code == 0 && Json::parse(sob.out).at("ok").get<bool>(),
         "sobolev-check passes");

  (void)!std::system(("rm -rf " + tmp).c_str());
  if (g_failures == 0) {
    std::printf("cli contract: all checks passed\n");
    return 0;
  }
  std::printf("cli contract: %d failures\n", g_failures);
  return 1;
}
