// Command-line front end: generate graphs, compute transportation cost
// norms, run verification sweeps, and emit or check lower-bound
// certificates. All I/O is JSON; outputs are deterministic given the inputs
// and the seed.

#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tclb/certify.hpp"
#include "tclb/json_io.hpp"
#include "tclb/version.hpp"

namespace {

using tclb::Json;

struct CommonFlags {
  std::string output;
  std::uint64_t seed = 0;
  std::string effort = "quick";
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--output", flags.output, "write the result here instead of stdout");
  cmd->add_option("--seed", flags.seed, "seed for randomized sweeps");
  cmd->add_option("--effort", flags.effort, "verification effort: quick or full")
      ->check(CLI::IsMember({"quick", "full"}));
}

void emit_text(const CommonFlags& flags, const std::string& text) {
  if (flags.output.empty() || flags.output == "-") {
    std::cout << text;
  } else {
    std::ofstream out(flags.output);
    if (!out) throw std::runtime_error("cannot open output file: " + flags.output);
    out << text;
  }
}

void emit(const CommonFlags& flags, const Json& j) { emit_text(flags, j.dump(2) + "\n"); }

Json read_json(const std::string& path) {
  if (path == "-") return Json::parse(std::cin);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  return Json::parse(in);
}

tclb::StGraph base_graph(const std::string& name) {
  if (name == "diamond") return tclb::diamond().to_st_graph();
  if (name == "laakso") return tclb::laakso().to_st_graph();
  return tclb::graph_from_json(read_json(name));
}

tclb::CycleWithHandles base_cwh(const std::string& name) {
  if (name == "diamond") return tclb::diamond();
  if (name == "laakso") return tclb::laakso();
  return tclb::cwh_from_json(read_json(name));
}

tclb::CertifyOptions effort_options(const CommonFlags& flags) {
  tclb::CertifyOptions opt;
  opt.seed = flags.seed;
  if (flags.effort == "full") {
    opt.max_verified_rows = 64;
    opt.exhaustive_subset_vertices = 14;
    opt.sampled_subsets = 1000;
    opt.materialize_label_budget = 3500;
  } else {
    opt.max_verified_rows = 16;
    opt.exhaustive_subset_vertices = 10;
    opt.sampled_subsets = 100;
  }
  return opt;
}

int run_sobolev_check(int n, const CommonFlags& flags) {
  auto fam = tclb::cross_measures(n);
  tclb::GridGraph grid(n);
  const tclb::QSqrt2 c(tclb::Rational(180));
  Json rep;
  rep["n"] = n;
  long sets = 0;
  std::optional<tclb::Rational> max_ratio;  // exact only when the lhs is rational
  if (flags.effort == "full" && n == 2) {
    auto adj = tclb::AdjacencyGraph::from_grid(grid);
    tclb::enumerate_simply_connected(adj, 25, [&](std::uint64_t mask) {
      std::vector<char> in_a(grid.vertex_count(), 0);
      for (int v = 0; v < 25; ++v) in_a[v] = (mask >> v) & 1;
      auto ratio = tclb::sobolev_ratio(fam, in_a);
      if (!ratio.certified_le(c)) throw std::logic_error("sobolev-check: inequality failed");
      if (ratio.rhs > 0 && !ratio.per_generation_squares.empty()) {
        // one generation at n = 2, so the lhs is |mu(A)| exactly
        tclb::Rational sq = ratio.per_generation_squares[0].second;
        mpz_class num = sq.get_num(), den = sq.get_den();
        mpz_sqrt(num.get_mpz_t(), num.get_mpz_t());
        mpz_sqrt(den.get_mpz_t(), den.get_mpz_t());
        tclb::Rational lhs = tclb::make_rational(num, den);
        if (lhs * lhs == sq) {
          tclb::Rational r = lhs / ratio.rhs;
          if (!max_ratio || r > *max_ratio) max_ratio = r;
        }
      }
      ++sets;
    });
    rep["mode"] = "exhaustive";
  } else {
    std::mt19937_64 rng(flags.seed);
    int trials = flags.effort == "full" ? 2000 : 200;
    for (int t = 0; t < trials; ++t) {
      int target = 1 + static_cast<int>(rng() % (grid.vertex_count() - 1));
      auto in_a = tclb::random_simply_connected(grid, rng, target);
      if (!tclb::sobolev_ratio(fam, in_a).certified_le(c))
        throw std::logic_error("sobolev-check: inequality failed");
      ++sets;
    }
    rep["mode"] = "sampled";
  }
  std::mt19937_64 rng(flags.seed + 1);
  int functions = flags.effort == "full" ? 1000 : 100;
  for (int t = 0; t < functions; ++t) {
    std::vector<tclb::Rational> f(grid.vertex_count());
    for (auto& v : f) v = tclb::Rational(static_cast<long>(rng() % 41) - 20);
    if (!tclb::grid_function_sobolev(fam, f, c))
      throw std::logic_error("sobolev-check: function inequality failed");
  }
  rep["sets_checked"] = sets;
  rep["functions_checked"] = functions;
  rep["constant"] = "180";
  if (max_ratio) rep["max_indicator_ratio"] = tclb::to_string(*max_ratio);
  rep["ok"] = true;
  emit(flags, rep);
  return 0;
}

int run_dev_sweep(const std::string& base, int n, const CommonFlags& flags) {
  auto dev = tclb::develop(base_cwh(base), n);
  auto fam = tclb::cycle_measures(dev);
  std::mt19937_64 rng(flags.seed);
  const int vertex_count = dev.vertex_count();
  const bool exhaustive = vertex_count <= (flags.effort == "full" ? 12 : 10);
  long subset_checks = 0, monotonicity_checks = 0, signed_checks = 0;

  auto subset_at = [&](std::uint64_t mask) {
    std::vector<char> in_a(vertex_count, 0);
    for (int v = 0; v < vertex_count && v < 64; ++v) in_a[v] = (mask >> v) & 1;
    return in_a;
  };
  auto random_subset = [&]() {
    std::vector<char> in_a(vertex_count, 0);
    for (auto& x : in_a) x = rng() & 1;
    return in_a;
  };

  long subset_trials = exhaustive ? (1l << vertex_count) : (flags.effort == "full" ? 2000 : 300);
  for (long i = 0; i < subset_trials; ++i) {
    auto in_a = exhaustive ? subset_at(static_cast<std::uint64_t>(i)) : random_subset();
    if (!tclb::set_sobolev(fam, in_a).ok)
      throw std::logic_error("dev-sweep: set Sobolev inequality failed");
    for (const auto& [id, entry] : fam.entries()) {
      (void)entry;
      if (!tclb::mu_perimeter_bound(fam, in_a, id, dev.final_stage()).ok)
        throw std::logic_error("dev-sweep: perimeter bound failed");
    }
    ++subset_checks;
  }

  // perimeter monotonicity over random (A, label, stage)
  long mono_trials = flags.effort == "full" ? 2000 : 300;
  for (long i = 0; i < mono_trials; ++i) {
    auto in_a = random_subset();
    int label = static_cast<int>(rng() % dev.label_count());
    int stage = static_cast<int>(rng() % (dev.stages() - 1));
    auto before = dev.perimeter(in_a, dev.descendant_edges(label, stage));
    auto after = dev.perimeter(in_a, dev.descendant_edges(label, stage + 1));
    if (after < before) throw std::logic_error("dev-sweep: perimeter monotonicity failed");
    ++monotonicity_checks;
  }

  // signed sums per thickness class
  std::map<int, std::vector<int>> groups;
  for (int id : dev.cycle_labels())
    groups[*tclb::dyadic_class(dev.label(id).thickness)].push_back(id);
  for (auto& [k, ids] : groups) {
    (void)k;
    long patterns = ids.size() <= 4 ? (1l << ids.size()) : (flags.effort == "full" ? 64 : 16);
    for (long p = 0; p < patterns; ++p) {
      std::map<int, int> signs;
      for (std::size_t i = 0; i < ids.size(); ++i) {
        bool plus = ids.size() <= 4 ? ((p >> i) & 1) : (rng() & 1);
        signs[ids[i]] = plus ? 1 : -1;
      }
      if (!tclb::signed_sum_bound(fam, ids, signs, dev.final_stage()).ok)
        throw std::logic_error("dev-sweep: signed-sum bound failed");
      ++signed_checks;
    }
  }

  Json rep;
  rep["base"] = base;
  rep["n"] = n;
  rep["vertices"] = vertex_count;
  rep["subset_checks"] = subset_checks;
  rep["monotonicity_checks"] = monotonicity_checks;
  rep["signed_sum_checks"] = signed_checks;
  rep["seed"] = flags.seed;
  rep["ok"] = true;
  emit(flags, rep);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transportation cost norms and L1-distortion certificates on st-graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tclb::kToolchainVersion);

  // ---- generate
  auto* generate = app.add_subcommand("generate", "emit graphs and developments as JSON");
  generate->require_subcommand(1);
  CommonFlags gen_flags;
  int gen_n = 2;
  std::string gen_base = "diamond";

  auto* gen_grid = generate->add_subcommand("grid", "dyadic planar grid");
  gen_grid->add_option("--n", gen_n, "grid exponent (vertices {0..2^n}^2)")->required();
  add_common(gen_grid, gen_flags);
  gen_grid->callback(
      [&]() { emit(gen_flags, tclb::graph_to_json(tclb::make_grid(gen_n).to_graph())); });

  auto* gen_diamond = generate->add_subcommand("diamond", "first diamond graph");
  add_common(gen_diamond, gen_flags);
  gen_diamond->callback(
      [&]() { emit(gen_flags, tclb::graph_to_json(tclb::diamond().to_st_graph())); });

  auto* gen_laakso = generate->add_subcommand("laakso", "first laakso graph");
  add_common(gen_laakso, gen_flags);
  gen_laakso->callback(
      [&]() { emit(gen_flags, tclb::graph_to_json(tclb::laakso().to_st_graph())); });

  auto* gen_power = generate->add_subcommand("slash-power", "iterated slash power of a base graph");
  gen_power->add_option("--base", gen_base, "diamond, laakso, or a graph JSON file")->required();
  gen_power->add_option("--n", gen_n, "power")->required();
  add_common(gen_power, gen_flags);
  gen_power->callback([&]() {
    emit(gen_flags, tclb::graph_to_json(tclb::slash_power(base_graph(gen_base), gen_n)));
  });

  auto* gen_dev = generate->add_subcommand("development", "elementary development of a cwh power");
  gen_dev->add_option("--base", gen_base, "diamond, laakso, or a cwh JSON file")->required();
  gen_dev->add_option("--n", gen_n, "power")->required();
  add_common(gen_dev, gen_flags);
  gen_dev->callback([&]() {
    emit(gen_flags, tclb::development_to_json(tclb::develop(base_cwh(gen_base), gen_n)));
  });

  // ---- tc-norm
  auto* tc = app.add_subcommand("tc-norm", "exact transportation cost of a measure on a graph");
  CommonFlags tc_flags;
  std::string tc_graph, tc_measure;
  tc->add_option("--graph", tc_graph, "graph JSON file")->required();
  tc->add_option("--measure", tc_measure, "measure JSON file")->required();
  add_common(tc, tc_flags);
  tc->callback([&]() {
    tclb::StGraph g = tclb::graph_from_json(read_json(tc_graph));
    tclb::SignedMeasure mu = tclb::measure_from_json(read_json(tc_measure));
    emit(tc_flags, tclb::transport_result_to_json(tclb::tc_norm_graph(g, mu)));
  });

  // ---- certify
  auto* certify = app.add_subcommand("certify", "emit a distortion lower-bound certificate");
  certify->require_subcommand(1);
  CommonFlags cert_flags;
  int cert_n = 2;
  std::string cert_base = "diamond";

  auto* cert_grid = certify->add_subcommand("grid", "planar grid certificate");
  cert_grid->add_option("--n", cert_n, "grid exponent")->required();
  add_common(cert_grid, cert_flags);
  cert_grid->callback([&]() {
    tclb::GridCertifyOptions opt;
    opt.seed = cert_flags.seed;
    if (cert_flags.effort == "quick") {
      opt.sampled_sets = 60;
      opt.sampled_functions = 20;
    }
    emit(cert_flags, tclb::grid_certificate(cert_n, opt).to_json());
  });

  auto* cert_cwh = certify->add_subcommand("cwh", "cycle-with-handles power certificate");
  cert_cwh->add_option("--base", cert_base, "diamond, laakso, or a cwh JSON file")->required();
  cert_cwh->add_option("--n", cert_n, "power")->required();
  add_common(cert_cwh, cert_flags);
  cert_cwh->callback([&]() {
    emit(cert_flags,
         tclb::cwh_certificate(base_cwh(cert_base), cert_n, effort_options(cert_flags)).to_json());
  });

  auto* cert_dev =
      certify->add_subcommand("development", "development certificate over all cycle labels");
  cert_dev->add_option("--base", cert_base, "diamond, laakso, or a cwh JSON file")->required();
  cert_dev->add_option("--n", cert_n, "power")->required();
  add_common(cert_dev, cert_flags);
  cert_dev->callback([&]() {
    auto dev = tclb::develop(base_cwh(cert_base), cert_n);
    emit(cert_flags,
         tclb::development_certificate(dev, dev.cycle_labels(), effort_options(cert_flags))
             .to_json());
  });

  auto* cert_gen =
      certify->add_subcommand("general-power", "certificate for powers of any st-graph");
  cert_gen->add_option("--base", cert_base, "graph JSON file (or diamond/laakso)")->required();
  cert_gen->add_option("--n", cert_n, "power")->required();
  add_common(cert_gen, cert_flags);
  cert_gen->callback([&]() {
    emit(cert_flags,
         tclb::general_power_certificate(base_graph(cert_base), cert_n, effort_options(cert_flags))
             .to_json());
  });

  // ---- verify
  auto* verify =
      app.add_subcommand("verify", "re-check a certificate; exit 0 pass, 1 fail, 2 format error");
  CommonFlags verify_flags;
  std::string verify_path;
  verify->add_option("certificate", verify_path, "certificate JSON file, or - for stdin")
      ->required();
  add_common(verify, verify_flags);
  int verify_exit = 0;
  verify->callback([&]() {
    Json j;
    try {
      j = read_json(verify_path);
    } catch (const Json::exception& e) {
      std::cerr << "format error: " << e.what() << "\n";
      verify_exit = 2;
      return;
    }
    auto rep = tclb::verify_certificate_json(j, effort_options(verify_flags));
    Json out;
    out["status"] = rep.status == tclb::VerifyStatus::Pass
                        ? "PASS"
                        : (rep.status == tclb::VerifyStatus::Fail ? "FAIL" : "FORMAT_ERROR");
    out["checks_run"] = rep.checks_run;
    if (!rep.first_failure.empty()) out["first_failure"] = rep.first_failure;
    emit(verify_flags, out);
    verify_exit = rep.exit_code();
  });

  // ---- enumerate-sc
  auto* enumerate = app.add_subcommand("enumerate-sc", "stream simply connected vertex sets");
  CommonFlags enum_flags;
  std::string enum_graph;
  int enum_budget = 25;
  enumerate->add_option("--graph", enum_graph, "graph JSON file")->required();
  enumerate->add_option("--budget", enum_budget, "largest vertex count accepted");
  add_common(enumerate, enum_flags);
  enumerate->callback([&]() {
    tclb::StGraph g = tclb::graph_from_json(read_json(enum_graph));
    auto adj = tclb::AdjacencyGraph::from_graph(g);
    std::ostringstream lines;
    tclb::enumerate_simply_connected(adj, enum_budget, [&](std::uint64_t mask) {
      Json arr = Json::array();
      for (int i = 0; i < adj.n; ++i)
        if (mask & (1ull << i)) arr.push_back(g.vertices()[i]);
      lines << arr.dump() << "\n";
    });
    emit_text(enum_flags, lines.str());
  });

  // ---- sobolev-check
  auto* sobolev = app.add_subcommand("sobolev-check", "verify the grid Sobolev inequality");
  CommonFlags sob_flags;
  int sob_n = 2;
  sobolev->add_option("--n", sob_n, "grid exponent")->required();
  add_common(sobolev, sob_flags);
  int sob_exit = 0;
  sobolev->callback([&]() { sob_exit = run_sobolev_check(sob_n, sob_flags); });

  // ---- dev-sweep
  auto* sweep = app.add_subcommand("dev-sweep", "property sweeps over a development");
  CommonFlags sweep_flags;
  std::string sweep_base = "diamond";
  int sweep_n = 2;
  sweep->add_option("--base", sweep_base, "diamond, laakso, or a cwh JSON file")->required();
  sweep->add_option("--n", sweep_n, "power")->required();
  add_common(sweep, sweep_flags);
  int sweep_exit = 0;
  sweep->callback([&]() { sweep_exit = run_dev_sweep(sweep_base, sweep_n, sweep_flags); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Json::exception& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (verify->parsed()) return verify_exit;
  if (sobolev->parsed()) return sob_exit;
  if (sweep->parsed()) return sweep_exit;
  return 0;
}
