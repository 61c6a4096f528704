// Command-line front end: discretize, contraction, abstract, analyze, verify, trace, casestudy.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "petc/errors.hpp"
#include "petc/pipeline.hpp"

namespace fs = std::filesystem;
using namespace petc;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string format;
  std::string solver;
  int workers = -1;
  long long seed = -1;
  bool quiet = false;
  std::string kind = "bisim";
  std::size_t samples = 500;
  int steps = 50;
  std::string bisim_model;
  std::string sim_model;
  std::string x0;
  double horizon = 3;
};

void log_line(const Options& o, const std::string& s) {
  if (!o.quiet) std::cerr << s << std::endl;
}

Config load(const Options& o, bool bundled_default) {
  Config c;
  if (!o.config.empty()) c = load_config(o.config);
  else if (bundled_default) c = casestudy_config();
  else throw ConfigError("--config is required");
  if (!o.solver.empty()) c.solver.path = o.solver;
  if (o.workers >= 0) c.solver.workers = o.workers;
  if (o.seed >= 0) c.seed = static_cast<std::uint64_t>(o.seed);
  return c;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << text;
}

std::string matrix_text(const RatMatrix& m) {
  std::ostringstream os;
  os << std::setprecision(12);
  for (int i = 0; i < m.rows(); ++i) {
    os << "  [";
    for (int j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << std::setw(16) << m(i, j).get_d();
    os << "]\n";
  }
  return os.str();
}

nlohmann::json matrix_json(const RatMatrix& m) {
  auto rows = nlohmann::json::array();
  for (int i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(to_string(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

int cmd_discretize(const Options& o) {
  Config c = load(o, false);
  Rational h_P = c.h_P ? *c.h_P : compute_hP(c.sys, c.hP_resolution, c.resolved_h_max());
  DiscretizedPetc d = discretize_system(c.sys, h_P);
  if (o.format == "json") {
    nlohmann::json j;
    j["k_lo"] = d.k_lo;
    j["h_P"] = to_string(h_P);
    j["M"] = nlohmann::json::array();
    j["N"] = nlohmann::json::array();
    for (int k = 1; k <= d.k_bar; ++k) {
      j["M"].push_back(matrix_json(d.m(k)));
      j["N"].push_back(matrix_json(d.n(k)));
    }
    j["M_P"] = matrix_json(d.M_P);
    write_text(o.out, j.dump(2) + "\n");
    return 0;
  }
  std::ostringstream os;
  os << "k_lo = " << d.k_lo << "\nh_P = " << to_string(h_P) << "\n";
  for (int k = 1; k <= d.k_bar; ++k) os << "M(" << k << ") =\n" << matrix_text(d.m(k)) << "N(" << k << ") =\n"
                                       << matrix_text(d.n(k));
  os << "M_P =\n" << matrix_text(d.M_P);
  write_text(o.out, os.str());
  return 0;
}

nlohmann::json contraction_json(const ContractionStage& cs) {
  nlohmann::json j;
  j["a"] = to_string(cs.cert.a);
  j["a_tol"] = to_string(cs.cert.tol);
  j["h_P"] = to_string(cs.disc.h_P);
  j["h_P_computed"] = cs.h_P_computed;
  j["k_lo"] = cs.disc.k_lo;
  j["N"] = cs.N;
  j["lemma_stated"] = cs.bounds.stated_floor.get_str();
  j["lemma_stated_exact"] = to_string(cs.bounds.stated);
  j["lemma_proof_sum"] = cs.bounds.proof_sum.get_str();
  auto trace = nlohmann::json::array();
  for (const auto& [a, ok] : cs.cert.bisection_trace) trace.push_back({to_string(a), ok});
  j["bisection"] = trace;
  if (cs.cert.violation_below) {
    auto x = nlohmann::json::array();
    for (const auto& v : cs.cert.violation_below->second) x.push_back(to_string(v));
    j["violation_below"] = {{"k", cs.cert.violation_below->first}, {"x", x}};
  }
  j["seconds"] = cs.cert.seconds;
  return j;
}

std::string contraction_text(const ContractionStage& cs) {
  std::ostringstream os;
  os << "a     = " << decimal(cs.cert.a, 3) << "  (grid " << to_string(cs.cert.tol) << ", "
     << cs.cert.bisection_trace.size() << " bisection steps)\n";
  os << "h_P   = " << decimal(cs.disc.h_P, 2) << (cs.h_P_computed ? "  (scanned)" : "  (configured)") << "\n";
  os << "k_lo  = " << cs.disc.k_lo << "\n";
  os << "N     = " << cs.N << "\n";
  os << "trace-count bound  " << scientific(cs.bounds.stated, 2) << " stated, "
     << scientific(Rational(cs.bounds.proof_sum), 2) << " geometric sum\n";
  os << std::fixed << std::setprecision(1) << "time  " << cs.cert.seconds << " s\n";
  return os.str();
}

int cmd_contraction(const Options& o) {
  Config c = load(o, false);
  ContractionStage cs = run_contraction(c);
  write_text(o.out, o.format == "json" ? contraction_json(cs).dump(2) + "\n" : contraction_text(cs));
  return 0;
}

int cmd_abstract(const Options& o) {
  Config c = load(o, false);
  ContractionStage cs = run_contraction(c);
  log_line(o, "a = " + decimal(cs.cert.a, 3) + ", N = " + std::to_string(cs.N));
  ModelKind kind = parse_kind(o.kind);
  TrafficModel m;
  if (kind == ModelKind::Trivial) {
    m = build_trivial(cs.disc.k_lo, cs.disc.k_bar, cs.N, cs.disc.h, cs.disc.h_P, c.trivial_cap);
  } else {
    BisimOptions opt;
    opt.solver = c.solver;
    opt.prefix_pruning = c.prefix_pruning;
    opt.assume_sat = c.assume_sat;
    opt.progress = [&](int level, std::size_t n) {
      log_line(o, "level " + std::to_string(level) + ": " + std::to_string(n) + " states");
    };
    m = build_mpetc_bisim(cs.disc, cs.N, opt);
    if (kind == ModelKind::PetcSim) m = build_petc_sim(cs.disc, m, opt);
  }
  log_line(o, std::string(kind_name(kind)) + ": " + std::to_string(m.count(false)) + " states besides eps");
  write_text(o.out, o.format == "dot" ? model_to_dot(m) : model_to_json(m).dump(1) + "\n");
  return 0;
}

int cmd_analyze(const Options& o) {
  Config c = load(o, false);
  ContractionStage cs = run_contraction(c);
  ModelStage ms = run_models(c, cs, [&](const std::string& s) { log_line(o, s); });
  AnalysisReport rep = run_analysis(c, cs, ms);
  write_text(o.out, o.format == "json" ? rep.to_json().dump(2) + "\n" : rep.to_text());
  return 0;
}

TrafficModel read_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open model '" + path + "'");
  try {
    return model_from_json(nlohmann::json::parse(f));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("model '" + path + "': " + e.what());
  }
}

int cmd_verify(const Options& o) {
  Config c = load(o, false);
  ContractionStage cs = run_contraction(c);
  TrafficModel bisim, sim;
  if (!o.bisim_model.empty() && !o.sim_model.empty()) {
    bisim = read_model(o.bisim_model);
    sim = read_model(o.sim_model);
  } else {
    ModelStage ms = run_models(c, cs, [&](const std::string& s) { log_line(o, s); });
    bisim = std::move(ms.bisim);
    sim = std::move(ms.sim);
  }
  log_line(o, "seed " + std::to_string(c.seed));
  VerifyReport b = check_bisim_sample(cs.disc, bisim, cs.N, o.samples, c.seed);
  VerifyReport s = check_sim_petc(cs.disc, sim, cs.N, o.samples, o.steps, c.seed);
  nlohmann::json j{{"bisim", b.to_json()}, {"petc_sim", s.to_json()}};
  write_text(o.out, j.dump(2) + "\n");
  if (!b.passed() || !s.passed()) throw VerificationError("verification found mismatches (see report)");
  return 0;
}

int cmd_trace(const Options& o) {
  Config c = load(o, false);
  Rational h_P = c.h_P ? *c.h_P : compute_hP(c.sys, c.hP_resolution, c.resolved_h_max());
  DiscretizedPetc d = discretize_system(c.sys, h_P);
  RatVector x0;
  std::stringstream ss(o.x0);
  for (std::string part; std::getline(ss, part, ',');) x0.push_back(parse_rational(part));
  if (static_cast<int>(x0.size()) != d.nx()) throw ConfigError("--x0 must have " + std::to_string(d.nx()) + " entries");
  Trace tr = simulate_trace(d, x0, decimal_rational(o.horizon));
  std::ostringstream os;
  tr.write_csv(os, d);
  write_text(o.out, os.str());
  return 0;
}

int cmd_casestudy(const Options& o) {
  Config c = load(o, true);
  const fs::path dir = o.out.empty() ? fs::path("casestudy_out") : fs::path(o.out);
  fs::create_directories(dir);
  log_line(o, "contraction ...");
  ContractionStage cs = run_contraction(c);
  log_line(o, contraction_text(cs));
  write_text((dir / "contraction.json").string(), contraction_json(cs).dump(2) + "\n");
  ModelStage ms = run_models(c, cs, [&](const std::string& s) { log_line(o, s); });
  write_text((dir / "bisim.json").string(), model_to_json(ms.bisim).dump(1) + "\n");
  write_text((dir / "bisim.dot").string(), model_to_dot(ms.bisim));
  write_text((dir / "petc_sim.json").string(), model_to_json(ms.sim).dump(1) + "\n");
  write_text((dir / "petc_sim.dot").string(), model_to_dot(ms.sim));
  AnalysisReport rep = run_analysis(c, cs, ms);
  write_text((dir / "report.txt").string(), rep.to_text());
  write_text((dir / "report.json").string(), rep.to_json().dump(2) + "\n");

  std::mt19937_64 rng(c.seed);
  std::ostringstream traces;
  bool header = true;
  for (int i = 0; i < 10; ++i) {
    RatVector x0 = sample_sublevel(cs.disc, rng);
    // Scale onto the V0 shell approximately; stays inside X_0.
    Rational v = cs.disc.lyapunov(x0);
    Rational s = approx_sqrt(Rational(cs.disc.V0 / v), 2);
    for (auto& xi : x0) xi *= s;
    while (cs.disc.lyapunov(x0) > cs.disc.V0)
      for (auto& xi : x0) xi *= Rational(999999, 1000000);
    Trace tr = simulate_trace(cs.disc, x0, Rational(3));
    std::ostringstream one;
    tr.write_csv(one, cs.disc);
    std::string body = one.str();
    if (!header) body = body.substr(body.find('\n') + 1);
    std::istringstream lines(body);
    bool first = true;
    for (std::string line; std::getline(lines, line);) {
      if (header && first) traces << "run," << line << "\n";
      else traces << i << "," << line << "\n";
      first = false;
    }
    header = false;
  }
  write_text((dir / "traces.csv").string(), traces.str());

  VerifyReport b = check_bisim_sample(cs.disc, ms.bisim, cs.N, o.samples, c.seed);
  VerifyReport s = check_sim_petc(cs.disc, ms.sim, cs.N, 200, o.steps, c.seed);
  write_text((dir / "verify.json").string(),
             nlohmann::json{{"bisim", b.to_json()}, {"petc_sim", s.to_json()}}.dump(2) + "\n");
  std::cout << rep.to_text();
  std::cout << "verification: bisim " << (b.passed() ? "ok" : "FAILED") << ", petc_sim "
            << (s.passed() ? "ok" : "FAILED") << " (seed " << c.seed << ")\n";
  std::cout << "artifacts in " << dir.string() << "\n";
  if (!b.passed() || !s.passed()) throw VerificationError("verification found mismatches");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traffic models of periodic event-triggered control loops"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config,-c", o.config, "JSON configuration file");
    if (needs_config) opt->required();
    sub->add_option("--out,-o", o.out, "output file (directory for casestudy)");
    sub->add_option("--solver", o.solver, "solver executable");
    sub->add_option("--workers,-j", o.workers, "concurrent solver processes (0: all cores)");
    sub->add_option("--seed", o.seed, "random seed for sampling");
    sub->add_flag("--quiet,-q", o.quiet, "no progress on stderr");
  };

  auto* disc = app.add_subcommand("discretize", "print M(k), N(k), k_lo and h_P");
  common(disc, true);
  disc->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto* con = app.add_subcommand("contraction", "certified a, h_P, N and trace-count bounds");
  common(con, true);
  con->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto* abs = app.add_subcommand("abstract", "build and export a traffic model");
  common(abs, true);
  abs->add_option("--kind", o.kind, "bisim, petc-sim or trivial")
      ->check(CLI::IsMember({"bisim", "petc-sim", "trivial"}));
  abs->add_option("--format", o.format, "json or dot")->check(CLI::IsMember({"json", "dot"}));

  auto* ana = app.add_subcommand("analyze", "full pipeline and report");
  common(ana, true);
  ana->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto* ver = app.add_subcommand("verify", "sampled checks of both models against the concrete loop");
  common(ver, true);
  ver->add_option("--samples", o.samples, "number of random initial states");
  ver->add_option("--steps", o.steps, "PETC steps per sample for the simulating model");
  ver->add_option("--bisim-model", o.bisim_model, "verify this model JSON instead of rebuilding");
  ver->add_option("--sim-model", o.sim_model, "verify this model JSON instead of rebuilding");

  auto* tr = app.add_subcommand("trace", "simulate the mixed strategy from one state (CSV)");
  common(tr, true);
  tr->add_option("--x0", o.x0, "initial state, comma separated rationals")->required();
  tr->add_option("--horizon", o.horizon, "simulated time");

  auto* cs = app.add_subcommand("casestudy", "run the bundled two-state example end to end");
  common(cs, false);
  cs->add_option("--samples", o.samples, "samples for the bisimulation check");
  cs->add_option("--steps", o.steps, "PETC steps per sample for the simulation check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::kConfig);
  }

  try {
    if (*disc) return cmd_discretize(o);
    if (*con) return cmd_contraction(o);
    if (*abs) return cmd_abstract(o);
    if (*ana) return cmd_analyze(o);
    if (*ver) return cmd_verify(o);
    if (*tr) return cmd_trace(o);
    if (*cs) return cmd_casestudy(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return static_cast<int>(ExitCode::kConfig);
  }
  return 0;
}
