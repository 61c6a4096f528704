#include "petc/pipeline.hpp"

#include <chrono>

#include "petc/errors.hpp"

namespace petc {

ContractionStage run_contraction(const Config& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  ContractionStage cs;
  Rational h_P;
  if (cfg.h_P) {
    h_P = *cfg.h_P;
  } else {
    h_P = compute_hP(cfg.sys, cfg.hP_resolution, cfg.resolved_h_max());
    cs.h_P_computed = true;
  }
  cs.fd = discretize_float(cfg.sys, h_P);
  cs.disc = rationalize(cs.fd);
  if (cfg.a) {
    cs.cert.a = *cfg.a;
    cs.cert.tol = cfg.a_tol;
    const bool ok = contraction_valid(cs.disc, *cfg.a, cfg.solver, &cs.cert.per_k_unsat);
    cs.cert.bisection_trace.emplace_back(*cfg.a, ok);
    if (!ok) throw VerificationError("configured a = " + to_string(*cfg.a) + " is not certified by the solver");
  } else {
    cs.cert = compute_a(cs.disc, cfg.a_tol, cfg.solver);
  }
  cs.N = compute_N(cs.cert.a, cfg.sys.r);
  cs.bounds = trace_count_bounds(std::max(2, cs.disc.k_size()), cs.N);
  cs.cert.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return cs;
}

ModelStage run_models(const Config& cfg, const ContractionStage& cs,
                      const std::function<void(const std::string&)>& log) {
  BisimOptions opt;
  opt.solver = cfg.solver;
  opt.prefix_pruning = cfg.prefix_pruning;
  opt.assume_sat = cfg.assume_sat;
  if (log)
    opt.progress = [&](int level, std::size_t n) {
      log("level " + std::to_string(level) + ": " + std::to_string(n) + " states");
    };
  ModelStage ms;
  ms.bisim = build_mpetc_bisim(cs.disc, cs.N, opt, &ms.bisim_stats);
  if (log) log("bisimilar model: " + std::to_string(ms.bisim.count(false)) + " states besides eps");
  ms.sim = build_petc_sim(cs.disc, ms.bisim, opt, &ms.sim_stats);
  if (log) log("simulating model: " + std::to_string(ms.sim.count(false)) + " states");
  return ms;
}

AnalysisReport run_analysis(const Config& cfg, const ContractionStage& cs, const ModelStage& ms) {
  AnalysisReport rep = make_report(cs.cert, cs.N, cs.disc, ms.bisim, ms.sim, cfg.count_eps);
  rep.contraction_seconds = cs.cert.seconds;
  rep.bisim_seconds = ms.bisim_stats.wall_seconds;
  rep.sim_seconds = ms.sim_stats.wall_seconds;
  rep.solver_seconds = ms.bisim_stats.solver_seconds + ms.sim_stats.solver_seconds;
  return rep;
}

}  // namespace petc
