#pragma once

#include <functional>
#include <string>

#include "petc/analysis.hpp"
#include "petc/config.hpp"
#include "petc/verify.hpp"

namespace petc {

struct ContractionStage {
  FloatDiscretization fd;
  DiscretizedPetc disc;
  ContractionCert cert;
  int N = 0;
  TraceCountBounds bounds;
  bool h_P_computed = false;
};

/// h_P (scan unless configured), exact discretization, a (bisection unless configured), N.
ContractionStage run_contraction(const Config& cfg);

struct ModelStage {
  TrafficModel bisim;
  TrafficModel sim;
  BuildStats bisim_stats;
  BuildStats sim_stats;
};

ModelStage run_models(const Config& cfg, const ContractionStage& cs,
                      const std::function<void(const std::string&)>& log = {});

AnalysisReport run_analysis(const Config& cfg, const ContractionStage& cs, const ModelStage& ms);

}  // namespace petc
