#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "petc/abstraction.hpp"
#include "petc/contraction.hpp"

namespace petc {

struct FreqBound {
  Rational f_star;
  Word word;
};

struct DecayBound {
  Rational T_star;
  Word word;
  double b_star = 0;
};

/// max over non-ε states of |σ| / (h Σ k); ties go to the lexicographically smallest word.
FreqBound avg_freq_bound(const TrafficModel& model);

/// h · max Σk over non-ε states.
DecayBound longest_time(const TrafficModel& model);

/// −ln(r) / (2 T*), natural log.
double decay_rate(const Rational& r, const Rational& T_star);

/// T* over the model and b* from it.
DecayBound ges_decay_bound(const TrafficModel& model, const Rational& r);

struct AnalysisReport {
  Rational a;
  Rational h;
  Rational h_P;
  Rational r;
  int N = 0;
  int k_lo = 1;
  int k_bar = 1;
  std::size_t bisim_states = 0;  //!< ε excluded
  std::size_t sim_states = 0;
  bool eps_counted = false;
  TraceCountBounds lemma_bounds;
  DecayBound bisim_time;
  DecayBound sim_time;
  FreqBound freq;
  double contraction_seconds = 0;
  double bisim_seconds = 0;
  double sim_seconds = 0;
  double solver_seconds = 0;
  bool over_approximation = false;

  [[nodiscard]] std::string to_text() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

AnalysisReport make_report(const ContractionCert& cert, int N, const DiscretizedPetc& disc,
                           const TrafficModel& bisim, const TrafficModel& sim, bool count_eps);

/// Fixed-point rendering of a rational with `digits` decimals.
std::string decimal(const Rational& q, int digits);

}  // namespace petc
