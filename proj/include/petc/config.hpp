#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>

#include "petc/satcheck.hpp"

namespace petc {

struct Config {
  PetcSystem sys;
  std::optional<PredictiveTriggerSpec> predictive;  //!< set when Q_trig was built from Q_lyap and rho
  std::optional<Rational> h_P;                      //!< computed when absent
  Rational hP_resolution{1, 100};
  std::optional<Rational> h_max;  //!< default 2·k̄·h
  Rational a_tol{1, 1000};
  std::optional<Rational> a;  //!< checked instead of bisected when present
  SolverConfig solver;
  std::uint64_t seed = 1;
  bool count_eps = false;
  bool prefix_pruning = true;
  bool assume_sat = false;
  std::uint64_t trivial_cap = 1000000;

  [[nodiscard]] Rational resolved_h_max() const;
};

/// Throws ConfigError on missing or inconsistent fields.
Config parse_config(const nlohmann::json& j);
Config load_config(const std::string& path);

/// The two-state example with the predictive Lyapunov trigger (ρ = 0.8, h = 0.1, k̄ = 6, r = 0.1).
nlohmann::json casestudy_json();
Config casestudy_config();

}  // namespace petc
