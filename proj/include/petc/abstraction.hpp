#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "petc/satcheck.hpp"

namespace petc {

enum class ModelKind { Trivial, MpetcBisim, PetcSim };

const char* kind_name(ModelKind k);
ModelKind parse_kind(const std::string& s);

/// Finite traffic model. States are sorted lexicographically (ε first); edges sorted.
struct TrafficModel {
  ModelKind kind = ModelKind::Trivial;
  Rational h;
  Rational h_P;
  int k_lo = 1;
  int k_bar = 1;
  bool over_approximation = false;  //!< unknown answers were kept as sat
  std::vector<Word> states;
  std::vector<std::optional<RatVector>> witnesses;
  std::vector<std::pair<size_t, size_t>> edges;

  [[nodiscard]] std::optional<size_t> find(const Word& w) const;
  [[nodiscard]] bool contains(const Word& w) const { return find(w).has_value(); }
  [[nodiscard]] bool has_edge(size_t from, size_t to) const;
  /// h·k₁ for k₁σ, h_P for ε.
  [[nodiscard]] Rational output(size_t i) const;
  [[nodiscard]] size_t count(bool include_eps) const;
  [[nodiscard]] std::vector<size_t> out_degrees() const;
};

struct BuildStats {
  std::size_t queries = 0;
  std::size_t solver_calls = 0;
  std::size_t unknowns = 0;
  double solver_seconds = 0;
  double wall_seconds = 0;
  std::vector<std::size_t> states_per_level;
};

struct BisimOptions {
  SolverConfig solver;
  bool prefix_pruning = true;  //!< append letters, prune on unsat prefixes; otherwise prepend to states
  bool assume_sat = false;
  std::function<void(int level, std::size_t states)> progress;
};

/// All words over {k_lo..k_bar} of length ≤ N, tree edges into ε. Throws ConfigError past `cap` states.
TrafficModel build_trivial(int k_lo, int k_bar, int N, const Rational& h, const Rational& h_P,
                           std::uint64_t cap = 1000000);

TrafficModel build_mpetc_bisim(const DiscretizedPetc& disc, int N, const BisimOptions& opt,
                               BuildStats* stats = nullptr);

/// Re-checks each non-ε state of `bisim` on the unit shell and links kσ → τ when σ is a prefix of τ.
TrafficModel build_petc_sim(const DiscretizedPetc& disc, const TrafficModel& bisim, const BisimOptions& opt,
                            BuildStats* stats = nullptr);

/// Recomputes the edge relation from the state set according to the model kind.
void rebuild_edges(TrafficModel& m);

nlohmann::json model_to_json(const TrafficModel& m);
TrafficModel model_from_json(const nlohmann::json& j);
std::string model_to_dot(const TrafficModel& m);

}  // namespace petc
