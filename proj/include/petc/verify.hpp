#pragma once

#include <cstdint>
#include <json.hpp>
#include <random>
#include <string>
#include <vector>

#include "petc/abstraction.hpp"

namespace petc {

/// Uniform dyadic point of the P-ellipsoid {xᵀPx ≤ V0}, rejection-sampled from its bounding box.
RatVector sample_sublevel(const DiscretizedPetc& disc, std::mt19937_64& rng);

/// Non-zero dyadic point of the unit ball (a direction; words are scale-free).
RatVector sample_direction(int n, std::mt19937_64& rng);

struct Mismatch {
  std::string kind;
  std::size_t sample = 0;
  int step = 0;
  RatVector x0;
  Word expected;
  Word got;
  std::string detail;
};

struct VerifyReport {
  std::string check;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  int steps = 0;
  std::size_t forward_mismatches = 0;
  std::size_t replay_total = 0;
  std::size_t replay_ok = 0;
  std::size_t states_without_witness = 0;
  std::size_t missing_states = 0;
  std::size_t missing_edges = 0;
  std::size_t output_mismatches = 0;
  std::vector<Mismatch> failures;  //!< at most 20 kept

  [[nodiscard]] bool passed() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Forward: sampled x0 ∈ X_0 land on a state whose trace matches the concrete one.
/// Backward: every witness replays to its own word.
VerifyReport check_bisim_sample(const DiscretizedPetc& disc, const TrafficModel& model, int N,
                                std::size_t n_samples, std::uint64_t seed, int periodic_steps = 3);

/// Along `steps` plain PETC steps from random x0, consecutive state words are model states joined by edges.
VerifyReport check_sim_petc(const DiscretizedPetc& disc, const TrafficModel& model, int N, std::size_t n_samples,
                            int steps, std::uint64_t seed);

/// samples / elapsed time over a plain PETC run, states rounded to `bits` relative bits between steps.
Rational empirical_frequency(const DiscretizedPetc& disc, const RatVector& x0, int samples, int bits = 256);

}  // namespace petc
