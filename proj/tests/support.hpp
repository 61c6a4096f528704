#pragma once

#include <random>

#include "petc/config.hpp"
#include "petc/semantics.hpp"

namespace petc::testing {

inline const Config& cs_config() {
  static const Config c = casestudy_config();
  return c;
}

/// Case-study loop discretized at the known h_P = 0.4.
inline const DiscretizedPetc& cs_disc() {
  static const DiscretizedPetc d = discretize_system(cs_config().sys, Rational(2, 5));
  return d;
}

/// Same loop with r = 1/2 (short horizon).
inline const DiscretizedPetc& fast_disc() {
  static const DiscretizedPetc d = [] {
    PetcSystem s = cs_config().sys;
    s.r = Rational(1, 2);
    return discretize_system(s, Rational(2, 5));
  }();
  return d;
}

inline SolverConfig solver() { return cs_config().solver; }

inline RatVector random_point(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  RatVector x(static_cast<size_t>(n));
  for (auto& v : x) v = to_rational(u(rng));
  return x;
}

}  // namespace petc::testing
