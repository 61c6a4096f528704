#pragma once

#include <map>
#include <utility>
#include <vector>

#include "petc/satcheck.hpp"

namespace petc {

struct ContractionCert {
  Rational a;
  Rational tol;
  std::map<int, SatResult> per_k_unsat;                 //!< evidence at the certified a
  std::vector<std::pair<Rational, bool>> bisection_trace;  //!< (candidate, valid)
  std::optional<std::pair<int, RatVector>> violation_below;  //!< (k, x) refuting a - tol
  double seconds = 0;
};

/// Every k in k_lo..k_bar has no state with V(M(k)x) > a V(x).
bool contraction_valid(const DiscretizedPetc& disc, const Rational& a, const SolverConfig& cfg,
                       std::map<int, SatResult>* evidence = nullptr);

/// Smallest a on the grid tol·ℕ that validates; bisection, unknown counts as not validated.
ContractionCert compute_a(const DiscretizedPetc& disc, const Rational& tol, const SolverConfig& cfg);

/// λ_max(M_Pᵀ P M_P − P) ≤ eig_tol for M_P the transition over h_P.
bool periodic_decrease(const PetcSystem& sys, const Rational& h_P, double eig_tol = kEigTol);

/// Largest j·resolution ≤ h_max passing periodic_decrease, scanning down from h_max.
Rational compute_hP(const PetcSystem& sys, const Rational& resolution, const Rational& h_max,
                    double eig_tol = kEigTol);

/// Smallest N ≥ 1 with a^N ≤ r, decided exactly.
int compute_N(const Rational& a, const Rational& r);

struct TraceCountBounds {
  Rational stated;        //!< |K|((|K|−1)^N − 1)/(|K|−1)
  mpz_class stated_floor;
  mpz_class proof_sum;    //!< 1 + Σ_{i=1..N} |K|^i
};

TraceCountBounds trace_count_bounds(int k_size, int N);

/// Scientific rendering with `digits` significant digits, e.g. "8.5e32".
std::string scientific(const Rational& q, int digits);

}  // namespace petc
