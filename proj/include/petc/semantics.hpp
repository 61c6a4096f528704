#pragma once

#include <iosfwd>
#include <string>
#include <optional>
#include <vector>

#include "petc/sysmodel.hpp"

namespace petc {

/// A word k₁…k_m of discrete inter-event times; the empty word is ε.
using Word = std::vector<int>;

/// κ(x) = min{k ≥ k_lo : xᵀN(k)x > 0 or k = k̄}, exact. κ(0) = k̄.
int kappa(const DiscretizedPetc& disc, const RatVector& x);

/// x ∈ Q_k: xᵀN(k)x > 0 unless k = k̄, and xᵀN(j)x ≤ 0 for k_lo ≤ j < k.
bool in_cone(const DiscretizedPetc& disc, const RatVector& x, int k);

struct StepResult {
  RatVector x;
  Rational time;
  bool periodic = false;
};

/// One step of the mixed strategy: PETC while V(x) > rV0, period h_P once V(x) ≤ rV0.
StepResult mpetc_step(const DiscretizedPetc& disc, const RatVector& x);

/// One step of plain PETC (no periodic phase).
StepResult petc_step(const DiscretizedPetc& disc, const RatVector& x);

/// Inter-event word generated from x0 until the first state with V ≤ rV0.
/// Throws VerificationError when the word grows past max_len (a > certified contraction).
Word concrete_sequence(const DiscretizedPetc& disc, const RatVector& x0, int max_len);

/// Word generated from x until V ≤ r·V(x), with no reference to V0 (the unit-shell word of x/√V(x)).
Word petc_word(const DiscretizedPetc& disc, const RatVector& x, int max_len);

struct Trace {
  std::vector<Rational> times;  //!< inter-sample times
  std::vector<RatVector> states;
  std::optional<size_t> entered_periodic_at;

  void write_csv(std::ostream& os, const DiscretizedPetc& disc) const;
};

/// Samples states until the accumulated time would exceed horizon.
Trace simulate_trace(const DiscretizedPetc& disc, const RatVector& x0, const Rational& horizon);

/// x with every entry rounded to `bits` bits below its largest entry. Bounds rational growth in long runs.
RatVector round_dyadic(const RatVector& x, int bits);

std::string word_to_string(const Word& w);

}  // namespace petc
