#pragma once

#include <optional>
#include <string>
#include <vector>

#include "petc/semantics.hpp"

namespace petc {

enum class Rel { Gt, Ge, Le, Lt, Eq };

/// xᵀFx rel rhs.
struct QuadAtom {
  RatMatrix F;
  Rel rel = Rel::Gt;
  Rational rhs;
};

/// Conjunction of quadratic atoms over ℝ^nx.
struct SatQuery {
  int nx = 0;
  std::vector<QuadAtom> atoms;
};

enum class SatStatus { Sat, Unsat, Unknown };

struct SatResult {
  SatStatus status = SatStatus::Unknown;
  std::optional<RatVector> witness;  //!< present iff Sat; every atom holds exactly
  double solver_time = 0;            //!< seconds spent in solver processes
  int solver_calls = 0;
  std::string note;
};

enum class Shell { Sublevel, UnitLevel };

struct SolverConfig {
  std::string path = "z3";
  std::vector<std::string> args = {"-in"};
  double budget_s = 30;
  int workers = 0;     //!< 0: hardware concurrency
  bool reduce = true;  //!< radial elimination before calling the solver
};

[[nodiscard]] int effective_workers(int requested);

bool holds(const QuadAtom& atom, const RatVector& x);
bool holds(const SatQuery& q, const RatVector& x);

const char* rel_symbol(Rel r);

/**
 * Conjunction describing all x that generate `word` before entering X_P.
 * Sublevel: xᵀPx ≤ V0 and the X_P atoms against r·V0.
 * UnitLevel: the X_P atoms are homogeneous (Φᵀ P Φ − rP) so that x and x/√V(x) agree,
 * plus xᵀPx ≤ V0 to bound the search.
 * terminal = false drops the final X_P entry atom (prefix feasibility).
 */
SatQuery sequence_query(const DiscretizedPetc& disc, const Word& word, Shell shell, bool terminal = true);

/// x ∈ Q_k and V(M(k)x) > a·V(x) and V(x) ≤ 1.
SatQuery contraction_query(const DiscretizedPetc& disc, int k, const Rational& a);

/// Deterministic SMT-LIB script: integer coefficients, variables named by `names`.
std::string to_smtlib(const SatQuery& q, const std::vector<std::string>& names);

/// Decides the query; sat answers always carry an exactly verified witness.
SatResult check(const SatQuery& q, const SolverConfig& cfg);

/// check() over a batch, results in input order.
std::vector<SatResult> check_all(const std::vector<SatQuery>& qs, const SolverConfig& cfg);

SatResult contraction_counterexample(const DiscretizedPetc& disc, int k, const Rational& a,
                                     const SolverConfig& cfg);

namespace detail {

/// Raw solver answer for a script whose variables are `names`.
struct RawAnswer {
  SatStatus status = SatStatus::Unknown;
  std::vector<std::vector<Rational>> candidates;  //!< model values, most precise reading first
  double seconds = 0;
};

RawAnswer run_solver(const std::string& script, const std::vector<std::string>& names, const SolverConfig& cfg);

/// Parses z3 model output: (define-fun name () Real value) with rationals, decimals, "?" approximations.
std::optional<Rational> parse_model_value(const std::string& sexpr);

}  // namespace detail

}  // namespace petc
