#include "petc/satcheck.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "petc/errors.hpp"
#include "subprocess.hpp"

namespace petc {

namespace {

using Clock = std::chrono::steady_clock;

bool compare(const Rational& lhs, Rel rel, const Rational& rhs) {
  switch (rel) {
    case Rel::Gt: return lhs > rhs;
    case Rel::Ge: return lhs >= rhs;
    case Rel::Le: return lhs <= rhs;
    case Rel::Lt: return lhs < rhs;
    case Rel::Eq: return lhs == rhs;
  }
  return false;
}

mpz_class lcm_denominators(const QuadAtom& a) {
  mpz_class l = a.rhs.get_den();
  for (int i = 0; i < a.F.rows(); ++i)
    for (int j = i; j < a.F.cols(); ++j) {
      Rational c = i == j ? a.F(i, j) : Rational(a.F(i, j) + a.F(j, i));
      c.canonicalize();
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    }
  return l;
}

std::string smt_int(const mpz_class& z) {
  if (z < 0) return "(- " + mpz_class(-z).get_str() + ")";
  return z.get_str();
}

std::string product(const std::string& a, const std::string& b) {
  if (a.empty() && b.empty()) return "";
  if (a.empty()) return b;
  if (b.empty()) return a;
  return "(* " + a + " " + b + ")";
}

// ---- model parsing -------------------------------------------------------

struct Sexp {
  std::string atom;
  std::vector<Sexp> list;
  bool is_list = false;
};

class SexpReader {
 public:
  explicit SexpReader(std::string_view text) : s_(text) {}

  std::optional<Sexp> next() {
    skip();
    if (pos_ >= s_.size()) return std::nullopt;
    return read();
  }

 private:
  void skip() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == ';') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  Sexp read() {
    Sexp e;
    if (s_[pos_] == '(') {
      ++pos_;
      e.is_list = true;
      while (true) {
        skip();
        if (pos_ >= s_.size()) throw SolverTransportError("solver reply: unbalanced parentheses");
        if (s_[pos_] == ')') {
          ++pos_;
          break;
        }
        e.list.push_back(read());
      }
      return e;
    }
    if (s_[pos_] == ')') throw SolverTransportError("solver reply: unexpected ')'");
    size_t start = pos_;
    if (s_[pos_] == '"' || s_[pos_] == '|') {
      const char close = s_[pos_];
      ++pos_;
      while (pos_ < s_.size() && s_[pos_] != close) ++pos_;
      ++pos_;
    } else {
      while (pos_ < s_.size() && s_[pos_] != '(' && s_[pos_] != ')' && s_[pos_] != ' ' && s_[pos_] != '\n' &&
             s_[pos_] != '\t' && s_[pos_] != '\r')
        ++pos_;
    }
    e.atom = std::string(s_.substr(start, pos_ - start));
    return e;
  }

  std::string_view s_;
  size_t pos_ = 0;
};

std::optional<Rational> eval_value(const Sexp& e) {
  if (!e.is_list) {
    std::string t = e.atom;
    if (!t.empty() && t.back() == '?') t.pop_back();
    try {
      return parse_rational(t);
    } catch (const std::invalid_argument&) {
      return std::nullopt;
    }
  }
  if (e.list.empty() || e.list[0].is_list) return std::nullopt;
  const std::string& op = e.list[0].atom;
  if (op == "-" && e.list.size() == 2) {
    auto v = eval_value(e.list[1]);
    if (!v) return std::nullopt;
    return Rational(-*v);
  }
  if (op == "/" && e.list.size() == 3) {
    auto n = eval_value(e.list[1]);
    auto d = eval_value(e.list[2]);
    if (!n || !d || *d == 0) return std::nullopt;
    Rational q = *n / *d;
    q.canonicalize();
    return q;
  }
  return std::nullopt;
}

// (define-fun name () Real value) entries of a model list.
std::map<std::string, Sexp> model_entries(const Sexp& model) {
  std::map<std::string, Sexp> out;
  for (const auto& d : model.list) {
    if (!d.is_list || d.list.size() != 5 || d.list[0].is_list || d.list[0].atom != "define-fun") continue;
    out[d.list[1].atom] = d.list[4];
  }
  return out;
}

bool is_model(const Sexp& e) {
  if (!e.is_list) return false;
  if (e.list.empty()) return true;
  for (const auto& d : e.list) {
    if (!d.is_list && d.atom == "model") continue;
    if (!d.is_list || d.list.empty() || d.list[0].is_list || d.list[0].atom != "define-fun") return false;
  }
  return true;
}

RatVector round_to_bits(const RatVector& v, int bits) {
  mpz_class scale = 1;
  mpz_class one = 1;
  mpz_mul_2exp(scale.get_mpz_t(), one.get_mpz_t(), static_cast<mp_bitcnt_t>(bits));
  RatVector out;
  out.reserve(v.size());
  for (const auto& x : v) {
    Rational shifted = x * scale + Rational(1, 2);
    mpz_class n;
    mpz_fdiv_q(n.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
    Rational q(n, scale);
    q.canonicalize();
    out.push_back(std::move(q));
  }
  return out;
}

// Model readings followed by dyadic roundings of increasing precision.
std::vector<RatVector> refinement_candidates(const std::vector<RatVector>& readings) {
  std::vector<RatVector> out = readings;
  for (const auto& r : readings)
    for (int bits : {4, 8, 16, 24, 32, 48, 64, 96, 128}) out.push_back(round_to_bits(r, bits));
  return out;
}

// ---- radial elimination --------------------------------------------------

struct Bound {
  const RatMatrix* F;
  Rational c;
  bool strict;
};

struct Reduction {
  std::vector<QuadAtom> homogeneous;  // in u, rhs 0
  std::vector<Bound> lower;           // |x|-scaling: t² q_F(u) > c
  std::vector<Bound> upper;           // t² q_F(u) < c
  bool nonzero_infeasible = false;
};

// Every non-homogeneous atom must have a positive definite form; x = t·u then turns each into
// a bound on t², and feasibility in t becomes pairwise homogeneous conditions on u.
std::optional<Reduction> reduce(const SatQuery& q) {
  Reduction red;
  for (const auto& a : q.atoms) {
    if (a.rhs == 0) {
      red.homogeneous.push_back(a);
      continue;
    }
    if (!is_positive_definite(a.F)) return std::nullopt;
    const bool lower = a.rel == Rel::Gt || a.rel == Rel::Ge || a.rel == Rel::Eq;
    const bool upper = a.rel == Rel::Lt || a.rel == Rel::Le || a.rel == Rel::Eq;
    if (lower && sgn(a.rhs) > 0) red.lower.push_back({&a.F, a.rhs, a.rel == Rel::Gt});
    if (upper) {
      if (sgn(a.rhs) < 0) red.nonzero_infeasible = true;
      else red.upper.push_back({&a.F, a.rhs, a.rel == Rel::Lt});
    }
  }
  for (const auto& lo : red.lower)
    for (const auto& up : red.upper) {
      QuadAtom pair{up.c * *lo.F - lo.c * *up.F, (lo.strict || up.strict) ? Rel::Gt : Rel::Ge, 0};
      red.homogeneous.push_back(std::move(pair));
    }
  return red;
}

bool in_interval(const Rational& s, const Reduction& red, const RatVector& u) {
  for (const auto& b : red.lower) {
    Rational lhs = s * quad_form(*b.F, u);
    if (b.strict ? !(lhs > b.c) : !(lhs >= b.c)) return false;
  }
  for (const auto& b : red.upper) {
    Rational lhs = s * quad_form(*b.F, u);
    if (b.strict ? !(lhs < b.c) : !(lhs <= b.c)) return false;
  }
  return true;
}

std::optional<Rational> exact_sqrt(const Rational& q) {
  if (sgn(q) < 0) return std::nullopt;
  if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t())) return std::nullopt;
  mpz_class n, d;
  mpz_sqrt(n.get_mpz_t(), q.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), q.get_den_mpz_t());
  return Rational(n, d);
}

// Rational t > 0 with t·u satisfying every bound.
std::optional<Rational> lift(const Reduction& red, const RatVector& u) {
  std::optional<Rational> lo, hi;
  for (const auto& b : red.lower) {
    Rational v = b.c / quad_form(*b.F, u);
    if (!lo || v > *lo) lo = v;
  }
  for (const auto& b : red.upper) {
    Rational v = b.c / quad_form(*b.F, u);
    if (!hi || v < *hi) hi = v;
  }
  if (in_interval(1, red, u)) return Rational(1);
  for (const auto* end : {&hi, &lo}) {
    if (!*end) continue;
    if (auto t = exact_sqrt(**end); t && sgn(*t) > 0 && in_interval(*t * *t, red, u)) return t;
  }
  Rational target;
  if (lo && hi) target = (*lo + *hi) / 2;
  else if (lo) target = *lo * 2;
  else if (hi) target = *hi / 2;
  else target = 1;
  if (sgn(target) <= 0) return std::nullopt;
  for (int steps = 1; steps <= 10; ++steps) {
    Rational t = approx_sqrt(target, steps);
    if (in_interval(t * t, red, u)) return t;
  }
  return std::nullopt;
}

std::vector<std::string> variable_names(int n, int first_free) {
  std::vector<std::string> names(static_cast<size_t>(n));
  for (int i = first_free; i < n; ++i) names[static_cast<size_t>(i)] = "x" + std::to_string(i);
  return names;
}

// Vectors for a slice whose leading free coordinates were fixed: u_i = 1, u_{<i} = 0.
RatVector slice_vector(int n, int fixed, const RatVector& free_values) {
  RatVector u(static_cast<size_t>(n));
  u[static_cast<size_t>(fixed)] = 1;
  for (int i = fixed + 1; i < n; ++i) u[static_cast<size_t>(i)] = free_values[static_cast<size_t>(i)];
  return u;
}

double seconds_left(Clock::time_point deadline) {
  return std::chrono::duration<double>(deadline - Clock::now()).count();
}

SolverConfig with_budget(const SolverConfig& cfg, Clock::time_point deadline) {
  SolverConfig c = cfg;
  c.budget_s = std::max(0.0, seconds_left(deadline));
  return c;
}

SatResult check_direct(const SatQuery& q, const SolverConfig& cfg, Clock::time_point deadline, SatResult acc) {
  const auto names = variable_names(q.nx, 0);
  if (seconds_left(deadline) <= 0) {
    acc.status = SatStatus::Unknown;
    acc.note = "budget exhausted";
    return acc;
  }
  auto raw = detail::run_solver(to_smtlib(q, names), names, with_budget(cfg, deadline));
  acc.solver_time += raw.seconds;
  acc.solver_calls += 1;
  acc.status = raw.status;
  if (raw.status != SatStatus::Sat) return acc;
  for (const auto& x : refinement_candidates(raw.candidates))
    if (holds(q, x)) {
      acc.witness = x;
      return acc;
    }
  acc.status = SatStatus::Unknown;
  acc.note = "solver model failed exact verification";
  return acc;
}

}  // namespace

int effective_workers(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

const char* rel_symbol(Rel r) {
  switch (r) {
    case Rel::Gt: return ">";
    case Rel::Ge: return ">=";
    case Rel::Le: return "<=";
    case Rel::Lt: return "<";
    case Rel::Eq: return "=";
  }
  return "?";
}

bool holds(const QuadAtom& atom, const RatVector& x) { return compare(quad_form(atom.F, x), atom.rel, atom.rhs); }

bool holds(const SatQuery& q, const RatVector& x) {
  return std::all_of(q.atoms.begin(), q.atoms.end(), [&](const QuadAtom& a) { return holds(a, x); });
}

SatQuery sequence_query(const DiscretizedPetc& disc, const Word& word, Shell shell, bool terminal) {
  if (word.empty()) throw ConfigError("sequence_query: empty word");
  const int n = disc.nx();
  SatQuery q{n, {}};
  const Rational rV0 = disc.r * disc.V0;
  const RatMatrix rP = disc.r * disc.P;
  auto exits = [&](const RatMatrix& phi, Rel rel) {
    RatMatrix F = congruence(phi, disc.P);
    if (shell == Shell::UnitLevel) q.atoms.push_back({F - rP, rel, 0});
    else q.atoms.push_back({std::move(F), rel, rV0});
  };
  q.atoms.push_back({disc.P, Rel::Le, disc.V0});
  RatMatrix phi = RatMatrix::identity(n);
  for (int k : word) {
    if (k < 1 || k > disc.k_bar) throw ConfigError("sequence_query: entry " + std::to_string(k) + " outside 1..k_bar");
    if (k < disc.k_bar) q.atoms.push_back({congruence(phi, disc.n(k)), Rel::Gt, 0});
    for (int j = disc.k_lo; j < k; ++j) q.atoms.push_back({congruence(phi, disc.n(j)), Rel::Le, 0});
    exits(phi, Rel::Gt);
    phi = disc.m(k) * phi;
  }
  if (terminal) exits(phi, Rel::Le);
  return q;
}

SatQuery contraction_query(const DiscretizedPetc& disc, int k, const Rational& a) {
  if (k < disc.k_lo || k > disc.k_bar) throw ConfigError("contraction_query: k outside k_lo..k_bar");
  SatQuery q{disc.nx(), {}};
  q.atoms.push_back({disc.P, Rel::Le, 1});
  if (k < disc.k_bar) q.atoms.push_back({disc.n(k), Rel::Gt, 0});
  for (int j = disc.k_lo; j < k; ++j) q.atoms.push_back({disc.n(j), Rel::Le, 0});
  q.atoms.push_back({congruence(disc.m(k), disc.P) - a * disc.P, Rel::Gt, 0});
  return q;
}

std::string to_smtlib(const SatQuery& q, const std::vector<std::string>& names) {
  if (static_cast<int>(names.size()) != q.nx) throw ConfigError("to_smtlib: name count mismatch");
  std::ostringstream os;
  os << "(set-logic QF_NRA)\n";
  for (const auto& nm : names)
    if (!nm.empty()) os << "(declare-fun " << nm << " () Real)\n";
  for (const auto& a : q.atoms) {
    const mpz_class scale = lcm_denominators(a);
    std::vector<std::string> terms;
    mpz_class constant = 0;
    for (int i = 0; i < q.nx; ++i)
      for (int j = i; j < q.nx; ++j) {
        Rational c = i == j ? a.F(i, j) : Rational(a.F(i, j) + a.F(j, i));
        c *= scale;
        c.canonicalize();
        if (c == 0) continue;
        const mpz_class z = c.get_num();
        const std::string mono = product(names[static_cast<size_t>(i)], names[static_cast<size_t>(j)]);
        if (mono.empty()) constant += z;
        else terms.push_back(z == 1 ? mono : "(* " + smt_int(z) + " " + mono + ")");
      }
    if (constant != 0) terms.insert(terms.begin(), smt_int(constant));
    Rational rhs = a.rhs * scale;
    rhs.canonicalize();
    std::string lhs;
    if (terms.empty()) lhs = "0";
    else if (terms.size() == 1) lhs = terms[0];
    else {
      lhs = "(+";
      for (const auto& t : terms) lhs += " " + t;
      lhs += ")";
    }
    os << "(assert (" << rel_symbol(a.rel) << " " << lhs << " " << smt_int(rhs.get_num()) << "))\n";
  }
  return os.str();
}

SatResult check(const SatQuery& q, const SolverConfig& cfg) {
  if (q.atoms.empty()) throw ConfigError("check: empty query");
  if (q.nx < 1) throw ConfigError("check: dimension must be positive");
  for (const auto& a : q.atoms)
    if (a.F.rows() != q.nx || a.F.cols() != q.nx) throw ConfigError("check: atom dimension mismatch");
  if (!(cfg.budget_s > 0)) throw ConfigError("check: budget must be positive");

  const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                            std::chrono::duration<double>(cfg.budget_s));
  SatResult res;
  const RatVector zero(static_cast<size_t>(q.nx));
  if (holds(q, zero)) {
    res.status = SatStatus::Sat;
    res.witness = zero;
    return res;
  }
  if (!cfg.reduce) return check_direct(q, cfg, deadline, res);
  auto red = reduce(q);
  if (!red) return check_direct(q, cfg, deadline, res);
  if (red->nonzero_infeasible) {
    res.status = SatStatus::Unsat;
    return res;
  }

  const int n = q.nx;
  SatQuery hom{n, red->homogeneous};
  bool unknown = false;
  auto try_lift = [&](const RatVector& u) -> bool {
    if (!holds(hom, u)) return false;
    auto t = lift(*red, u);
    if (!t) return false;
    RatVector x = u;
    for (auto& xi : x) xi *= *t;
    if (!holds(q, x)) return false;
    res.status = SatStatus::Sat;
    res.witness = std::move(x);
    return true;
  };

  // Slice with no free coordinates: u = e_{n-1}.
  {
    RatVector u(static_cast<size_t>(n));
    u[static_cast<size_t>(n - 1)] = 1;
    if (hom.atoms.empty() || holds(hom, u)) {
      if (try_lift(u)) return res;
      return check_direct(q, cfg, deadline, res);
    }
  }
  for (int fixed = 0; fixed < n - 1; ++fixed) {
    // u = e_fixed + Σ_{i>fixed} y_i e_i.
    SatQuery slice{n, {}};
    for (const auto& a : hom.atoms) {
      QuadAtom s{RatMatrix(n, n), a.rel, 0};
      for (int i = fixed; i < n; ++i)
        for (int j = fixed; j < n; ++j) s.F(i, j) = a.F(i, j);
      slice.atoms.push_back(std::move(s));
    }
    auto names = variable_names(n, fixed + 1);
    if (seconds_left(deadline) <= 0) {
      unknown = true;
      break;
    }
    auto raw = detail::run_solver(to_smtlib(slice, names), names, with_budget(cfg, deadline));
    res.solver_time += raw.seconds;
    res.solver_calls += 1;
    if (raw.status == SatStatus::Unknown) {
      unknown = true;
      continue;
    }
    if (raw.status == SatStatus::Unsat) continue;
    for (const auto& vals : refinement_candidates(raw.candidates))
      if (try_lift(slice_vector(n, fixed, vals))) return res;
    return check_direct(q, cfg, deadline, res);
  }
  res.status = unknown ? SatStatus::Unknown : SatStatus::Unsat;
  if (unknown) res.note = "solver returned unknown or timed out";
  return res;
}

std::vector<SatResult> check_all(const std::vector<SatQuery>& qs, const SolverConfig& cfg) {
  std::vector<SatResult> out(qs.size());
  std::vector<std::exception_ptr> errors(qs.size());
  std::atomic<size_t> next{0};
  const size_t workers = std::min(qs.size(), static_cast<size_t>(effective_workers(cfg.workers)));
  auto work = [&] {
    for (size_t i = next++; i < qs.size(); i = next++) {
      try {
        out[i] = check(qs[i], cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

SatResult contraction_counterexample(const DiscretizedPetc& disc, int k, const Rational& a, const SolverConfig& cfg) {
  if (sgn(a) <= 0 || a >= 1) throw ConfigError("contraction_counterexample: a must lie in (0, 1)");
  return check(contraction_query(disc, k, a), cfg);
}

namespace detail {

std::optional<Rational> parse_model_value(const std::string& sexpr) {
  SexpReader rd(sexpr);
  auto e = rd.next();
  if (!e) return std::nullopt;
  return eval_value(*e);
}

RawAnswer run_solver(const std::string& script, const std::vector<std::string>& names, const SolverConfig& cfg) {
  std::string full = script;
  full +=
      "(check-sat)\n(get-model)\n(set-option :pp.decimal true)\n(set-option :pp.decimal_precision 40)\n"
      "(get-model)\n(exit)\n";
  std::vector<std::string> argv;
  argv.push_back(cfg.path);
  argv.insert(argv.end(), cfg.args.begin(), cfg.args.end());
  const auto t0 = Clock::now();
  ProcessResult pr = run_process(argv, full, cfg.budget_s);
  RawAnswer ans;
  ans.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  if (pr.timed_out) return ans;

  SexpReader rd(pr.output);
  auto first = rd.next();
  if (!first || first->is_list)
    throw SolverTransportError("solver '" + cfg.path + "' gave no verdict (exit status " +
                               std::to_string(pr.exit_status) + "): " + pr.output.substr(0, 400));
  if (first->atom == "unsat") {
    ans.status = SatStatus::Unsat;
    return ans;
  }
  if (first->atom == "unknown" || first->atom == "timeout") return ans;
  if (first->atom != "sat")
    throw SolverTransportError("solver '" + cfg.path + "' replied '" + pr.output.substr(0, 400) + "'");
  ans.status = SatStatus::Sat;

  std::vector<Sexp> models;
  while (auto e = rd.next())
    if (is_model(*e)) models.push_back(std::move(*e));
  if (models.empty()) throw SolverTransportError("solver reported sat without a model");

  const auto exact = model_entries(models.front());
  const auto decimal = models.size() > 1 ? model_entries(models[1]) : exact;
  RatVector primary(names.size()), approx(names.size());
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i].empty()) continue;
    std::optional<Rational> v, d;
    if (auto it = exact.find(names[i]); it != exact.end()) v = eval_value(it->second);
    if (auto it = decimal.find(names[i]); it != decimal.end()) d = eval_value(it->second);
    if (exact.find(names[i]) == exact.end()) v = Rational(0);
    if (!d) d = v;
    if (!v) v = d;
    if (!v) throw SolverTransportError("cannot read model value of " + names[i]);
    primary[i] = *v;
    approx[i] = *d;
  }
  ans.candidates.push_back(primary);
  if (approx != primary) ans.candidates.push_back(approx);
  return ans;
}

}  // namespace detail

}  // namespace petc
