#include "petc/contraction.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <sstream>

#include "petc/errors.hpp"

namespace petc {

namespace {

Rational rpow(const Rational& a, int e) {
  Rational out;
  mpz_pow_ui(out.get_num_mpz_t(), a.get_num_mpz_t(), static_cast<unsigned long>(e));
  mpz_pow_ui(out.get_den_mpz_t(), a.get_den_mpz_t(), static_cast<unsigned long>(e));
  out.canonicalize();
  return out;
}

mpz_class floor_of(const Rational& q) {
  mpz_class z;
  mpz_fdiv_q(z.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return z;
}

}  // namespace

bool contraction_valid(const DiscretizedPetc& disc, const Rational& a, const SolverConfig& cfg,
                       std::map<int, SatResult>* evidence) {
  std::vector<SatQuery> qs;
  for (int k = disc.k_lo; k <= disc.k_bar; ++k) qs.push_back(contraction_query(disc, k, a));
  auto results = check_all(qs, cfg);
  bool valid = true;
  for (size_t i = 0; i < results.size(); ++i) {
    if (results[i].status != SatStatus::Unsat) valid = false;
    if (evidence) (*evidence)[disc.k_lo + static_cast<int>(i)] = results[i];
  }
  return valid;
}

ContractionCert compute_a(const DiscretizedPetc& disc, const Rational& tol, const SolverConfig& cfg) {
  if (sgn(tol) <= 0 || tol >= 1) throw ConfigError("compute_a: tol must lie in (0, 1)");
  const auto t0 = std::chrono::steady_clock::now();
  ContractionCert cert;
  cert.tol = tol;

  // Grid indices j with 0 < j·tol < 1.
  mpz_class top = floor_of(Rational(1 / tol));
  if (top * tol >= 1) top -= 1;
  if (top < 1) throw ConfigError("compute_a: tol leaves no grid point below 1");

  std::map<int, SatResult> evidence;
  auto test = [&](const mpz_class& j, std::map<int, SatResult>& ev) {
    Rational a = Rational(j) * tol;
    ev.clear();
    const bool ok = contraction_valid(disc, a, cfg, &ev);
    cert.bisection_trace.emplace_back(a, ok);
    return ok;
  };

  mpz_class hi = top;
  if (!test(hi, evidence)) {
    std::string ks;
    for (const auto& [k, r] : evidence)
      if (r.status != SatStatus::Unsat) ks += " k=" + std::to_string(k);
    throw VerificationError("not contractive: a = " + to_string(Rational(hi) * tol) + " violated at" + ks);
  }
  std::map<int, SatResult> best = evidence;
  std::map<int, SatResult> below;
  mpz_class lo = 0;
  while (hi - lo > 1) {
    mpz_class mid = (hi + lo) / 2;
    if (test(mid, evidence)) {
      hi = mid;
      best = evidence;
    } else {
      lo = mid;
      below = evidence;
    }
  }
  cert.a = Rational(hi) * tol;
  cert.per_k_unsat = std::move(best);
  if (lo > 0) {
    // lo = hi - 1 here, and `below` holds its results.
    for (const auto& [k, r] : below)
      if (r.status == SatStatus::Sat && r.witness) {
        cert.violation_below = std::make_pair(k, *r.witness);
        break;
      }
  }
  cert.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return cert;
}

bool periodic_decrease(const PetcSystem& sys, const Rational& h_P, double eig_tol) {
  const Eigen::MatrixXd MP = transition(sys, h_P.get_d());
  Eigen::MatrixXd D = MP.transpose() * sys.P * MP - sys.P;
  D = 0.5 * (D + D.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() <= eig_tol;
}

Rational compute_hP(const PetcSystem& sys, const Rational& resolution, const Rational& h_max, double eig_tol) {
  if (sgn(resolution) <= 0) throw ConfigError("compute_hP: resolution must be positive");
  if (sgn(h_max) <= 0) throw ConfigError("compute_hP: h_max must be positive");
  for (mpz_class j = floor_of(Rational(h_max / resolution)); j >= 1; --j) {
    Rational h = Rational(j) * resolution;
    if (periodic_decrease(sys, h, eig_tol)) return h;
  }
  throw VerificationError("compute_hP: no multiple of " + to_string(resolution) + " up to " + to_string(h_max) +
                          " gives periodic Lyapunov decrease");
}

int compute_N(const Rational& a, const Rational& r) {
  if (sgn(a) <= 0 || a >= 1) throw ConfigError("compute_N: a must lie in (0, 1)");
  if (sgn(r) <= 0 || r >= 1) throw ConfigError("compute_N: r must lie in (0, 1)");
  // Double estimate, then exact correction: a^N ≤ r < a^(N-1).
  const double est = std::ceil(std::log(r.get_d()) / std::log(a.get_d()));
  int N = std::max(1, static_cast<int>(std::isfinite(est) ? est : 1));
  while (N > 1 && rpow(a, N - 1) <= r) --N;
  while (rpow(a, N) > r) ++N;
  return N;
}

TraceCountBounds trace_count_bounds(int k_size, int N) {
  if (k_size < 2) throw ConfigError("trace_count_bounds: |K| must be at least 2");
  if (N < 1) throw ConfigError("trace_count_bounds: N must be at least 1");
  TraceCountBounds b;
  mpz_class base = k_size - 1;
  mpz_class p;
  mpz_pow_ui(p.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(N));
  b.stated = Rational(mpz_class(k_size) * (p - 1), base);
  b.stated.canonicalize();
  b.stated_floor = floor_of(b.stated);
  mpz_class term = 1;
  b.proof_sum = 1;
  for (int i = 1; i <= N; ++i) {
    term *= k_size;
    b.proof_sum += term;
  }
  return b;
}

std::string scientific(const Rational& q, int digits) {
  if (q == 0) return "0";
  const bool neg = sgn(q) < 0;
  Rational v = neg ? Rational(-q) : q;
  // Decimal exponent e with 10^e ≤ v < 10^(e+1).
  long e = static_cast<long>(std::floor(std::log10(v.get_d())));
  auto pow10 = [](long k) {
    mpz_class t;
    mpz_ui_pow_ui(t.get_mpz_t(), 10, static_cast<unsigned long>(k < 0 ? -k : k));
    return k < 0 ? Rational(1, t) : Rational(t);
  };
  while (v >= pow10(e + 1)) ++e;
  while (v < pow10(e)) --e;
  Rational scaled = v / pow10(e - digits + 1) + Rational(1, 2);
  mpz_class m = floor_of(scaled);
  if (m >= pow10(digits).get_num()) {
    m /= 10;
    ++e;
  }
  std::string s = m.get_str();
  std::ostringstream os;
  if (neg) os << '-';
  os << s[0];
  if (s.size() > 1) os << '.' << s.substr(1);
  os << 'e' << e;
  return os.str();
}

}  // namespace petc
