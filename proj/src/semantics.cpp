#include "petc/semantics.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "petc/errors.hpp"

namespace petc {

int kappa(const DiscretizedPetc& disc, const RatVector& x) {
  for (int k = disc.k_lo; k < disc.k_bar; ++k)
    if (sgn(quad_form(disc.n(k), x)) > 0) return k;
  return disc.k_bar;
}

bool in_cone(const DiscretizedPetc& disc, const RatVector& x, int k) {
  if (k < disc.k_lo || k > disc.k_bar) return false;
  if (k < disc.k_bar && sgn(quad_form(disc.n(k), x)) <= 0) return false;
  for (int j = disc.k_lo; j < k; ++j)
    if (sgn(quad_form(disc.n(j), x)) > 0) return false;
  return true;
}

StepResult petc_step(const DiscretizedPetc& disc, const RatVector& x) {
  const int k = kappa(disc, x);
  return {disc.m(k) * x, disc.h * k, false};
}

StepResult mpetc_step(const DiscretizedPetc& disc, const RatVector& x) {
  const Rational v = disc.lyapunov(x);
  if (v > disc.V0) throw DomainError("mpetc_step: V(x) = " + to_string(v) + " exceeds V0");
  if (v <= disc.r * disc.V0) return {disc.M_P * x, disc.h_P, true};
  return petc_step(disc, x);
}

Word concrete_sequence(const DiscretizedPetc& disc, const RatVector& x0, int max_len) {
  if (disc.lyapunov(x0) > disc.V0) throw DomainError("concrete_sequence: x0 outside X_0");
  const Rational threshold = disc.r * disc.V0;
  Word w;
  RatVector x = x0;
  while (disc.lyapunov(x) > threshold) {
    if (static_cast<int>(w.size()) >= max_len)
      throw VerificationError("concrete_sequence: no entry into X_P within " + std::to_string(max_len) +
                              " steps, word so far " + word_to_string(w));
    const int k = kappa(disc, x);
    w.push_back(k);
    x = disc.m(k) * x;
  }
  return w;
}

Word petc_word(const DiscretizedPetc& disc, const RatVector& x, int max_len) {
  const Rational threshold = disc.r * disc.lyapunov(x);
  Word w;
  RatVector y = x;
  while (disc.lyapunov(y) > threshold) {
    if (static_cast<int>(w.size()) >= max_len)
      throw VerificationError("petc_word: no contraction by r within " + std::to_string(max_len) + " steps");
    const int k = kappa(disc, y);
    w.push_back(k);
    y = disc.m(k) * y;
  }
  return w;
}

Trace simulate_trace(const DiscretizedPetc& disc, const RatVector& x0, const Rational& horizon) {
  if (sgn(horizon) <= 0) throw ConfigError("simulate_trace: horizon must be positive");
  Trace tr;
  tr.states.push_back(x0);
  Rational t = 0;
  while (true) {
    StepResult s = mpetc_step(disc, tr.states.back());
    if (t + s.time > horizon) break;
    if (s.periodic && !tr.entered_periodic_at) tr.entered_periodic_at = tr.states.size() - 1;
    t += s.time;
    tr.times.push_back(s.time);
    tr.states.push_back(std::move(s.x));
  }
  return tr;
}

void Trace::write_csv(std::ostream& os, const DiscretizedPetc& disc) const {
  os << "sample_index,t,inter_sample_time,V";
  for (int i = 1; i <= disc.nx(); ++i) os << ",x" << i;
  os << '\n';
  Rational t = 0;
  const auto old_precision = os.precision(15);
  for (size_t i = 0; i < states.size(); ++i) {
    Rational dt = i == 0 ? Rational(0) : times[i - 1];
    t += dt;
    os << i << ',' << t.get_d() << ',' << dt.get_d() << ',' << disc.lyapunov(states[i]).get_d();
    for (const auto& xi : states[i]) os << ',' << xi.get_d();
    os << '\n';
  }
  os.precision(old_precision);
}

RatVector round_dyadic(const RatVector& x, int bits) {
  double largest = 0;
  for (const auto& xi : x) largest = std::max(largest, std::fabs(xi.get_d()));
  if (largest == 0) return x;
  const long shift = bits - std::ilogb(largest);
  mpz_class scale = 1;
  mpz_class one = 1;
  if (shift > 0) mpz_mul_2exp(scale.get_mpz_t(), one.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
  RatVector out;
  out.reserve(x.size());
  for (const auto& xi : x) {
    Rational scaled = shift > 0 ? Rational(xi * scale) : xi;
    mpz_class n;
    Rational half(1, 2);
    Rational shifted = scaled + half;
    mpz_fdiv_q(n.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
    Rational q(n, shift > 0 ? scale : one);
    q.canonicalize();
    out.push_back(std::move(q));
  }
  return out;
}

std::string word_to_string(const Word& w) {
  if (w.empty()) return "eps";
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w[i];
  os << ')';
  return os.str();
}

}  // namespace petc
