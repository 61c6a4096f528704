#include "petc/analysis.hpp"

#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "petc/errors.hpp"

namespace petc {

FreqBound avg_freq_bound(const TrafficModel& model) {
  std::optional<FreqBound> best;
  for (const auto& w : model.states) {
    if (w.empty()) continue;
    const long sum = std::accumulate(w.begin(), w.end(), 0L);
    Rational f(static_cast<long>(w.size()), sum);
    f.canonicalize();
    f /= model.h;
    if (!best || f > best->f_star) best = FreqBound{f, w};
  }
  if (!best) throw ConfigError("avg_freq_bound: model has no non-empty word");
  return *best;
}

DecayBound longest_time(const TrafficModel& model) {
  std::optional<DecayBound> best;
  for (const auto& w : model.states) {
    if (w.empty()) continue;
    Rational t = model.h * std::accumulate(w.begin(), w.end(), 0L);
    if (!best || t > best->T_star) best = DecayBound{t, w, 0};
  }
  if (!best) throw ConfigError("longest_time: model has no non-empty word");
  return *best;
}

double decay_rate(const Rational& r, const Rational& T_star) {
  if (sgn(T_star) <= 0) throw ConfigError("decay_rate: T* must be positive");
  return -std::log(r.get_d()) / (2 * T_star.get_d());
}

DecayBound ges_decay_bound(const TrafficModel& model, const Rational& r) {
  DecayBound d = longest_time(model);
  d.b_star = decay_rate(r, d.T_star);
  return d;
}

std::string decimal(const Rational& q, int digits) {
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  const bool neg = sgn(q) < 0;
  Rational v = (neg ? Rational(-q) : q) * scale + Rational(1, 2);
  mpz_class n;
  mpz_fdiv_q(n.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  std::string s = n.get_str();
  if (digits > 0) {
    if (s.size() <= static_cast<size_t>(digits)) s.insert(0, static_cast<size_t>(digits) + 1 - s.size(), '0');
    s.insert(s.size() - static_cast<size_t>(digits), ".");
  }
  return (neg && n != 0 ? "-" : "") + s;
}

AnalysisReport make_report(const ContractionCert& cert, int N, const DiscretizedPetc& disc,
                           const TrafficModel& bisim, const TrafficModel& sim, bool count_eps) {
  AnalysisReport rep;
  rep.a = cert.a;
  rep.h = disc.h;
  rep.h_P = disc.h_P;
  rep.r = disc.r;
  rep.N = N;
  rep.k_lo = disc.k_lo;
  rep.k_bar = disc.k_bar;
  rep.bisim_states = bisim.count(count_eps);
  rep.sim_states = sim.count(false);
  rep.eps_counted = count_eps;
  rep.lemma_bounds = trace_count_bounds(disc.k_size() < 2 ? 2 : disc.k_size(), N);
  rep.bisim_time = ges_decay_bound(bisim, disc.r);
  rep.sim_time = ges_decay_bound(sim, disc.r);
  rep.freq = avg_freq_bound(sim);
  rep.contraction_seconds = cert.seconds;
  rep.over_approximation = bisim.over_approximation || sim.over_approximation;
  return rep;
}

std::string AnalysisReport::to_text() const {
  std::ostringstream os;
  os << "contraction factor a      " << decimal(a, 3) << " (" << to_string(a) << ")\n";
  os << "periodic period h_P       " << decimal(h_P, 2) << "\n";
  os << "minimum inter-sample k_lo " << k_lo << "\n";
  os << "horizon N                 " << N << "\n";
  os << "trace-count bound         " << scientific(lemma_bounds.stated, 2) << " (geometric sum "
     << scientific(Rational(lemma_bounds.proof_sum), 2) << ")\n";
  os << "|X^B|                     " << bisim_states << (eps_counted ? " (eps included)" : " (eps excluded)")
     << "\n";
  os << "|X^S'|                    " << sim_states << "\n";
  os << "T* over X^B               " << decimal(bisim_time.T_star, 2) << " at " << word_to_string(bisim_time.word)
     << "\n";
  os << "T* over X^S'              " << decimal(sim_time.T_star, 2) << " at " << word_to_string(sim_time.word) << "\n";
  std::ostringstream b;
  b << std::fixed << std::setprecision(4) << sim_time.b_star;
  os << "decay rate b*             " << b.str() << "\n";
  os << "frequency bound f*        " << to_string(freq.f_star) << " = " << decimal(freq.f_star, 4) << " at "
     << word_to_string(freq.word) << " (1/h = " << to_string(Rational(1 / h)) << ")\n";
  if (over_approximation) os << "note: unknown solver answers were kept; models over-approximate\n";
  std::ostringstream t;
  t << std::fixed << std::setprecision(1);
  t << "time: contraction " << contraction_seconds << " s, bisimilar model " << bisim_seconds
    << " s, simulating model " << sim_seconds << " s, solver total " << solver_seconds << " s\n";
  os << t.str();
  return os.str();
}

nlohmann::json AnalysisReport::to_json() const {
  nlohmann::json j;
  j["a"] = to_string(a);
  j["h"] = to_string(h);
  j["h_P"] = to_string(h_P);
  j["r"] = to_string(r);
  j["N"] = N;
  j["k_lo"] = k_lo;
  j["k_bar"] = k_bar;
  j["bisim_states"] = bisim_states;
  j["sim_states"] = sim_states;
  j["eps_counted"] = eps_counted;
  j["lemma_stated"] = lemma_bounds.stated_floor.get_str();
  j["lemma_stated_exact"] = to_string(lemma_bounds.stated);
  j["lemma_proof_sum"] = lemma_bounds.proof_sum.get_str();
  j["T_star_bisim"] = to_string(bisim_time.T_star);
  j["T_star_bisim_word"] = bisim_time.word;
  j["T_star_sim"] = to_string(sim_time.T_star);
  j["T_star_sim_word"] = sim_time.word;
  j["b_star"] = sim_time.b_star;
  j["f_star"] = to_string(freq.f_star);
  j["f_star_word"] = freq.word;
  j["inverse_h"] = to_string(Rational(1 / h));
  j["over_approximation"] = over_approximation;
  j["seconds"] = {{"contraction", contraction_seconds},
                  {"bisim", bisim_seconds},
                  {"sim", sim_seconds},
                  {"solver", solver_seconds}};
  return j;
}

}  // namespace petc
