#include "petc/verify.hpp"

#include <cmath>
#include <exception>
#include <optional>

#include "petc/errors.hpp"

namespace petc {

namespace {

// Dyadic in [-1, 1) with 53 random bits.
double unit_dyadic(std::mt19937_64& rng) {
  const auto bits = rng() >> 11;
  return std::ldexp(static_cast<double>(bits), -52) - 1.0;
}

nlohmann::json vec_json(const RatVector& x) {
  auto a = nlohmann::json::array();
  for (const auto& v : x) a.push_back(to_string(v));
  return a;
}

struct SampleOutcome {
  std::vector<Mismatch> found;
  std::size_t missing_states = 0, missing_edges = 0, output_mismatches = 0, forward = 0;
};

void merge(VerifyReport& rep, std::vector<SampleOutcome>& outs) {
  for (auto& o : outs) {
    rep.missing_states += o.missing_states;
    rep.missing_edges += o.missing_edges;
    rep.output_mismatches += o.output_mismatches;
    rep.forward_mismatches += o.forward;
    for (auto& m : o.found)
      if (rep.failures.size() < 20) rep.failures.push_back(std::move(m));
  }
}

std::optional<size_t> unique_successor(const TrafficModel& m, size_t i) {
  std::optional<size_t> succ;
  for (const auto& [a, b] : m.edges) {
    if (a != i) continue;
    if (succ) return std::nullopt;
    succ = b;
  }
  return succ;
}

}  // namespace

RatVector sample_sublevel(const DiscretizedPetc& disc, std::mt19937_64& rng) {
  const int n = disc.nx();
  const Eigen::MatrixXd Pinv = to_double(disc.P).inverse();
  const double v0 = disc.V0.get_d();
  std::vector<double> half(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) half[static_cast<size_t>(i)] = std::sqrt(v0 * Pinv(i, i)) * (1 + 1e-9);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    RatVector x(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = to_rational(half[static_cast<size_t>(i)] * unit_dyadic(rng));
    if (disc.lyapunov(x) <= disc.V0) return x;
  }
  throw VerificationError("sample_sublevel: rejection sampling failed");
}

RatVector sample_direction(int n, std::mt19937_64& rng) {
  while (true) {
    RatVector x(static_cast<size_t>(n));
    Rational norm = 0;
    for (int i = 0; i < n; ++i) {
      x[static_cast<size_t>(i)] = to_rational(unit_dyadic(rng));
      norm += x[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
    }
    if (sgn(norm) > 0 && norm <= 1) return x;
  }
}

bool VerifyReport::passed() const {
  return forward_mismatches == 0 && missing_states == 0 && missing_edges == 0 && output_mismatches == 0 &&
         replay_ok == replay_total;
}

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json j;
  j["check"] = check;
  j["seed"] = seed;
  j["samples"] = samples;
  j["steps"] = steps;
  j["passed"] = passed();
  j["forward_mismatches"] = forward_mismatches;
  j["replay_total"] = replay_total;
  j["replay_ok"] = replay_ok;
  j["states_without_witness"] = states_without_witness;
  j["missing_states"] = missing_states;
  j["missing_edges"] = missing_edges;
  j["output_mismatches"] = output_mismatches;
  auto f = nlohmann::json::array();
  for (const auto& m : failures)
    f.push_back({{"kind", m.kind},
                 {"sample", m.sample},
                 {"step", m.step},
                 {"x0", vec_json(m.x0)},
                 {"expected", m.expected},
                 {"got", m.got},
                 {"detail", m.detail}});
  j["failures"] = f;
  return j;
}

VerifyReport check_bisim_sample(const DiscretizedPetc& disc, const TrafficModel& model, int N,
                                std::size_t n_samples, std::uint64_t seed, int periodic_steps) {
  VerifyReport rep;
  rep.check = "bisim";
  rep.seed = seed;
  rep.samples = n_samples;
  rep.steps = periodic_steps;

  std::mt19937_64 rng(seed);
  std::vector<RatVector> xs;
  xs.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) xs.push_back(sample_sublevel(disc, rng));

  std::vector<SampleOutcome> outs(n_samples);
  std::vector<std::exception_ptr> errors(n_samples);
  const long count = static_cast<long>(n_samples);
#pragma omp parallel for schedule(dynamic, 4)
  for (long si = 0; si < count; ++si) {
    const auto s = static_cast<size_t>(si);
    SampleOutcome& o = outs[s];
    try {
      Word w;
      try {
        w = concrete_sequence(disc, xs[s], N);
      } catch (const VerificationError& e) {
        o.forward = 1;
        o.found.push_back({"no_entry", s, 0, xs[s], {}, {}, e.what()});
        continue;
      }
      auto idx = model.find(w);
      if (!idx) {
        o.forward = 1;
        o.missing_states = 1;
        o.found.push_back({"missing_state", s, 0, xs[s], w, {}, "concrete word is not a model state"});
        continue;
      }
      RatVector x = xs[s];
      size_t state = *idx;
      const int total = static_cast<int>(w.size()) + periodic_steps;
      for (int step = 0; step < total; ++step) {
        StepResult r = mpetc_step(disc, x);
        if (r.time != model.output(state)) {
          o.forward = 1;
          o.output_mismatches = 1;
          o.found.push_back({"output", s, step, xs[s], model.states[state], w,
                             "model output " + to_string(model.output(state)) + ", concrete " + to_string(r.time)});
          break;
        }
        auto next = unique_successor(model, state);
        if (!next) {
          o.forward = 1;
          o.missing_edges = 1;
          o.found.push_back({"successor", s, step, xs[s], model.states[state], w, "state has no unique successor"});
          break;
        }
        state = *next;
        x = std::move(r.x);
      }
    } catch (...) {
      errors[s] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  merge(rep, outs);

  for (size_t i = 0; i < model.states.size(); ++i) {
    if (!model.witnesses[i]) {
      ++rep.states_without_witness;
      continue;
    }
    ++rep.replay_total;
    Word got;
    std::string detail;
    try {
      got = concrete_sequence(disc, *model.witnesses[i], N);
    } catch (const Error& e) {
      detail = e.what();
    }
    if (detail.empty() && got == model.states[i]) {
      ++rep.replay_ok;
    } else if (rep.failures.size() < 20) {
      rep.failures.push_back({"replay", i, 0, *model.witnesses[i], model.states[i], got, detail});
    }
  }
  return rep;
}

VerifyReport check_sim_petc(const DiscretizedPetc& disc, const TrafficModel& model, int N, std::size_t n_samples,
                            int steps, std::uint64_t seed) {
  if (steps < 1) throw ConfigError("check_sim_petc: steps must be at least 1");
  VerifyReport rep;
  rep.check = "petc_sim";
  rep.seed = seed;
  rep.samples = n_samples;
  rep.steps = steps;

  std::mt19937_64 rng(seed);
  std::vector<RatVector> xs;
  xs.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) xs.push_back(sample_direction(disc.nx(), rng));

  std::vector<SampleOutcome> outs(n_samples);
  std::vector<std::exception_ptr> errors(n_samples);
  const long count = static_cast<long>(n_samples);
#pragma omp parallel for schedule(dynamic, 1)
  for (long si = 0; si < count; ++si) {
    const auto s = static_cast<size_t>(si);
    SampleOutcome& o = outs[s];
    try {
      RatVector x = xs[s];
      std::optional<size_t> prev;
      Word prev_word;
      for (int step = 0; step < steps; ++step) {
        const Word w = petc_word(disc, x, N);
        auto idx = model.find(w);
        if (!idx) {
          ++o.missing_states;
          o.found.push_back({"missing_state", s, step, xs[s], w, prev_word, "word of the current state is not a model state"});
          break;
        }
        if (prev && !model.has_edge(*prev, *idx)) {
          ++o.missing_edges;
          o.found.push_back({"missing_edge", s, step, xs[s], w, prev_word, "no edge from the previous state"});
          break;
        }
        StepResult r = petc_step(disc, x);
        if (r.time != model.output(*idx)) {
          ++o.output_mismatches;
          o.found.push_back({"output", s, step, xs[s], w, prev_word, "concrete time " + to_string(r.time)});
          break;
        }
        prev = idx;
        prev_word = w;
        x = std::move(r.x);
      }
    } catch (...) {
      errors[s] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  merge(rep, outs);
  return rep;
}

Rational empirical_frequency(const DiscretizedPetc& disc, const RatVector& x0, int samples, int bits) {
  if (samples < 1) throw ConfigError("empirical_frequency: samples must be positive");
  RatVector x = x0;
  long total_k = 0;
  for (int i = 0; i < samples; ++i) {
    const int k = kappa(disc, x);
    total_k += k;
    x = round_dyadic(disc.m(k) * x, bits);
  }
  Rational f(samples, total_k);
  f.canonicalize();
  f /= disc.h;
  return f;
}

}  // namespace petc
