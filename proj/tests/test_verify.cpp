#include <gtest/gtest.h>

#include "petc/contraction.hpp"
#include "petc/verify.hpp"
#include "support.hpp"

using namespace petc;
using petc::testing::fast_disc;
using petc::testing::solver;

namespace {

constexpr int kN = 15;  // r = 1/2 with a = 0.952

struct Models {
  TrafficModel bisim, sim;
};

const Models& models() {
  static const Models m = [] {
    BisimOptions o;
    o.solver = solver();
    Models out;
    out.bisim = build_mpetc_bisim(fast_disc(), kN, o);
    out.sim = build_petc_sim(fast_disc(), out.bisim, o);
    return out;
  }();
  return m;
}

TrafficModel without_state(const TrafficModel& m, const Word& w) {
  TrafficModel out = m;
  const size_t i = *m.find(w);
  out.states.erase(out.states.begin() + static_cast<long>(i));
  out.witnesses.erase(out.witnesses.begin() + static_cast<long>(i));
  rebuild_edges(out);
  return out;
}

}  // namespace

TEST(Sampling, SublevelPointsAreInside) {
  const auto& d = fast_disc();
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) EXPECT_LE(d.lyapunov(sample_sublevel(d, rng)), d.V0);
  std::mt19937_64 a(9), b(9);
  EXPECT_EQ(sample_sublevel(d, a), sample_sublevel(d, b));
}

TEST(Verify, BisimPasses) {
  const VerifyReport r = check_bisim_sample(fast_disc(), models().bisim, kN, 300, 7);
  EXPECT_TRUE(r.passed()) << r.to_json().dump(1);
  EXPECT_EQ(r.replay_total, models().bisim.states.size());
}

TEST(Verify, SimPasses) {
  const VerifyReport r = check_sim_petc(fast_disc(), models().sim, kN, 100, 30, 7);
  EXPECT_TRUE(r.passed()) << r.to_json().dump(1);
  for (auto deg : models().sim.out_degrees()) EXPECT_GE(deg, 1u);
}

TEST(Verify, DeletedStateIsDetected) {
  const auto& d = fast_disc();
  std::mt19937_64 rng(7);
  const Word w = concrete_sequence(d, sample_sublevel(d, rng), kN);
  ASSERT_FALSE(w.empty());
  const VerifyReport r = check_bisim_sample(d, without_state(models().bisim, w), kN, 50, 7);
  EXPECT_FALSE(r.passed());
  EXPECT_GT(r.missing_states, 0u);
}

TEST(Verify, DeletedEdgesAreDetected) {
  TrafficModel broken = models().sim;
  broken.edges.erase(broken.edges.begin(), broken.edges.begin() + static_cast<long>(broken.edges.size() / 2));
  const VerifyReport r = check_sim_petc(fast_disc(), broken, kN, 100, 30, 7);
  EXPECT_FALSE(r.passed());
  EXPECT_GT(r.missing_edges, 0u);

  TrafficModel wrong_output = models().bisim;
  wrong_output.h = Rational(1, 5);
  EXPECT_GT(check_bisim_sample(fast_disc(), wrong_output, kN, 50, 7).output_mismatches, 0u);
}

TEST(Verify, EmpiricalFrequencyBelowBound) {
  const auto& d = fast_disc();
  std::mt19937_64 rng(8);
  Rational f_star = 0;
  for (const auto& w : models().sim.states) {
    int s = 0;
    for (int k : w) s += k;
    f_star = std::max(f_star, Rational(Rational(static_cast<long>(w.size())) / s / d.h));
  }
  for (int i = 0; i < 5; ++i) EXPECT_LE(empirical_frequency(d, sample_direction(2, rng), 500), f_star);
}
