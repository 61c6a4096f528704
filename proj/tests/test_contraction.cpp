#include <gtest/gtest.h>

#include <cmath>

#include "petc/contraction.hpp"
#include "petc/errors.hpp"
#include "petc/kernels.hpp"
#include "support.hpp"

using namespace petc;
using petc::testing::cs_config;
using petc::testing::cs_disc;
using petc::testing::solver;

namespace {

Rational power(const Rational& a, int n) {
  Rational p = 1;
  for (int i = 0; i < n; ++i) p *= a;
  return p;
}

}  // namespace

TEST(HorizonN, Examples) {
  EXPECT_EQ(compute_N(Rational(119, 125), Rational(1, 10)), 47);
  EXPECT_EQ(compute_N(Rational(119, 125), Rational(1, 2)), 15);
  EXPECT_EQ(compute_N(Rational(1, 2), Rational(1, 4)), 2);  // boundary a^N = r counts
  EXPECT_EQ(compute_N(Rational(1, 2), Rational(3, 4)), 1);
  EXPECT_THROW(compute_N(Rational(1), Rational(1, 2)), ConfigError);
}

TEST(HorizonN, ExactBracket) {
  for (int num = 500; num <= 990; num += 37)
    for (const Rational& r : {Rational(1, 10), Rational(1, 2), Rational(1, 3)}) {
      Rational a(num, 1000);
      a.canonicalize();
      const int N = compute_N(a, r);
      EXPECT_LE(power(a, N), r);
      if (N > 1) {
        EXPECT_GT(power(a, N - 1), r);
      }
    }
}

TEST(TraceCount, Examples) {
  const TraceCountBounds b = trace_count_bounds(6, 47);
  EXPECT_EQ(scientific(b.stated, 2), "8.5e32");
  const TraceCountBounds s = trace_count_bounds(2, 3);
  EXPECT_EQ(s.stated, Rational(0));  // 2·(1^3 − 1)/1
  EXPECT_EQ(s.proof_sum, mpz_class(15));
  const TraceCountBounds t = trace_count_bounds(3, 2);
  EXPECT_EQ(t.stated, Rational(9, 2));  // 3·(2² − 1)/2
  EXPECT_EQ(t.stated_floor, mpz_class(4));
  EXPECT_EQ(t.proof_sum, mpz_class(13));
}

TEST(TraceCount, ProofSumIsGeometric) {
  for (int K = 2; K <= 7; ++K)
    for (int N = 1; N <= 9; ++N) {
      mpz_class sum = 0, p = 1;
      for (int i = 0; i <= N; ++i) {
        sum += p;
        p *= K;
      }
      EXPECT_EQ(trace_count_bounds(K, N).proof_sum, sum);
    }
}

TEST(Scientific, Rendering) {
  EXPECT_EQ(scientific(Rational(12345), 3), "1.23e4");
  EXPECT_EQ(scientific(Rational(1, 200), 2), "5.0e-3");
}

TEST(ContractionFactor, CaseStudyCertified) {
  const auto& d = cs_disc();
  const ContractionCert cert = compute_a(d, Rational(1, 1000), solver());
  EXPECT_EQ(cert.a, Rational(119, 125));
  ASSERT_TRUE(cert.violation_below.has_value());
  const auto& [k, x] = *cert.violation_below;
  EXPECT_TRUE(in_cone(d, x, k));
  EXPECT_GT(d.lyapunov(d.m(k) * x), Rational(951, 1000) * d.lyapunov(x));

  // Sampling oracle: the sampled worst ratio lies just below the certified a.
  const FloatDiscretization fd = discretize_float(cs_config().sys, Rational(2, 5));
  const int n = 200000;
  Eigen::MatrixXd xs(2, n);
  for (int i = 0; i < n; ++i) xs.col(i) << std::cos(M_PI * i / n), std::sin(M_PI * i / n);
  const double worst = max_contraction_ratio(fd, xs);
  EXPECT_LE(worst, cert.a.get_d());
  EXPECT_GT(worst, cert.a.get_d() - 0.001);
}

TEST(ContractionFactor, ValidityIsMonotone) {
  const auto& d = cs_disc();
  EXPECT_TRUE(contraction_valid(d, Rational(24, 25), solver()));
  EXPECT_FALSE(contraction_valid(d, Rational(47, 50), solver()));
}

TEST(PeriodicPeriod, ScanFailsWhenNothingDecreases) {
  PetcSystem s = cs_config().sys;
  s.K = Eigen::MatrixXd::Zero(1, 2);  // open loop is unstable
  EXPECT_THROW(compute_hP(s, Rational(1, 10), Rational(1)), VerificationError);
}
