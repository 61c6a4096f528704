#include <gtest/gtest.h>

#include <cmath>

#include "petc/contraction.hpp"
#include "petc/errors.hpp"
#include "support.hpp"

using namespace petc;
using petc::testing::cs_config;
using petc::testing::cs_disc;

namespace {

Eigen::MatrixXd taylor_expm(const Eigen::MatrixXd& M, double t, int terms = 60) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(M.rows(), M.cols());
  Eigen::MatrixXd term = out;
  for (int i = 1; i < terms; ++i) {
    term = term * M * (t / i);
    out += term;
  }
  return out;
}

Eigen::MatrixXd augmented(const PetcSystem& s) {
  const Eigen::Index n = s.nx(), m = s.nu();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n + m, n + m);
  G.topLeftCorner(n, n) = s.A;
  G.topRightCorner(n, m) = s.B;
  return G;
}

// Classic RK4 on ẋ = A x + B u with u held at K x0.
Eigen::VectorXd rk4_held(const PetcSystem& s, const Eigen::VectorXd& x0, double T, int steps) {
  const Eigen::VectorXd u = s.K * x0;
  Eigen::VectorXd x = x0;
  const double dt = T / steps;
  auto f = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd { return s.A * y + s.B * u; };
  for (int i = 0; i < steps; ++i) {
    const Eigen::VectorXd k1 = f(x), k2 = f(x + dt / 2 * k1), k3 = f(x + dt / 2 * k2), k4 = f(x + dt * k3);
    x += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return x;
}

}  // namespace

TEST(Expm, DiagonalClosedForm) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(0, 0) = 1;
  D(1, 1) = 2;
  const Eigen::MatrixXd E = expm(D, 1.0);
  EXPECT_NEAR(E(0, 0), std::exp(1.0), 1e-14);
  EXPECT_NEAR(E(1, 1), std::exp(2.0), 1e-13);
  EXPECT_EQ(E(0, 1), 0.0);
}

TEST(Expm, MatchesTruncatedSeries) {
  const Eigen::MatrixXd G = augmented(cs_config().sys);
  for (double t : {0.05, 0.1, 0.3, 0.6, 1.2}) {
    const Eigen::MatrixXd diff = expm(G, t) - taylor_expm(G, t);
    EXPECT_LT(diff.cwiseAbs().maxCoeff(), 1e-10) << "t = " << t;
  }
}

TEST(Expm, LargeNormUsesScaling) {
  Eigen::MatrixXd M(2, 2);
  M << -20, 15, 3, -9;
  // e^{Mt} e^{-Mt} = I checks the squaring phase.
  const Eigen::MatrixXd prod = expm(M, 1.0) * expm(M, -1.0);
  EXPECT_LT((prod - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Expm, AugmentedSemigroup) {
  const Eigen::MatrixXd G = augmented(cs_config().sys);
  for (double s : {0.1, 0.25})
    for (double t : {0.1, 0.35}) {
      const Eigen::MatrixXd diff = expm(G, s + t) - expm(G, s) * expm(G, t);
      EXPECT_LT(diff.cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Discretize, HeldInputMatchesRk4) {
  const PetcSystem& s = cs_config().sys;
  for (int k = 1; k <= s.k_bar; ++k) {
    const Eigen::MatrixXd Mk = discretize(s, k);
    for (int c = 0; c < 2; ++c) {
      Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2);
      x0(c) = 1;
      const Eigen::VectorXd ref = rk4_held(s, x0, 0.1 * k, 2000);
      EXPECT_LT((Mk * x0 - ref).cwiseAbs().maxCoeff(), 1e-11) << "k = " << k;
    }
  }
}

TEST(Discretize, TrigFormIsStackedCongruence) {
  const PetcSystem& s = cs_config().sys;
  for (int k : {1, 3, 6}) {
    const Eigen::MatrixXd Mk = discretize(s, k);
    Eigen::MatrixXd S(4, 2);
    S << Mk, Eigen::MatrixXd::Identity(2, 2);
    const Eigen::MatrixXd ref = S.transpose() * s.Q_trig * S;
    EXPECT_LT((trig_form(s, Mk) - ref).cwiseAbs().maxCoeff(), 1e-12);
  }
}

// The trigger value is 2ζᵀP dζ/dt + ρ ζᵀ Q_lyap ζ at the one-step prediction ζ, integrated independently.
TEST(PredictiveTrigger, MatchesDerivativeOfPrediction) {
  const Config& c = cs_config();
  ASSERT_TRUE(c.predictive.has_value());
  const PredictiveTriggerSpec& p = *c.predictive;
  const PetcSystem& s = c.sys;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd xi(2), xh(2);
    xi << u(rng), u(rng);
    xh << u(rng), u(rng);
    // ζ = state after h from ξ with input K x̂ held.
    const Eigen::VectorXd uh = s.K * xh;
    Eigen::VectorXd z = xi;
    const int steps = 2000;
    const double dt = 0.1 / steps;
    auto f = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd { return s.A * y + s.B * uh; };
    for (int j = 0; j < steps; ++j) {
      const Eigen::VectorXd k1 = f(z), k2 = f(z + dt / 2 * k1), k3 = f(z + dt / 2 * k2), k4 = f(z + dt * k3);
      z += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    const Eigen::VectorXd zdot = f(z);
    const double ref = 2 * z.dot(p.P_lyap * zdot) + p.rho * z.dot(p.Q_lyap * z);
    Eigen::VectorXd st(4);
    st << xi, xh;
    EXPECT_NEAR(st.dot(s.Q_trig * st), ref, 1e-9);
  }
}

TEST(PredictiveTrigger, SymmetricAndBuiltFromSpec) {
  const Config& c = cs_config();
  const Eigen::MatrixXd Q = build_predictive_Q(*c.predictive, c.sys.A, c.sys.B, c.sys.K, 0.1);
  EXPECT_LT((Q - Q.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((Q - c.sys.Q_trig).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Discretize, MinimumInterSampleIsOne) {
  EXPECT_EQ(cs_disc().k_lo, 1);
}

TEST(Discretize, MinInterSampleGridOracle) {
  // Oracle: scan a fine grid of directions for a positive value of xᵀN(k)x.
  const PetcSystem& s = cs_config().sys;
  std::vector<Eigen::MatrixXd> N;
  for (int k = 1; k <= s.k_bar; ++k) N.push_back(trig_form(s, discretize(s, k)));
  int oracle = s.k_bar;
  for (int k = 1; k <= s.k_bar && oracle == s.k_bar; ++k)
    for (int i = 0; i < 20000; ++i) {
      const double th = M_PI * i / 20000;
      Eigen::Vector2d x(std::cos(th), std::sin(th));
      if (x.dot(N[static_cast<size_t>(k - 1)] * x) > 0) {
        oracle = k;
        break;
      }
    }
  EXPECT_EQ(min_inter_sample(N, s.k_bar), oracle);

  std::vector<Eigen::MatrixXd> neg(3, -Eigen::MatrixXd::Identity(2, 2));
  neg[2](0, 0) = 1;
  EXPECT_EQ(min_inter_sample(neg, 3), 3);
  neg[2](0, 0) = -1;
  EXPECT_EQ(min_inter_sample(neg, 3), 3);
  neg[1](1, 1) = 0.5;
  EXPECT_EQ(min_inter_sample(neg, 3), 2);
}

TEST(Discretize, RationalizationIsExactAndSymmetric) {
  const FloatDiscretization fd = discretize_float(cs_config().sys, Rational(2, 5));
  const DiscretizedPetc d = rationalize(fd);
  for (int k = 1; k <= d.k_bar; ++k) {
    EXPECT_TRUE(d.n(k).is_symmetric());
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) EXPECT_EQ(d.m(k)(i, j), to_rational(fd.M[static_cast<size_t>(k - 1)](i, j)));
  }
  EXPECT_EQ(d.h, Rational(1, 10));
  EXPECT_EQ(d.r, Rational(1, 10));
  EXPECT_EQ(d.h_P, Rational(2, 5));
}

TEST(PeriodicPeriod, CaseStudyIsZeroPointFour) {
  const PetcSystem& s = cs_config().sys;
  EXPECT_TRUE(periodic_decrease(s, Rational(2, 5)));
  EXPECT_FALSE(periodic_decrease(s, Rational(41, 100)));
  EXPECT_EQ(compute_hP(s, Rational(1, 100), Rational(6, 5)), Rational(2, 5));
}

TEST(Validation, RejectsBadSystems) {
  PetcSystem s = cs_config().sys;
  s.P(0, 0) = -1;
  EXPECT_THROW(s.validate(), ConfigError);
  s = cs_config().sys;
  s.k_bar = 0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = cs_config().sys;
  s.r = Rational(3, 2);
  EXPECT_THROW(s.validate(), ConfigError);
  s = cs_config().sys;
  s.Q_trig = Eigen::MatrixXd::Zero(3, 3);
  EXPECT_THROW(s.validate(), ConfigError);
}
