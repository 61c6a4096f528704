#include <gtest/gtest.h>

#include <cstdlib>

#include "petc/config.hpp"
#include "petc/errors.hpp"

using namespace petc;
using json = nlohmann::json;

TEST(Config, CaseStudyParses) {
  const Config c = casestudy_config();
  EXPECT_EQ(c.sys.nx(), 2);
  EXPECT_EQ(c.sys.k_bar, 6);
  EXPECT_EQ(c.sys.h, Rational(1, 10));
  EXPECT_EQ(c.sys.r, Rational(1, 10));
  EXPECT_EQ(c.sys.V0, Rational(1));
  ASSERT_TRUE(c.predictive.has_value());
  EXPECT_DOUBLE_EQ(c.predictive->rho, 0.8);
  EXPECT_EQ(c.resolved_h_max(), Rational(6, 5));
  EXPECT_FALSE(c.h_P.has_value());
}

TEST(Config, StringsAreExactRationals) {
  json j = casestudy_json();
  j["r"] = "1/3";
  j["h_P"] = "0.4";
  const Config c = parse_config(j);
  EXPECT_EQ(c.sys.r, Rational(1, 3));
  EXPECT_EQ(*c.h_P, Rational(2, 5));
}

TEST(Config, TriggerMustBeUnambiguous) {
  json j = casestudy_json();
  j["Q_trig"] = json::array({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}});
  EXPECT_THROW(parse_config(j), ConfigError);
  j.erase("Q_lyap");
  j.erase("rho");
  const Config c = parse_config(j);
  EXPECT_FALSE(c.predictive.has_value());
  j.erase("Q_trig");
  EXPECT_THROW(parse_config(j), ConfigError);
}

TEST(Config, RejectsMissingAndMalformed) {
  for (const char* key : {"A", "B", "K", "h", "k_bar", "r"}) {
    json j = casestudy_json();
    j.erase(key);
    EXPECT_THROW(parse_config(j), ConfigError) << key;
  }
  json j = casestudy_json();
  j["k_bar"] = 2.5;
  EXPECT_THROW(parse_config(j), ConfigError);
  j = casestudy_json();
  j["A"] = json::array({{0, 1}});
  EXPECT_THROW(parse_config(j), ConfigError);
  j = casestudy_json();
  j["r"] = "abc";
  EXPECT_THROW(parse_config(j), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, SolverBlock) {
  json j = casestudy_json();
  j["solver"] = {{"path", "my-z3"}, {"args", {"-in", "-smt2"}}, {"per_query_budget_s", 5}, {"workers", 3}};
  unsetenv("PETC_SOLVER");
  const Config c = parse_config(j);
  EXPECT_EQ(c.solver.path, "my-z3");
  EXPECT_EQ(c.solver.args.size(), 2u);
  EXPECT_EQ(c.solver.budget_s, 5);
  EXPECT_EQ(c.solver.workers, 3);
}
