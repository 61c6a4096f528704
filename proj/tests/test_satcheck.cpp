#include <gtest/gtest.h>

#include "petc/contraction.hpp"
#include "petc/errors.hpp"
#include "support.hpp"

using namespace petc;
using petc::testing::cs_disc;
using petc::testing::random_point;
using petc::testing::solver;

namespace {

RatMatrix diag(const Rational& a, const Rational& b) {
  RatMatrix m(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

SatQuery unit_circle_on_axis() {
  SatQuery q;
  q.nx = 2;
  q.atoms.push_back({diag(1, 1), Rel::Eq, Rational(1)});
  q.atoms.push_back({diag(0, 1), Rel::Le, Rational(0)});
  return q;
}

int cone_atoms(const DiscretizedPetc& d, int k) { return (k < d.k_bar ? 1 : 0) + (k - d.k_lo); }

// M(1) = I/2, P = I: V(Mx) = V(x)/4 everywhere.
DiscretizedPetc halving_loop() {
  DiscretizedPetc d;
  d.M = {Rational(1, 2) * RatMatrix::identity(2)};
  d.N = {diag(1, 1)};
  d.M_P = d.M[0];
  d.P = RatMatrix::identity(2);
  d.Q_trig = RatMatrix::identity(4);
  d.k_lo = d.k_bar = 1;
  d.h = Rational(1, 10);
  d.h_P = Rational(1, 10);
  d.r = Rational(1, 10);
  d.V0 = 1;
  return d;
}

}  // namespace

TEST(SatCheck, TrivialUnsat) {
  SatQuery q;
  q.nx = 2;
  q.atoms.push_back({diag(1, 1), Rel::Lt, Rational(0)});
  EXPECT_EQ(check(q, solver()).status, SatStatus::Unsat);
  q.atoms = {{diag(1, 1), Rel::Le, Rational(1)}, {diag(1, 1), Rel::Gt, Rational(2)}};
  EXPECT_EQ(check(q, solver()).status, SatStatus::Unsat);
}

TEST(SatCheck, ZeroWitnessWhenOriginQualifies) {
  SatQuery q;
  q.nx = 2;
  q.atoms.push_back({diag(1, 1), Rel::Le, Rational(1)});
  const SatResult r = check(q, solver());
  ASSERT_EQ(r.status, SatStatus::Sat);
  EXPECT_EQ(*r.witness, (RatVector{0, 0}));
}

TEST(SatCheck, UnitCircleWitnessIsExact) {
  const SatQuery q = unit_circle_on_axis();
  for (bool reduce : {true, false}) {
    SolverConfig c = solver();
    c.reduce = reduce;
    const SatResult r = check(q, c);
    ASSERT_EQ(r.status, SatStatus::Sat) << r.note;
    const RatVector& x = *r.witness;
    EXPECT_EQ(x[1], 0);
    EXPECT_EQ(abs(x[0]), 1);
    EXPECT_TRUE(holds(q, x));
  }
}

TEST(SatCheck, IrrationalWitnessesAreRefinedToExactPoints) {
  // x1² + x2² ≤ 2 and x1² > 1.9999 and x2² > 0: any witness must be verified exactly.
  SatQuery q;
  q.nx = 2;
  q.atoms.push_back({diag(1, 1), Rel::Le, Rational(2)});
  q.atoms.push_back({diag(1, 0), Rel::Gt, Rational(19999, 10000)});
  q.atoms.push_back({diag(0, 1), Rel::Gt, Rational(0)});
  const SatResult r = check(q, solver());
  ASSERT_EQ(r.status, SatStatus::Sat);
  EXPECT_TRUE(holds(q, *r.witness));
}

TEST(SatCheck, UnitLevelFrequencyWordExists) {
  const auto& d = cs_disc();
  const Word w{4, 1, 1, 1, 1, 1};
  const SatQuery q = sequence_query(d, w, Shell::UnitLevel);
  const SatResult r = check(q, solver());
  ASSERT_EQ(r.status, SatStatus::Sat);
  ASSERT_TRUE(holds(q, *r.witness));
  EXPECT_EQ(petc_word(d, *r.witness, 60), w);
}

TEST(SatCheck, ConcreteWordQueryHoldsAtItsState) {
  const auto& d = cs_disc();
  std::mt19937_64 rng(11);
  int tested = 0;
  while (tested < 300) {
    const RatVector x = random_point(rng, 2, 1.2);
    if (d.lyapunov(x) > d.V0 || d.lyapunov(x) <= d.r * d.V0) continue;
    ++tested;
    const Word w = concrete_sequence(d, x, 60);
    EXPECT_TRUE(holds(sequence_query(d, w, Shell::Sublevel), x));
    EXPECT_TRUE(holds(sequence_query(d, w, Shell::Sublevel, false), x));
    // Any other word of the same length excludes x.
    Word other = w;
    other.back() = other.back() == d.k_bar ? d.k_lo : other.back() + 1;
    EXPECT_FALSE(holds(sequence_query(d, other, Shell::Sublevel), x));
  }
}

TEST(SatCheck, ReplayCompleteness) {
  // Every concretely realized word must be found sat with a witness that replays to it.
  const auto& d = cs_disc();
  std::mt19937_64 rng(12);
  std::vector<Word> words;
  std::vector<SatQuery> qs;
  while (qs.size() < 40) {
    const RatVector x = random_point(rng, 2, 1.2);
    if (d.lyapunov(x) > d.V0 || d.lyapunov(x) <= d.r * d.V0) continue;
    words.push_back(concrete_sequence(d, x, 60));
    qs.push_back(sequence_query(d, words.back(), Shell::Sublevel));
  }
  const auto res = check_all(qs, solver());
  for (size_t i = 0; i < qs.size(); ++i) {
    ASSERT_EQ(res[i].status, SatStatus::Sat) << word_to_string(words[i]);
    EXPECT_EQ(concrete_sequence(d, *res[i].witness, 60), words[i]);
  }
}

TEST(SatCheck, ExtensionsOfUnsatPrefixesAreUnsat) {
  const auto& d = cs_disc();
  std::vector<Word> words;
  std::vector<SatQuery> qs;
  for (int a = d.k_lo; a <= d.k_bar; ++a)
    for (int b = d.k_lo; b <= d.k_bar; ++b) {
      words.push_back({a, b});
      qs.push_back(sequence_query(d, words.back(), Shell::Sublevel, false));
    }
  const auto res = check_all(qs, solver());
  size_t unsat = 0;
  for (size_t i = 0; i < words.size() && unsat < 3; ++i) {
    if (res[i].status != SatStatus::Unsat) continue;
    ++unsat;
    for (int k : {d.k_lo, d.k_bar}) {
      Word ext = words[i];
      ext.push_back(k);
      EXPECT_EQ(check(sequence_query(d, ext, Shell::Sublevel), solver()).status, SatStatus::Unsat);
    }
  }
  EXPECT_GT(unsat, 0u);
}

TEST(SatCheck, AtomCountFormula) {
  const auto& d = cs_disc();
  const int K = d.k_size();
  for (const Word& w : {Word{1}, Word{6}, Word{4, 1, 1}, Word{2, 3, 6, 5, 1}}) {
    int cones = 0;
    for (int k : w) cones += cone_atoms(d, k);
    const int m = static_cast<int>(w.size());
    EXPECT_EQ(static_cast<int>(sequence_query(d, w, Shell::Sublevel).atoms.size()), m + 2 + cones);
    EXPECT_EQ(static_cast<int>(sequence_query(d, w, Shell::Sublevel, false).atoms.size()), m + 1 + cones);
    EXPECT_LE(m + 1 + cones, m + 1 + m * K);
  }
  EXPECT_THROW(sequence_query(d, Word{}, Shell::Sublevel), ConfigError);
  EXPECT_THROW(sequence_query(d, Word{7}, Shell::Sublevel), ConfigError);
}

TEST(SatCheck, SmtScriptIsDeterministic) {
  const auto& d = cs_disc();
  const SatQuery q = sequence_query(d, {4, 1, 1}, Shell::Sublevel);
  const std::string a = to_smtlib(q, {"x0", "x1"});
  EXPECT_EQ(a, to_smtlib(q, {"x0", "x1"}));
  EXPECT_NE(a.find("(declare-fun x0 () Real)"), std::string::npos);
  EXPECT_EQ(a.find("/"), std::string::npos);  // integer coefficients only

  const SatQuery c = unit_circle_on_axis();
  const std::string s = to_smtlib(c, {"x0", "x1"});
  EXPECT_NE(s.find("(assert (= "), std::string::npos);
  EXPECT_NE(s.find("(assert (<= "), std::string::npos);
}

TEST(SatCheck, ModelValueParsing) {
  using detail::parse_model_value;
  EXPECT_EQ(*parse_model_value("(/ 3.0 4.0)"), Rational(3, 4));
  EXPECT_EQ(*parse_model_value("(- (/ 1 3))"), Rational(-1, 3));
  EXPECT_EQ(*parse_model_value("1.25?"), Rational(5, 4));
  EXPECT_EQ(*parse_model_value("0.0"), Rational(0));
  EXPECT_EQ(*parse_model_value("(- 2)"), Rational(-2));
}

TEST(SatCheck, TransportFailuresAreReported) {
  SolverConfig c = solver();
  c.path = "/nonexistent/solver";
  EXPECT_THROW(check(unit_circle_on_axis(), c), SolverTransportError);
  c.path = "false";
  c.args = {};
  EXPECT_THROW(check(unit_circle_on_axis(), c), SolverTransportError);
}

TEST(SatCheck, DeadlineGivesUnknown) {
  SolverConfig c = solver();
  c.path = "sleep";
  c.args = {"20"};
  c.budget_s = 0.3;
  const SatResult r = check(unit_circle_on_axis(), c);
  EXPECT_EQ(r.status, SatStatus::Unknown);
}

TEST(Contraction, HalvingLoopCertifiesOneQuarter) {
  const DiscretizedPetc d = halving_loop();
  EXPECT_EQ(check(contraction_query(d, 1, Rational(1, 4)), solver()).status, SatStatus::Unsat);
  const SatResult below = contraction_counterexample(d, 1, Rational(6, 25), solver());
  ASSERT_EQ(below.status, SatStatus::Sat);
  const ContractionCert cert = compute_a(d, Rational(1, 100), solver());
  EXPECT_EQ(cert.a, Rational(1, 4));
  ASSERT_TRUE(cert.violation_below.has_value());
  const RatVector& x = cert.violation_below->second;
  EXPECT_GT(d.lyapunov(d.m(1) * x), Rational(6, 25) * d.lyapunov(x));
}
