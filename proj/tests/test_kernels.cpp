#include <gtest/gtest.h>

#include "petc/errors.hpp"
#include "petc/kernels.hpp"
#include "support.hpp"

using namespace petc;
using petc::testing::cs_config;
using petc::testing::cs_disc;
using petc::testing::random_point;

namespace {

std::vector<RatVector> points_in_X0(int n, std::uint64_t seed) {
  const auto& d = cs_disc();
  std::mt19937_64 rng(seed);
  std::vector<RatVector> xs;
  while (static_cast<int>(xs.size()) < n) {
    RatVector x = random_point(rng, 2, 1.2);
    if (d.lyapunov(x) <= d.V0) xs.push_back(std::move(x));
  }
  return xs;
}

}  // namespace

TEST(Kernels, ParallelMatchesSerial) {
  const auto& d = cs_disc();
  const auto xs = points_in_X0(400, 21);
  EXPECT_EQ(kappa_batch(d, xs), kappa_batch_serial(d, xs));
  EXPECT_EQ(sequence_batch(d, xs, 60), sequence_batch_serial(d, xs, 60));
  EXPECT_EQ(petc_word_batch(d, xs, 60), petc_word_batch_serial(d, xs, 60));

  const FloatDiscretization fd = discretize_float(cs_config().sys, Rational(2, 5));
  Eigen::MatrixXd cols = Eigen::MatrixXd::Random(2, 5000);
  EXPECT_EQ(max_contraction_ratio(fd, cols), max_contraction_ratio_serial(fd, cols));
}

TEST(Kernels, LowestFailingIndexIsRethrown) {
  const auto& d = cs_disc();
  auto xs = points_in_X0(50, 22);
  xs[30] = RatVector{5, 5};
  xs[40] = RatVector{7, 7};
  try {
    sequence_batch(d, xs, 60);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    std::string serial_msg;
    try {
      sequence_batch_serial(d, xs, 60);
    } catch (const DomainError& s) {
      serial_msg = s.what();
    }
    EXPECT_EQ(std::string(e.what()), serial_msg);
  }
}
