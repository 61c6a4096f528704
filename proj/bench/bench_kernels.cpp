// Serial reference vs OpenMP kernels on the two-state example.

#include <benchmark/benchmark.h>

#include <random>

#include "petc/config.hpp"
#include "petc/kernels.hpp"
#include "petc/verify.hpp"

using namespace petc;

namespace {

const DiscretizedPetc& disc() {
  static const DiscretizedPetc d = discretize_system(casestudy_config().sys, Rational(2, 5));
  return d;
}

const FloatDiscretization& float_disc() {
  static const FloatDiscretization fd = discretize_float(casestudy_config().sys, Rational(2, 5));
  return fd;
}

std::vector<RatVector> points(std::size_t n) {
  std::mt19937_64 rng(2021);
  std::vector<RatVector> xs;
  for (std::size_t i = 0; i < n; ++i) xs.push_back(sample_sublevel(disc(), rng));
  return xs;
}

void BM_KappaSerial(benchmark::State& st) {
  const auto xs = points(static_cast<size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kappa_batch_serial(disc(), xs));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_KappaParallel(benchmark::State& st) {
  const auto xs = points(static_cast<size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kappa_batch(disc(), xs));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_SequenceSerial(benchmark::State& st) {
  const auto xs = points(static_cast<size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(sequence_batch_serial(disc(), xs, 47));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_SequenceParallel(benchmark::State& st) {
  const auto xs = points(static_cast<size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(sequence_batch(disc(), xs, 47));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

Eigen::MatrixXd directions(Eigen::Index n) { return Eigen::MatrixXd::Random(2, n); }

void BM_RatioSerial(benchmark::State& st) {
  const auto xs = directions(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(max_contraction_ratio_serial(float_disc(), xs));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_RatioParallel(benchmark::State& st) {
  const auto xs = directions(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(max_contraction_ratio(float_disc(), xs));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

BENCHMARK(BM_KappaSerial)->Arg(1000)->Arg(10000);
BENCHMARK(BM_KappaParallel)->Arg(1000)->Arg(10000);
BENCHMARK(BM_SequenceSerial)->Arg(500);
BENCHMARK(BM_SequenceParallel)->Arg(500);
BENCHMARK(BM_RatioSerial)->Arg(100000);
BENCHMARK(BM_RatioParallel)->Arg(100000);

BENCHMARK_MAIN();
