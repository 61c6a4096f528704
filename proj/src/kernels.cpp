#include "petc/kernels.hpp"

#include <exception>

namespace petc {

namespace {

template <typename Out, typename Fn>
std::vector<Out> map_parallel(size_t n, Fn fn) {
  std::vector<Out> out(n);
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < count; ++i) {
    try {
      out[static_cast<size_t>(i)] = fn(static_cast<size_t>(i));
    } catch (...) {
      errors[static_cast<size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

template <typename Out, typename Fn>
std::vector<Out> map_serial(size_t n, Fn fn) {
  std::vector<Out> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) out.push_back(fn(i));
  return out;
}

int kappa_float(const FloatDiscretization& fd, const Eigen::VectorXd& x) {
  for (int k = 1; k < fd.k_bar; ++k)
    if (x.dot(fd.N[static_cast<size_t>(k - 1)] * x) > 0) return k;
  return fd.k_bar;
}

double ratio(const FloatDiscretization& fd, const Eigen::VectorXd& x) {
  const double v = x.dot(fd.P * x);
  if (!(v > 0)) return 0;
  const Eigen::VectorXd y = fd.M[static_cast<size_t>(kappa_float(fd, x) - 1)] * x;
  return y.dot(fd.P * y) / v;
}

}  // namespace

std::vector<int> kappa_batch(const DiscretizedPetc& disc, const std::vector<RatVector>& xs) {
  return map_parallel<int>(xs.size(), [&](size_t i) { return kappa(disc, xs[i]); });
}

std::vector<int> kappa_batch_serial(const DiscretizedPetc& disc, const std::vector<RatVector>& xs) {
  return map_serial<int>(xs.size(), [&](size_t i) { return kappa(disc, xs[i]); });
}

std::vector<Word> sequence_batch(const DiscretizedPetc& disc, const std::vector<RatVector>& xs, int max_len) {
  return map_parallel<Word>(xs.size(), [&](size_t i) { return concrete_sequence(disc, xs[i], max_len); });
}

std::vector<Word> sequence_batch_serial(const DiscretizedPetc& disc, const std::vector<RatVector>& xs, int max_len) {
  return map_serial<Word>(xs.size(), [&](size_t i) { return concrete_sequence(disc, xs[i], max_len); });
}

std::vector<Word> petc_word_batch(const DiscretizedPetc& disc, const std::vector<RatVector>& xs, int max_len) {
  return map_parallel<Word>(xs.size(), [&](size_t i) { return petc_word(disc, xs[i], max_len); });
}

std::vector<Word> petc_word_batch_serial(const DiscretizedPetc& disc, const std::vector<RatVector>& xs, int max_len) {
  return map_serial<Word>(xs.size(), [&](size_t i) { return petc_word(disc, xs[i], max_len); });
}

double max_contraction_ratio(const FloatDiscretization& fd, const Eigen::MatrixXd& xs) {
  double best = 0;
  const auto count = static_cast<long>(xs.cols());
#pragma omp parallel for reduction(max : best) schedule(static)
  for (long i = 0; i < count; ++i) best = std::max(best, ratio(fd, xs.col(i)));
  return best;
}

double max_contraction_ratio_serial(const FloatDiscretization& fd, const Eigen::MatrixXd& xs) {
  double best = 0;
  for (Eigen::Index i = 0; i < xs.cols(); ++i) best = std::max(best, ratio(fd, xs.col(i)));
  return best;
}

}  // namespace petc
