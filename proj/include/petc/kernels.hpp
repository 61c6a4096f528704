#pragma once

#include <vector>

#include "petc/semantics.hpp"

// Batch kernels over many sample states. Each parallel kernel has a serial twin with
// identical results; tests compare them and the benchmark times them.

namespace petc {

/// κ(x) for every x, exact.
std::vector<int> kappa_batch(const DiscretizedPetc& disc, const std::vector<RatVector>& xs);
std::vector<int> kappa_batch_serial(const DiscretizedPetc& disc, const std::vector<RatVector>& xs);

/// concrete_sequence for every x0. The first failing index (lowest) rethrows its error.
std::vector<Word> sequence_batch(const DiscretizedPetc& disc, const std::vector<RatVector>& xs, int max_len);
std::vector<Word> sequence_batch_serial(const DiscretizedPetc& disc, const std::vector<RatVector>& xs, int max_len);

/// petc_word for every x.
std::vector<Word> petc_word_batch(const DiscretizedPetc& disc, const std::vector<RatVector>& xs, int max_len);
std::vector<Word> petc_word_batch_serial(const DiscretizedPetc& disc, const std::vector<RatVector>& xs, int max_len);

/// max over columns x of V(M(κ(x))x) / V(x), in double precision on the float matrices.
double max_contraction_ratio(const FloatDiscretization& fd, const Eigen::MatrixXd& xs);
double max_contraction_ratio_serial(const FloatDiscretization& fd, const Eigen::MatrixXd& xs);

}  // namespace petc
