#pragma once

#include <gmpxx.h>

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

namespace petc {

using Rational = mpq_class;
using RatVector = std::vector<Rational>;

/// Dense row-major matrix of exact rationals.
class RatMatrix {
 public:
  RatMatrix() = default;
  RatMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols) {}

  static RatMatrix identity(int n);
  static RatMatrix zero(int rows, int cols) { return RatMatrix(rows, cols); }

  [[nodiscard]] int rows() const { return rows_; }
  [[nodiscard]] int cols() const { return cols_; }
  [[nodiscard]] bool is_square() const { return rows_ == cols_; }

  Rational& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  const Rational& operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

  [[nodiscard]] RatMatrix transpose() const;
  [[nodiscard]] bool is_symmetric() const;

  friend bool operator==(const RatMatrix& a, const RatMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Rational> data_;
};

RatMatrix operator*(const RatMatrix& a, const RatMatrix& b);
RatMatrix operator+(const RatMatrix& a, const RatMatrix& b);
RatMatrix operator-(const RatMatrix& a, const RatMatrix& b);
RatMatrix operator*(const Rational& s, const RatMatrix& m);
RatVector operator*(const RatMatrix& m, const RatVector& x);

/// Phiᵀ F Phi.
RatMatrix congruence(const RatMatrix& phi, const RatMatrix& f);

/// xᵀ F x, exact.
Rational quad_form(const RatMatrix& f, const RatVector& x);

/// Exact positive definiteness via leading principal minors (fraction-free elimination).
bool is_positive_definite(const RatMatrix& f);

// Conversions. A finite double is a dyadic rational; to_rational returns it exactly.
Rational to_rational(double v);
RatMatrix to_rational(const Eigen::MatrixXd& m);
RatVector to_rational(const Eigen::VectorXd& v);

/// Shortest decimal string that round-trips to `v`, read back as a rational (0.1 -> 1/10).
Rational decimal_rational(double v);

double to_double(const Rational& q);
Eigen::MatrixXd to_double(const RatMatrix& m);
Eigen::VectorXd to_double(const RatVector& v);

/// "p/q", "p", "-1.25", "3e-2" -> exact rational. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

/// Rational t with |t - sqrt(q)| small; exact Newton refinement on a double seed.
Rational approx_sqrt(const Rational& q, int newton_steps = 3);

}  // namespace petc
