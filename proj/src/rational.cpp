#include "petc/rational.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace petc {

RatMatrix RatMatrix::identity(int n) {
  RatMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RatMatrix RatMatrix::transpose() const {
  RatMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool RatMatrix::is_symmetric() const {
  if (!is_square()) return false;
  for (int i = 0; i < rows_; ++i)
    for (int j = i + 1; j < cols_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

RatMatrix operator*(const RatMatrix& a, const RatMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("RatMatrix product: dimension mismatch");
  RatMatrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int l = 0; l < a.cols(); ++l) {
      if (a(i, l) == 0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += a(i, l) * b(l, j);
    }
  return c;
}

RatMatrix operator+(const RatMatrix& a, const RatMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("RatMatrix sum: dimension mismatch");
  RatMatrix c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

RatMatrix operator-(const RatMatrix& a, const RatMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("RatMatrix difference: dimension mismatch");
  RatMatrix c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

RatMatrix operator*(const Rational& s, const RatMatrix& m) {
  RatMatrix c(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) c(i, j) = s * m(i, j);
  return c;
}

RatVector operator*(const RatMatrix& m, const RatVector& x) {
  if (static_cast<int>(x.size()) != m.cols())
    throw std::invalid_argument("RatMatrix * vector: dimension mismatch");
  RatVector y(m.rows());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) y[i] += m(i, j) * x[j];
  return y;
}

RatMatrix congruence(const RatMatrix& phi, const RatMatrix& f) { return phi.transpose() * (f * phi); }

Rational quad_form(const RatMatrix& f, const RatVector& x) {
  const int n = static_cast<int>(x.size());
  if (f.rows() != n || f.cols() != n) throw std::invalid_argument("quad_form: dimension mismatch");
  Rational acc = 0;
  Rational row;
  for (int i = 0; i < n; ++i) {
    if (x[i] == 0) continue;
    row = 0;
    for (int j = 0; j < n; ++j) row += f(i, j) * x[j];
    acc += x[i] * row;
  }
  return acc;
}

bool is_positive_definite(const RatMatrix& f) {
  if (!f.is_symmetric()) return false;
  // Gaussian elimination without pivoting; all pivots positive iff PD.
  RatMatrix a = f;
  const int n = a.rows();
  for (int k = 0; k < n; ++k) {
    if (sgn(a(k, k)) <= 0) return false;
    for (int i = k + 1; i < n; ++i) {
      if (a(i, k) == 0) continue;
      Rational factor = a(i, k) / a(k, k);
      for (int j = k; j < n; ++j) a(i, j) -= factor * a(k, j);
    }
  }
  return true;
}

Rational to_rational(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("to_rational: non-finite value");
  // mpq_set_d is exact for finite doubles.
  Rational q;
  mpq_set_d(q.get_mpq_t(), v);
  q.canonicalize();
  return q;
}

RatMatrix to_rational(const Eigen::MatrixXd& m) {
  RatMatrix r(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(i, j) = to_rational(m(i, j));
  return r;
}

RatVector to_rational(const Eigen::VectorXd& v) {
  RatVector r(v.size());
  for (int i = 0; i < v.size(); ++i) r[i] = to_rational(v(i));
  return r;
}

Rational decimal_rational(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("decimal_rational: non-finite value");
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return parse_rational(buf);
  }
  return to_rational(v);
}

double to_double(const Rational& q) { return q.get_d(); }

Eigen::MatrixXd to_double(const RatMatrix& m) {
  Eigen::MatrixXd d(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) d(i, j) = m(i, j).get_d();
  return d;
}

Eigen::VectorXd to_double(const RatVector& v) {
  Eigen::VectorXd d(v.size());
  for (size_t i = 0; i < v.size(); ++i) d(static_cast<Eigen::Index>(i)) = v[i].get_d();
  return d;
}

namespace {

mpz_class parse_integer(std::string_view digits) {
  if (digits.empty()) throw std::invalid_argument("parse_rational: empty integer");
  for (char c : digits)
    if (c < '0' || c > '9') throw std::invalid_argument("parse_rational: bad digit in '" + std::string(digits) + "'");
  return mpz_class(std::string(digits), 10);
}

mpz_class pow10(long e) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e));
  return p;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("parse_rational: empty string");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_rational(text.substr(0, slash));
    Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("parse_rational: zero denominator");
    Rational q = num / den;
    q.canonicalize();
    return q;
  }

  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = text.substr(e + 1);
    bool exp_neg = false;
    if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
      exp_neg = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
    if (ec != std::errc() || ptr != exp_text.data() + exp_text.size())
      throw std::invalid_argument("parse_rational: bad exponent");
    if (exp_neg) exponent = -exponent;
    text = text.substr(0, e);
  }
  std::string digits;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view frac = text.substr(dot + 1);
    digits = std::string(text.substr(0, dot)) + std::string(frac);
    exponent -= static_cast<long>(frac.size());
  } else {
    digits = std::string(text);
  }
  Rational q(parse_integer(digits));
  if (exponent > 0) q *= pow10(exponent);
  if (exponent < 0) q /= pow10(-exponent);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

Rational approx_sqrt(const Rational& q, int newton_steps) {
  if (sgn(q) < 0) throw std::invalid_argument("approx_sqrt: negative argument");
  if (q == 0) return 0;
  double seed = std::sqrt(q.get_d());
  Rational t = (std::isfinite(seed) && seed > 0) ? to_rational(seed) : Rational(1);
  for (int i = 0; i < newton_steps; ++i) {
    t = (t + q / t) / 2;
    t.canonicalize();
  }
  return t;
}

}  // namespace petc
