#include "petc/sysmodel.hpp"

#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <string>

#include "petc/errors.hpp"

namespace petc {

namespace {

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

bool nearly_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

double max_eigenvalue(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

// expm([[A, B],[0, 0]] t) and its blocks.
struct HeldInputMaps {
  Eigen::MatrixXd Ad;
  Eigen::MatrixXd Bd;
};

HeldInputMaps held_input_maps(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double t) {
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = A;
  aug.topRightCorner(n, m) = B;
  Eigen::MatrixXd e = expm(aug, t);
  return {e.topLeftCorner(n, n), e.topRightCorner(n, m)};
}

}  // namespace

void PetcSystem::validate() const {
  const auto n = A.rows();
  if (n == 0 || A.cols() != n) throw ConfigError("A must be a non-empty square matrix");
  if (B.rows() != n || B.cols() == 0) throw ConfigError("B must have n_x rows");
  if (K.rows() != B.cols() || K.cols() != n) throw ConfigError("K must be n_u x n_x");
  if (P.rows() != n || P.cols() != n) throw ConfigError("P must be n_x x n_x");
  if (Q_trig.rows() != 2 * n || Q_trig.cols() != 2 * n) throw ConfigError("Q_trig must be 2n_x x 2n_x");
  if (!all_finite(A) || !all_finite(B) || !all_finite(K) || !all_finite(P) || !all_finite(Q_trig))
    throw ConfigError("system matrices must be finite");
  if (!nearly_symmetric(P)) throw ConfigError("P must be symmetric");
  if (!nearly_symmetric(Q_trig)) throw ConfigError("Q_trig must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= kEigTol) throw ConfigError("P must be positive definite");
  if (sgn(h) <= 0) throw ConfigError("h must be positive");
  if (k_bar < 1) throw ConfigError("k_bar must be at least 1");
  if (sgn(r) <= 0 || r >= 1) throw ConfigError("r must lie in (0, 1)");
  if (sgn(V0) <= 0) throw ConfigError("V0 must be positive");
}

void PredictiveTriggerSpec::validate() const {
  if (P_lyap.rows() != P_lyap.cols() || Q_lyap.rows() != Q_lyap.cols() || P_lyap.rows() != Q_lyap.rows())
    throw ConfigError("P_lyap and Q_lyap must be square and of equal size");
  if (!nearly_symmetric(P_lyap) || !nearly_symmetric(Q_lyap))
    throw ConfigError("P_lyap and Q_lyap must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ep(P_lyap, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eq(Q_lyap, Eigen::EigenvaluesOnly);
  if (ep.eigenvalues().minCoeff() <= 0 || eq.eigenvalues().minCoeff() <= 0)
    throw ConfigError("P_lyap and Q_lyap must be positive definite");
  if (!(rho > 0 && rho < 1)) throw ConfigError("rho must lie in (0, 1)");
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& M, double t) {
  if (M.rows() != M.cols()) throw ConfigError("expm: matrix must be square");
  if (!M.allFinite() || !std::isfinite(t)) throw ConfigError("expm: non-finite input");

  // Higham (2005) degree-13 Padé with scaling and squaring.
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;

  const Eigen::Index n = M.rows();
  Eigen::MatrixXd A = M * t;
  const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > theta13) s = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  if (s > 0) A /= std::ldexp(1.0, s);

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd A2 = A * A;
  const Eigen::MatrixXd A4 = A2 * A2;
  const Eigen::MatrixXd A6 = A4 * A2;
  Eigen::MatrixXd U = A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  Eigen::MatrixXd V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
  Eigen::MatrixXd R = (V - U).partialPivLu().solve(V + U);
  for (int i = 0; i < s; ++i) R = R * R;
  return R;
}

Eigen::MatrixXd transition(const PetcSystem& sys, double t) {
  auto [Ad, Bd] = held_input_maps(sys.A, sys.B, t);
  return Ad + Bd * sys.K;
}

Eigen::MatrixXd discretize(const PetcSystem& sys, int k) {
  if (k < 1 || k > sys.k_bar) throw ConfigError("discretize: k=" + std::to_string(k) + " outside 1..k_bar");
  return transition(sys, Rational(sys.h * k).get_d());
}

Eigen::MatrixXd trig_form(const PetcSystem& sys, const Eigen::MatrixXd& Mk) {
  const Eigen::Index n = sys.nx();
  if (Mk.rows() != n || Mk.cols() != n || sys.Q_trig.rows() != 2 * n || sys.Q_trig.cols() != 2 * n)
    throw ConfigError("trig_form: dimension mismatch");
  Eigen::MatrixXd stacked(2 * n, n);
  stacked.topRows(n) = Mk;
  stacked.bottomRows(n) = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd N = stacked.transpose() * sys.Q_trig * stacked;
  return 0.5 * (N + N.transpose());
}

int min_inter_sample(const std::vector<Eigen::MatrixXd>& N, int k_bar, double eig_tol) {
  for (int k = 1; k <= k_bar && k <= static_cast<int>(N.size()); ++k)
    if (max_eigenvalue(N[static_cast<size_t>(k - 1)]) > eig_tol) return k;
  return k_bar;
}

Eigen::MatrixXd build_predictive_Q(const PredictiveTriggerSpec& spec, const Eigen::MatrixXd& A,
                                   const Eigen::MatrixXd& B, const Eigen::MatrixXd& K, double h) {
  spec.validate();
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || K.rows() != B.cols() || K.cols() != n || spec.P_lyap.rows() != n)
    throw ConfigError("build_predictive_Q: dimension mismatch");
  if (!(h > 0)) throw ConfigError("build_predictive_Q: h must be positive");

  auto [Ad, Bd] = held_input_maps(A, B, h);
  // ζ = L [x; x̂],  dζ/dt (input held at K x̂) = D [x; x̂].
  Eigen::MatrixXd L(n, 2 * n);
  L << Ad, Bd * K;
  Eigen::MatrixXd D = A * L;
  D.rightCols(n) += B * K;
  Eigen::MatrixXd cross = L.transpose() * spec.P_lyap * D;
  Eigen::MatrixXd Q = cross + cross.transpose() + spec.rho * L.transpose() * spec.Q_lyap * L;
  return 0.5 * (Q + Q.transpose());
}

FloatDiscretization discretize_float(const PetcSystem& sys, const Rational& h_P) {
  sys.validate();
  if (sgn(h_P) <= 0) throw ConfigError("h_P must be positive");
  FloatDiscretization d;
  d.M.reserve(static_cast<size_t>(sys.k_bar));
  d.N.reserve(static_cast<size_t>(sys.k_bar));
  for (int k = 1; k <= sys.k_bar; ++k) {
    d.M.push_back(discretize(sys, k));
    d.N.push_back(trig_form(sys, d.M.back()));
  }
  d.M_P = transition(sys, h_P.get_d());
  d.P = 0.5 * (sys.P + sys.P.transpose());
  d.Q_trig = 0.5 * (sys.Q_trig + sys.Q_trig.transpose());
  d.k_lo = min_inter_sample(d.N, sys.k_bar);
  d.h = sys.h;
  d.h_P = h_P;
  d.k_bar = sys.k_bar;
  d.r = sys.r;
  d.V0 = sys.V0;
  return d;
}

DiscretizedPetc rationalize(const FloatDiscretization& d) {
  DiscretizedPetc out;
  try {
    for (const auto& m : d.M) out.M.push_back(to_rational(m));
    for (const auto& n : d.N) {
      RatMatrix q = to_rational(n);
      for (int i = 0; i < q.rows(); ++i)
        for (int j = i + 1; j < q.cols(); ++j) q(j, i) = q(i, j);
      out.N.push_back(std::move(q));
    }
    out.M_P = to_rational(d.M_P);
    out.P = to_rational(d.P);
    out.Q_trig = to_rational(d.Q_trig);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("rationalize: ") + e.what());
  }
  out.k_lo = d.k_lo;
  out.h = d.h;
  out.h_P = d.h_P;
  out.k_bar = d.k_bar;
  out.r = d.r;
  out.V0 = d.V0;
  return out;
}

DiscretizedPetc discretize_system(const PetcSystem& sys, const Rational& h_P) {
  return rationalize(discretize_float(sys, h_P));
}

}  // namespace petc
