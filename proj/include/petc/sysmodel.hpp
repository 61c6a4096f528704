#pragma once

#include <Eigen/Dense>
#include <vector>

#include "petc/rational.hpp"

namespace petc {

/// Default tolerance for "N(k) has a positive eigenvalue" and the periodic Lyapunov test.
inline constexpr double kEigTol = 1e-9;

/**
 * Sampled-data linear plant with state feedback u = K x̂, a quadratic Lyapunov
 * function V(x) = xᵀPx and a static quadratic triggering condition
 * [ξ; x̂]ᵀ Q_trig [ξ; x̂] > 0 checked every h time units.
 *
 * Scalars that users type as decimals (h, r, V0) are kept as exact rationals.
 */
struct PetcSystem {
  Eigen::MatrixXd A;       //!< n_x × n_x
  Eigen::MatrixXd B;       //!< n_x × n_u
  Eigen::MatrixXd K;       //!< n_u × n_x
  Eigen::MatrixXd P;       //!< n_x × n_x, symmetric positive definite
  Eigen::MatrixXd Q_trig;  //!< 2n_x × 2n_x, symmetric
  Rational h{1, 10};       //!< checking period
  int k_bar = 1;           //!< forced trigger after k_bar checks
  Rational r{1, 10};       //!< X_P = {V ≤ r V0}
  Rational V0{1};          //!< X_0 = {V ≤ V0}

  [[nodiscard]] int nx() const { return static_cast<int>(A.rows()); }
  [[nodiscard]] int nu() const { return static_cast<int>(B.cols()); }

  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

/// Predictive Lyapunov trigger: sample when dV/dt at the one-step prediction ζ exceeds −ρ ζᵀQ_lyap ζ.
struct PredictiveTriggerSpec {
  Eigen::MatrixXd P_lyap;
  Eigen::MatrixXd Q_lyap;
  double rho = 0.5;

  void validate() const;
};

/// Floating-point discretization, before freezing into rationals.
struct FloatDiscretization {
  std::vector<Eigen::MatrixXd> M;  //!< M[k-1] = M(k), k = 1..k_bar
  std::vector<Eigen::MatrixXd> N;  //!< N[k-1] = N(k), symmetric
  Eigen::MatrixXd M_P;             //!< transition over the periodic period h_P
  Eigen::MatrixXd P;
  Eigen::MatrixXd Q_trig;
  int k_lo = 1;
  Rational h;
  Rational h_P;
  int k_bar = 1;
  Rational r;
  Rational V0;
};

/**
 * Exact-rational discretized loop. Every downstream module (semantics, solver
 * encoding, verification) reads these matrices, so the abstraction and the
 * concrete replay see bit-identical data.
 */
struct DiscretizedPetc {
  std::vector<RatMatrix> M;  //!< M[k-1] = M(k)
  std::vector<RatMatrix> N;  //!< N[k-1] = N(k)
  RatMatrix M_P;
  RatMatrix P;
  RatMatrix Q_trig;
  int k_lo = 1;
  Rational h;
  Rational h_P;
  int k_bar = 1;
  Rational r;
  Rational V0;

  [[nodiscard]] int nx() const { return P.rows(); }
  [[nodiscard]] const RatMatrix& m(int k) const { return M.at(static_cast<size_t>(k - 1)); }
  [[nodiscard]] const RatMatrix& n(int k) const { return N.at(static_cast<size_t>(k - 1)); }
  [[nodiscard]] int k_size() const { return k_bar - k_lo + 1; }
  /// V(x) = xᵀPx.
  [[nodiscard]] Rational lyapunov(const RatVector& x) const { return quad_form(P, x); }
};

/// e^{M t} by scaling and squaring with a degree-13 Padé approximant.
Eigen::MatrixXd expm(const Eigen::MatrixXd& M, double t);

/// Held-input transition over duration t: A_d(t) + B_d(t) K, blocks of expm([[A, B],[0, 0]] t).
Eigen::MatrixXd transition(const PetcSystem& sys, double t);

/// M(k) = A_d(hk) + B_d(hk) K.
Eigen::MatrixXd discretize(const PetcSystem& sys, int k);

/// N(k) = [M(k); I]ᵀ Q_trig [M(k); I], symmetrized.
Eigen::MatrixXd trig_form(const PetcSystem& sys, const Eigen::MatrixXd& Mk);

/// Smallest k with N(k) not negative semidefinite (largest eigenvalue > eig_tol); k_bar if none.
int min_inter_sample(const std::vector<Eigen::MatrixXd>& N, int k_bar, double eig_tol = kEigTol);

/// Triggering matrix of the predictive Lyapunov condition for plant (A, B, K) and checking period h.
Eigen::MatrixXd build_predictive_Q(const PredictiveTriggerSpec& spec, const Eigen::MatrixXd& A,
                                   const Eigen::MatrixXd& B, const Eigen::MatrixXd& K, double h);

/// Computes M(k), N(k), k_lo and M_P in double precision.
FloatDiscretization discretize_float(const PetcSystem& sys, const Rational& h_P);

/// Freezes every matrix into the exact rational it represents.
DiscretizedPetc rationalize(const FloatDiscretization& d);

/// discretize_float followed by rationalize.
DiscretizedPetc discretize_system(const PetcSystem& sys, const Rational& h_P);

}  // namespace petc
