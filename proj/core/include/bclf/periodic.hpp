#ifndef BCLF_PERIODIC_HPP
#define BCLF_PERIODIC_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace bclf {

/// Coefficients of the interlaced periodic TV-AR representation, stored
/// channel-major: coeff[k] is an M_k x T array whose (m-1, t) entry is the
/// lag-m coefficient of channel k at time t, and variance[k][t] is the
/// innovation variance of channel k at time t (strictly positive).
///
/// Channel k (0-based) has order M_k = K*P + k. Lags m = 1..k are
/// contemporaneous (they multiply channels k-1..0 at the same time step);
/// lag m = p*K + k - j multiplies channel j at time t - p.
struct PeriodicCoefficients {
  int K = 0;
  int T = 0;
  int P = 0;
  std::vector<Eigen::MatrixXd> coeff;     // per channel: M_k x T
  std::vector<Eigen::VectorXd> variance;  // per channel: T

  int order_of(int k) const { return K * P + k; }
};

/// Time-varying VAR(P) model with its per-time LDL covariance factors.
/// Invariant: sigma[t] == chol_l[t] * diag(innovation_var[t]) * chol_l[t]'
/// to 1e-12 relative Frobenius norm.
struct TvVarModel {
  int K = 0;
  int T = 0;
  int P = 0;
  std::vector<std::vector<Eigen::MatrixXd>> phi;  // [t][p-1], each K x K
  std::vector<Eigen::MatrixXd> sigma;             // [t], K x K SPD
  std::vector<Eigen::MatrixXd> chol_l;            // [t], unit lower triangular
  std::vector<Eigen::VectorXd> innovation_var;    // [t], positive diagonal of W
};

/// Unpivoted LDL (modified Cholesky): sigma = L * diag(w) * L' with L unit
/// lower triangular. The factorization is order-dependent by design; no
/// symmetric pivoting is applied. Throws NotPositiveDefiniteError on a
/// non-positive pivot.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> ldl_decompose(const Eigen::MatrixXd& sigma);

/// Builds the TV-VAR model from periodic coefficients: per time step,
/// contemporaneous lags populate L^{-1} (negated, unit diagonal), lag block
/// p populates A_p via A_p(k, j) = a_{pK+k-j}, and
///   Phi_p = L * A_p,  W = diag(variance),  Sigma = L W L'.
TvVarModel assemble_tvvar(const PeriodicCoefficients& coeffs);

/// Constructs a model from explicit Phi/Sigma paths, deriving the LDL
/// factors per time step. phi is indexed [t][p-1].
TvVarModel make_tvvar(std::vector<std::vector<Eigen::MatrixXd>> phi,
                      std::vector<Eigen::MatrixXd> sigma);

}  // namespace bclf

#endif  // BCLF_PERIODIC_HPP
