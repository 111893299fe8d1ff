#include "bclf/periodic.hpp"

#include <cmath>
#include <string>

#include "bclf/errors.hpp"

namespace bclf {

std::pair<Eigen::MatrixXd, Eigen::VectorXd> ldl_decompose(const Eigen::MatrixXd& sigma) {
  const Eigen::Index K = sigma.rows();
  if (sigma.cols() != K) throw DimensionError("ldl_decompose: matrix is not square");
  if (!sigma.isApprox(sigma.transpose(), 1e-10))
    throw DomainError("ldl_decompose: matrix is not symmetric");

  Eigen::MatrixXd L = Eigen::MatrixXd::Identity(K, K);
  Eigen::VectorXd w(K);
  for (Eigen::Index j = 0; j < K; ++j) {
    double d = sigma(j, j);
    for (Eigen::Index s = 0; s < j; ++s) d -= L(j, s) * L(j, s) * w[s];
    if (!(d > 0.0) || !std::isfinite(d))
      throw NotPositiveDefiniteError("ldl_decompose: non-positive pivot at index " +
                                     std::to_string(j));
    w[j] = d;
    for (Eigen::Index i = j + 1; i < K; ++i) {
      double v = sigma(i, j);
      for (Eigen::Index s = 0; s < j; ++s) v -= L(i, s) * L(j, s) * w[s];
      L(i, j) = v / d;
    }
  }
  return {std::move(L), std::move(w)};
}

TvVarModel assemble_tvvar(const PeriodicCoefficients& coeffs) {
  const int K = coeffs.K;
  const int T = coeffs.T;
  const int P = coeffs.P;
  if (K < 1 || T < 1 || P < 1) throw DimensionError("assemble_tvvar: invalid K/T/P");
  if (static_cast<int>(coeffs.coeff.size()) != K ||
      static_cast<int>(coeffs.variance.size()) != K)
    throw DimensionError("assemble_tvvar: coefficient storage does not match K");
  for (int k = 0; k < K; ++k) {
    if (coeffs.coeff[k].rows() != coeffs.order_of(k) || coeffs.coeff[k].cols() != T)
      throw DimensionError("assemble_tvvar: channel " + std::to_string(k + 1) +
                           " must store M_k x T coefficients");
    if (coeffs.variance[k].size() != T)
      throw DimensionError("assemble_tvvar: variance trajectory length mismatch");
  }

  TvVarModel model;
  model.K = K;
  model.T = T;
  model.P = P;
  model.phi.resize(T);
  model.sigma.resize(T);
  model.chol_l.resize(T);
  model.innovation_var.resize(T);

  Eigen::MatrixXd linv(K, K);
  Eigen::MatrixXd a_p(K, K);
  for (int t = 0; t < T; ++t) {
    linv.setIdentity();
    for (int k = 1; k < K; ++k)
      for (int j = 0; j < k; ++j) linv(k, j) = -coeffs.coeff[k](k - j - 1, t);

    const Eigen::MatrixXd L = linv.triangularView<Eigen::UnitLower>().solve(
        Eigen::MatrixXd::Identity(K, K));

    Eigen::VectorXd w(K);
    for (int k = 0; k < K; ++k) {
      const double v = coeffs.variance[k][t];
      if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError("assemble_tvvar: non-positive innovation variance at channel " +
                          std::to_string(k + 1) + ", t=" + std::to_string(t + 1));
      w[k] = v;
    }

    model.phi[t].resize(P);
    for (int p = 1; p <= P; ++p) {
      for (int k = 0; k < K; ++k)
        for (int j = 0; j < K; ++j) a_p(k, j) = coeffs.coeff[k](p * K + k - j - 1, t);
      model.phi[t][p - 1].noalias() = L * a_p;
    }
    model.chol_l[t] = L;
    model.innovation_var[t] = w;
    model.sigma[t].noalias() = L * w.asDiagonal() * L.transpose();
  }
  return model;
}

TvVarModel make_tvvar(std::vector<std::vector<Eigen::MatrixXd>> phi,
                      std::vector<Eigen::MatrixXd> sigma) {
  if (phi.empty() || phi.size() != sigma.size())
    throw DimensionError("make_tvvar: phi and sigma must cover the same time span");
  TvVarModel model;
  model.T = static_cast<int>(phi.size());
  model.P = static_cast<int>(phi.front().size());
  model.K = static_cast<int>(sigma.front().rows());
  if (model.P < 1) throw DimensionError("make_tvvar: order must be at least 1");
  model.chol_l.resize(model.T);
  model.innovation_var.resize(model.T);
  for (int t = 0; t < model.T; ++t) {
    auto [L, w] = ldl_decompose(sigma[t]);
    model.chol_l[t] = std::move(L);
    model.innovation_var[t] = std::move(w);
  }
  model.phi = std::move(phi);
  model.sigma = std::move(sigma);
  return model;
}

}  // namespace bclf
