#include "bclf/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bclf/errors.hpp"
#include "bclf/rng.hpp"

namespace bclf {

Criterion criterion_from_string(const std::string& name) {
  if (name == "bic") return Criterion::bic;
  if (name == "dic") return Criterion::dic;
  if (name == "waic") return Criterion::waic;
  throw ConfigError("unknown criterion '" + name + "' (expected bic|dic|waic)");
}

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::bic: return "bic";
    case Criterion::dic: return "dic";
    case Criterion::waic: return "waic";
  }
  return "?";
}

int OrderReport::argmin(Criterion c) const {
  if (rows.empty()) throw StateError("OrderReport::argmin on empty report");
  int best_p = rows.front().P;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& row : rows) {
    const double v = c == Criterion::bic ? row.bic : c == Criterion::dic ? row.dic : row.waic;
    if (std::isfinite(v) && v < best) {
      best = v;
      best_p = row.P;
    }
  }
  return best_p;
}

long n_parameters(int P, int K) {
  return 2L * P * K * K + static_cast<long>(K - 1) * K;
}

Eigen::VectorXd per_obs_loglik(const TvVarModel& model, const SeriesMatrix& x) {
  const int K = model.K;
  const int T = model.T;
  const int P = model.P;
  if (x.channels() != K || x.length() != T)
    throw DimensionError("per_obs_loglik: series does not match model dimensions");
  if (T <= P) throw InsufficientDataError("per_obs_loglik: series no longer than order");

  const double c = -0.5 * K * std::log(2.0 * std::numbers::pi);
  Eigen::VectorXd out(T - P);
  Eigen::VectorXd resid(K);
  for (int t = P; t < T; ++t) {
    resid = x.values.col(t);
    for (int p = 1; p <= P; ++p) resid.noalias() -= model.phi[t][p - 1] * x.values.col(t - p);
    // Sigma_t = L W L' so the quadratic form and determinant come from the
    // stored factors directly.
    const Eigen::VectorXd& w = model.innovation_var[t];
    if ((w.array() <= 0.0).any())
      throw DomainError("per_obs_loglik: singular innovation covariance at t=" +
                        std::to_string(t + 1));
    model.chol_l[t].triangularView<Eigen::UnitLower>().solveInPlace(resid);
    double ll = c - 0.5 * w.array().log().sum();
    ll -= 0.5 * (resid.array().square() / w.array()).sum();
    out[t - P] = ll;
  }
  return out;
}

double plug_in_loglik(const TvVarModel& model, const SeriesMatrix& x) {
  return per_obs_loglik(model, x).sum();
}

double bic(const TvVarModel& model, const SeriesMatrix& x) {
  return -2.0 * plug_in_loglik(model, x) +
         static_cast<double>(n_parameters(model.P, model.K)) *
             std::log(static_cast<double>(model.K) * model.T);
}

namespace {

std::uint32_t draw_stream_index(int s, int k, int m) {
  if (s >= (1 << 12)) throw ConfigError("criterion sample count exceeds 4096");
  if (k >= 32 || m >= 128)
    throw ConfigError("sample_parameters supports K <= 32 and at most 127 stages");
  return (static_cast<std::uint32_t>(s) << 12) |
         (static_cast<std::uint32_t>(k) * 128 + static_cast<std::uint32_t>(m));
}

// Per-draw stage samples: PARCOR trajectories for every stage up to
// max_order per channel, and the innovation-variance trajectory of each
// channel's final stage for every candidate order. Each (draw, channel,
// stage) triple has its own rng substream, so the values do not depend on
// which candidate orders are being scored.
struct StageDraw {
  std::vector<Eigen::MatrixXd> alpha_f, alpha_b;  // per channel: M_k x T
  // variance[k][m-1]: trajectory drawn at stage m; only final stages of
  // some candidate order are populated.
  std::vector<std::vector<Eigen::VectorXd>> variance;
};

StageDraw draw_stages(const std::vector<std::vector<StageFit>>& stages, int K, int T,
                      int max_p, int s, std::uint64_t seed, std::uint32_t replicate) {
  StageDraw out;
  out.alpha_f.resize(K);
  out.alpha_b.resize(K);
  out.variance.resize(K);
  for (int k = 0; k < K; ++k) {
    const int M = K * max_p + k;
    out.alpha_f[k].resize(M, T);
    out.alpha_b[k].resize(M, T);
    out.variance[k].resize(M);
    for (int m = 1; m <= M; ++m) {
      rng::Engine eng(seed, rng::stream_id(replicate, rng::Domain::selection,
                                           draw_stream_index(s, k, m)));
      const StageFit& sf = stages[k][m - 1];
      for (int t = 0; t < T; ++t) {
        out.alpha_f[k](m - 1, t) =
            sf.alpha_f[t] +
            std::sqrt(std::max(sf.csmooth_f[t], 0.0)) * eng.student_t(sf.nu_f[t]);
        out.alpha_b[k](m - 1, t) =
            sf.alpha_b[t] +
            std::sqrt(std::max(sf.csmooth_b[t], 0.0)) * eng.student_t(sf.nu_b[t]);
      }
      // Final stage of candidate order P = (m - k) / K when divisible.
      const bool is_final = (m - k) % K == 0 && m >= K + k;
      if (is_final) {
        Eigen::VectorXd w(T);
        for (int t = 0; t < T; ++t) {
          const double nu = sf.nu_f[t];
          const double kappa = nu * sf.var_f[t];
          w[t] = 1.0 / eng.gamma(0.5 * nu, 0.5 * kappa);
        }
        out.variance[k][m - 1] = std::move(w);
      }
    }
  }
  return out;
}

PeriodicCoefficients assemble_draw(const StageDraw& draw, int K, int T, int P) {
  PeriodicCoefficients coeffs;
  coeffs.K = K;
  coeffs.T = T;
  coeffs.P = P;
  std::vector<Eigen::MatrixXd> af(K), ab(K);
  for (int k = 0; k < K; ++k) {
    const int M = K * P + k;
    af[k] = draw.alpha_f[k].topRows(M);
    ab[k] = draw.alpha_b[k].topRows(M);
  }
  coeffs.coeff = interlaced_parcor_to_ar(af, ab, K, T).forward;
  coeffs.variance.resize(K);
  for (int k = 0; k < K; ++k) coeffs.variance[k] = draw.variance[k][K * P + k - 1];
  return coeffs;
}

}  // namespace

std::vector<TvVarModel> sample_parameters(const std::vector<std::vector<StageFit>>& stages,
                                          int K, int T, int P, int S, std::uint64_t seed,
                                          std::uint32_t replicate) {
  std::vector<TvVarModel> draws;
  draws.reserve(S);
  for (int s = 0; s < S; ++s)
    draws.push_back(
        assemble_tvvar(assemble_draw(draw_stages(stages, K, T, P, s, seed, replicate), K, T, P)));
  return draws;
}

McCriteria mc_criteria_from_lls(const Eigen::MatrixXd& lls, double ll_hat) {
  const Eigen::Index S = lls.cols();
  if (S < 1) throw ConfigError("mc_criteria: need at least one MC sample");
  const double mean_deviance_ll = lls.colwise().sum().mean();
  McCriteria out;
  out.p_dic = 2.0 * (ll_hat - mean_deviance_ll);
  out.dic = -2.0 * ll_hat + 2.0 * out.p_dic;

  double p_waic = 0.0;
  const double log_s = std::log(static_cast<double>(S));
  for (Eigen::Index t = 0; t < lls.rows(); ++t) {
    const double m = lls.row(t).maxCoeff();
    const double lse = m + std::log((lls.row(t).array() - m).exp().sum()) - log_s;
    p_waic += 2.0 * (lse - lls.row(t).mean());
  }
  out.p_waic = p_waic;
  out.waic = -2.0 * ll_hat + 2.0 * p_waic;
  if (!std::isfinite(out.dic) || !std::isfinite(out.waic))
    throw DomainError("mc_criteria: criterion value is not finite (density underflow)");
  return out;
}

std::vector<McCriteria> mc_criteria_all(const std::vector<std::vector<StageFit>>& stages,
                                        const std::vector<TvVarModel>& plug_ins,
                                        const SeriesMatrix& x, int S, std::uint64_t seed,
                                        std::uint32_t replicate) {
  if (S < 1) throw ConfigError("mc_criteria: need at least one MC sample");
  if (plug_ins.empty()) throw ConfigError("mc_criteria: no candidate orders");
  const int K = plug_ins.front().K;
  const int T = plug_ins.front().T;
  const int n_orders = static_cast<int>(plug_ins.size());
  const int max_p = plug_ins.back().P;

  std::vector<Eigen::MatrixXd> lls;  // per order: (T - P) x S
  lls.reserve(n_orders);
  for (const TvVarModel& m : plug_ins) lls.emplace_back(T - m.P, S);

  for (int s = 0; s < S; ++s) {
    const StageDraw draw = draw_stages(stages, K, T, max_p, s, seed, replicate);
    for (int i = 0; i < n_orders; ++i) {
      const TvVarModel model =
          assemble_tvvar(assemble_draw(draw, K, T, plug_ins[i].P));
      lls[i].col(s) = per_obs_loglik(model, x);
    }
  }

  std::vector<McCriteria> out;
  out.reserve(n_orders);
  for (int i = 0; i < n_orders; ++i)
    out.push_back(mc_criteria_from_lls(lls[i], plug_in_loglik(plug_ins[i], x)));
  return out;
}

McCriteria mc_criteria(const std::vector<std::vector<StageFit>>& stages,
                       const TvVarModel& plug_in, const SeriesMatrix& x, int P, int S,
                       std::uint64_t seed, std::uint32_t replicate) {
  if (plug_in.P != P) throw DimensionError("mc_criteria: plug-in model order mismatch");
  return mc_criteria_all(stages, {plug_in}, x, S, seed, replicate).front();
}

}  // namespace bclf
