#ifndef BCLF_SELECTION_HPP
#define BCLF_SELECTION_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "bclf/lattice.hpp"
#include "bclf/periodic.hpp"
#include "bclf/series.hpp"

namespace bclf {

enum class Criterion { bic, dic, waic };

Criterion criterion_from_string(const std::string& name);
std::string to_string(Criterion c);

/// Per-order criterion values from a fitted lattice.
struct OrderReport {
  struct Row {
    int P = 0;
    long n_theta = 0;
    double logl = 0.0;
    double bic = 0.0;
    double dic = 0.0;
    double waic = 0.0;
    double p_dic = 0.0;
    double p_waic = 0.0;
  };
  std::vector<Row> rows;
  int chosen = 0;  // selected order
  Criterion used = Criterion::bic;
  int S = 0;  // MC sample count behind dic/waic (0 when not computed)

  /// argmin of the given criterion over rows; ties go to the smaller order.
  int argmin(Criterion c) const;
};

/// Number of estimated trajectories: 2PK^2 + (K-1)K (all forward and
/// backward PARCOR coefficients across stages).
long n_parameters(int P, int K);

/// Plug-in conditional Gaussian log likelihood of x under the model,
/// conditioning on the first P observations.
double plug_in_loglik(const TvVarModel& model, const SeriesMatrix& x);

/// Per-observation log densities log p(x_t | x_{t-1..t-P}, theta) for
/// t = P+1..T (1-based); length T-P.
Eigen::VectorXd per_obs_loglik(const TvVarModel& model, const SeriesMatrix& x);

/// BIC(P) = -2 L + n_theta log(K T).
double bic(const TvVarModel& model, const SeriesMatrix& x);

/// Posterior parameter draws at candidate order P: PARCOR trajectories from
/// Student-t marginals T_{nu_tT}(mu_tT, C_tT), innovation precisions from
/// Gamma(nu_tT/2, kappa_tT/2), pushed through the Durbin-Levinson and LDL
/// transforms. Draw s of stage (k, m) uses rng stream
/// (replicate, selection, s<<12 | k*128+m), so draws are identical whether
/// a stage is sampled for one candidate order or many. Limits: S <= 4096,
/// K <= 32, stages per channel <= 127.
std::vector<TvVarModel> sample_parameters(const std::vector<std::vector<StageFit>>& stages,
                                          int K, int T, int P, int S, std::uint64_t seed,
                                          std::uint32_t replicate);

struct McCriteria {
  double dic = 0.0;
  double waic = 0.0;
  double p_dic = 0.0;
  double p_waic = 0.0;
};

/// DIC and WAIC from per-observation log densities: lls(t, s) is
/// log p(y_t | theta^(s)) and ll_hat the plug-in log likelihood. WAIC's
/// per-observation terms use a log-sum-exp accumulation.
McCriteria mc_criteria_from_lls(const Eigen::MatrixXd& lls, double ll_hat);

/// DIC and WAIC at candidate order P via S Monte Carlo draws, with the
/// plug-in model as the Bayes estimator.
McCriteria mc_criteria(const std::vector<std::vector<StageFit>>& stages,
                       const TvVarModel& plug_in, const SeriesMatrix& x, int P, int S,
                       std::uint64_t seed, std::uint32_t replicate);

/// Batched variant: one draw pass scores every candidate order (the stage
/// posteriors are shared across orders). plug_ins[i] is the assembled
/// model at order i+1. Returns one McCriteria per candidate.
std::vector<McCriteria> mc_criteria_all(const std::vector<std::vector<StageFit>>& stages,
                                        const std::vector<TvVarModel>& plug_ins,
                                        const SeriesMatrix& x, int S, std::uint64_t seed,
                                        std::uint32_t replicate);

}  // namespace bclf

#endif  // BCLF_SELECTION_HPP
