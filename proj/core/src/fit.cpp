#include "bclf/fit.hpp"

#include <string>

#include "bclf/errors.hpp"

namespace bclf {

BclfFit fit(const SeriesMatrix& x, const FitConfig& cfg) {
  const int K = x.channels();
  const int T = x.length();
  if (cfg.p_max < 1) throw ConfigError("fit: p_max must be at least 1");
  if (!x.values.allFinite()) throw DomainError("fit: series contains non-finite entries");
  if (T <= K * cfg.p_max + K)
    throw InsufficientDataError("fit: need T > K*P_max + K (" + std::to_string(T) +
                                " <= " + std::to_string(K * cfg.p_max + K) + ")");
  const bool need_mc = cfg.compute_all_criteria || cfg.criterion != Criterion::bic;

  BclfFit out;
  out.K = K;
  out.T = T;
  out.config = cfg;
  out.y = interlace(x);

  LatticeOptions opt;
  opt.priors = cfg.priors;
  opt.auto_kappa0 = cfg.auto_kappa0;
  opt.kappa0_window = cfg.kappa0_window;
  opt.grid = cfg.grid;
  opt.threads = cfg.threads;
  out.stages = run_lattice(out.y, cfg.p_max, opt);

  out.report.used = cfg.criterion;
  out.report.S = need_mc ? cfg.mc_samples : 0;
  std::vector<TvVarModel> candidates;  // retained only when the MC pass needs them
  if (need_mc) candidates.reserve(cfg.p_max);
  for (int P = 1; P <= cfg.p_max; ++P) {
    TvVarModel candidate = assemble_tvvar(build_coefficients(out.stages, K, T, P));
    OrderReport::Row row;
    row.P = P;
    row.n_theta = n_parameters(P, K);
    row.logl = plug_in_loglik(candidate, x);
    row.bic = -2.0 * row.logl +
              static_cast<double>(row.n_theta) * std::log(static_cast<double>(K) * T);
    row.dic = row.waic = row.p_dic = row.p_waic = std::numeric_limits<double>::quiet_NaN();
    out.report.rows.push_back(row);
    if (need_mc) candidates.push_back(std::move(candidate));
  }
  if (need_mc) {
    const std::vector<McCriteria> mc =
        mc_criteria_all(out.stages, candidates, x, cfg.mc_samples, cfg.seed, cfg.replicate);
    for (int i = 0; i < cfg.p_max; ++i) {
      out.report.rows[i].dic = mc[i].dic;
      out.report.rows[i].waic = mc[i].waic;
      out.report.rows[i].p_dic = mc[i].p_dic;
      out.report.rows[i].p_waic = mc[i].p_waic;
    }
  }
  candidates.clear();
  out.report.chosen = out.report.argmin(cfg.criterion);
  out.order = out.report.chosen;

  out.model = assemble_tvvar(build_coefficients(out.stages, K, T, out.order));
  std::vector<Eigen::MatrixXd> af(K), ab(K);
  for (int k = 0; k < K; ++k) {
    const int M = K * out.order + k;
    af[k].resize(M, T);
    ab[k].resize(M, T);
    for (int m = 0; m < M; ++m) {
      af[k].row(m) = out.stages[k][m].alpha_f;
      ab[k].row(m) = out.stages[k][m].alpha_b;
    }
  }
  InterlacedAr ar = interlaced_parcor_to_ar(af, ab, K, T);
  out.ar_forward = std::move(ar.forward);
  out.ar_backward = std::move(ar.backward);
  return out;
}

}  // namespace bclf
