#include "bclf/forecast.hpp"

#include <cmath>
#include <string>

#include "bclf/errors.hpp"
#include "bclf/rng.hpp"

namespace bclf {

PredictiveNormal predict_parcor(const FilterEndState& end, double gamma, int h) {
  if (h < 0) throw ConfigError("predict_parcor: negative horizon");
  const double G = end.C * (1.0 - gamma) / gamma;
  return {end.mu, end.C + h * G};
}

std::pair<PredictiveNormal, PredictiveNormal> predict_parcor(const StageFit& stage, int h) {
  return {predict_parcor(stage.end_f, stage.disc.gamma, h),
          predict_parcor(stage.end_b, stage.disc_b.gamma, h)};
}

namespace {

using detail::StageEndState;

// Draws J PARCOR paths from the h-step predictive normals, transforms each
// through Durbin-Levinson + LDL assembly to Phi draws, and propagates
//   x_{T+h'} = sum_p Phi_{p,T+h'} x_{T+h'-p},
// with recent.col(i) = x_{T-i} substituted when h'-p <= 0.
ForecastResult forecast_from_states(const std::vector<std::vector<StageEndState>>& ends, int K,
                                    int P, const Eigen::MatrixXd& recent, int h, int J,
                                    std::uint64_t seed, std::uint32_t replicate,
                                    std::uint32_t stream_offset) {
  if (h < 1) throw ConfigError("forecast: horizon must be at least 1");
  if (J < 1) throw ConfigError("forecast: need at least one sample path");
  if (recent.cols() < P) throw DimensionError("forecast: fewer than P recent observations");

  ForecastResult out;
  out.horizon = h;
  out.mean.setZero(K, h);
  out.samples.reserve(J);

  PeriodicCoefficients draw;
  draw.K = K;
  draw.T = 1;
  draw.P = P;
  draw.coeff.resize(K);
  draw.variance.resize(K);
  for (int k = 0; k < K; ++k) {
    draw.coeff[k].resize(K * P + k, 1);
    draw.variance[k] = Eigen::VectorXd::Ones(1);
  }

  std::vector<Eigen::MatrixXd> af(K), ab(K);
  for (int k = 0; k < K; ++k) {
    af[k].resize(K * P + k, 1);
    ab[k].resize(K * P + k, 1);
  }
  for (int j = 0; j < J; ++j) {
    rng::Engine eng(seed, rng::stream_id(replicate, rng::Domain::forecast,
                                         stream_offset + static_cast<std::uint32_t>(j)));
    Eigen::MatrixXd path(K, h);
    for (int step = 1; step <= h; ++step) {
      for (int k = 0; k < K; ++k) {
        const int M = K * P + k;
        for (int m = 0; m < M; ++m) {
          const StageEndState& se = ends[k][m];
          const PredictiveNormal pf = predict_parcor(se.f, se.gamma_f, step);
          const PredictiveNormal pb = predict_parcor(se.b, se.gamma_b, step);
          af[k](m, 0) = pf.mu + std::sqrt(std::max(pf.var, 0.0)) * eng.normal();
          ab[k](m, 0) = pb.mu + std::sqrt(std::max(pb.var, 0.0)) * eng.normal();
          if (std::abs(af[k](m, 0)) >= 1.0) ++out.parcor_outside_unit;
          if (std::abs(ab[k](m, 0)) >= 1.0) ++out.parcor_outside_unit;
        }
      }
      draw.coeff = interlaced_parcor_to_ar(af, ab, K, 1, DlBoundary::ring).forward;
      const TvVarModel one = assemble_tvvar(draw);
      Eigen::VectorXd xhat = Eigen::VectorXd::Zero(K);
      for (int p = 1; p <= P; ++p) {
        if (step - p >= 1)
          xhat.noalias() += one.phi[0][p - 1] * path.col(step - p - 1);
        else
          xhat.noalias() += one.phi[0][p - 1] * recent.col(p - step);
      }
      path.col(step - 1) = xhat;
    }
    out.mean += path;
    out.samples.push_back(std::move(path));
  }
  out.mean /= static_cast<double>(J);
  return out;
}

std::vector<std::vector<StageEndState>> collect_ends(const BclfFit& fit) {
  const int K = fit.K;
  const int P = fit.order;
  std::vector<std::vector<StageEndState>> ends(K);
  for (int k = 0; k < K; ++k) {
    const int M = K * P + k;
    ends[k].resize(M);
    for (int m = 0; m < M; ++m) {
      const StageFit& sf = fit.stages[k][m];
      ends[k][m] = {sf.end_f,        sf.end_b,        sf.disc.gamma,
                    sf.disc.delta,   sf.disc_b.gamma, sf.disc_b.delta};
    }
  }
  return ends;
}

Eigen::MatrixXd recent_columns(const Eigen::VectorXd& y, int K, int T, int P) {
  Eigen::MatrixXd recent(K, P);
  for (int i = 0; i < P; ++i)
    for (int k = 0; k < K; ++k)
      recent(k, i) = y[static_cast<Eigen::Index>(T - 1 - i) * K + k];
  return recent;
}

// One conjugate filter step from an end state, always active.
void filter_step(FilterEndState& st, double gamma, double delta, double response,
                 double regressor, long t_label) {
  const double R = st.C / gamma;
  const double q = regressor * regressor * R + st.s;
  if (!(q > 0.0) || !std::isfinite(q))
    throw FilterDivergenceError("filter extension diverged (q) at t=" +
                                    std::to_string(t_label),
                                t_label);
  const double e = response - regressor * st.mu;
  const double z = R * regressor / q;
  const double nu_new = delta * st.nu + 1.0;
  const double kappa_new = delta * st.kappa + st.s * e * e / q;
  const double s_new = kappa_new / nu_new;
  const double C_new = (R - z * z * q) * (s_new / st.s);
  if (!(C_new > 0.0) || !std::isfinite(C_new))
    throw FilterDivergenceError("filter extension diverged (C) at t=" +
                                    std::to_string(t_label),
                                t_label);
  st.mu += z * e;
  st.C = C_new;
  st.nu = nu_new;
  st.kappa = kappa_new;
  st.s = s_new;
}

}  // namespace

ForecastResult forecast(const BclfFit& fit, int h, int J, std::uint64_t seed,
                        std::uint32_t replicate, std::uint32_t stream_offset) {
  return forecast_from_states(collect_ends(fit), fit.K, fit.order,
                              recent_columns(fit.y.y, fit.K, fit.T, fit.order), h, J, seed,
                              replicate, stream_offset);
}

RollingForecaster::RollingForecaster(const BclfFit& fit)
    : K_(fit.K), P_(fit.order), ends_(collect_ends(fit)), T_(fit.T) {
  const int max_stage = K_ * P_ + K_ - 1;
  y_.assign(fit.y.y.data(), fit.y.y.data() + fit.y.y.size());
  f_err_.resize(max_stage + 1);
  b_err_.resize(max_stage + 1);
  f_err_[0] = y_;
  b_err_[0] = y_;
  for (int m = 1; m <= max_stage; ++m) {
    f_err_[m].assign(y_.size(), 0.0);
    b_err_[m].assign(y_.size(), 0.0);
    for (int k = 0; k < K_; ++k) {
      if (m > K_ * P_ + k) continue;
      const StageFit& sf = fit.stages[k][m - 1];
      for (int t = 0; t < T_; ++t) {
        const std::size_t n0 = static_cast<std::size_t>(t) * K_ + k;
        f_err_[m][n0] = sf.f_err[t];
        b_err_[m][n0] = sf.b_err[t];
      }
    }
  }
}

void RollingForecaster::observe(const Eigen::Ref<const Eigen::VectorXd>& x_new) {
  if (x_new.size() != K_) throw DimensionError("observe: wrong channel count");
  const int max_stage = K_ * P_ + K_ - 1;
  for (int k = 0; k < K_; ++k) y_.push_back(x_new[k]);
  for (int m = 0; m <= max_stage; ++m) {
    f_err_[m].resize(y_.size(), 0.0);
    b_err_[m].resize(y_.size(), 0.0);
  }
  for (int k = 0; k < K_; ++k) {
    const std::size_t n0 = static_cast<std::size_t>(T_) * K_ + k;
    f_err_[0][n0] = x_new[k];
    b_err_[0][n0] = x_new[k];
  }
  for (int m = 1; m <= max_stage; ++m) {
    for (int k = 0; k < K_; ++k) {
      if (m > K_ * P_ + k) continue;
      const std::size_t n0 = static_cast<std::size_t>(T_) * K_ + k;
      const double resp = f_err_[m - 1][n0];
      const double reg = b_err_[m - 1][n0 - 1];
      StageEndState& se = ends_[k][m - 1];
      filter_step(se.f, se.gamma_f, se.delta_f, resp, reg, T_ + 1);
      filter_step(se.b, se.gamma_b, se.delta_b, reg, resp, T_ + 1);
      f_err_[m][n0] = resp - se.f.mu * reg;
      b_err_[m][n0] = reg - se.b.mu * resp;
    }
  }
  ++T_;
}

ForecastResult RollingForecaster::forecast(int h, int J, std::uint64_t seed,
                                           std::uint32_t replicate,
                                           std::uint32_t stream_offset) const {
  Eigen::MatrixXd recent(K_, P_);
  for (int i = 0; i < P_; ++i)
    for (int k = 0; k < K_; ++k)
      recent(k, i) = y_[static_cast<std::size_t>(T_ - 1 - i) * K_ + k];
  return forecast_from_states(ends_, K_, P_, recent, h, J, seed, replicate, stream_offset);
}

RollingReport rolling_forecasts(const SeriesMatrix& x, int holdout, const FitConfig& cfg,
                                RollingMode mode, int J) {
  const int K = x.channels();
  const int T = x.length();
  if (holdout < 1 || holdout >= T)
    throw ConfigError("rolling_forecasts: holdout must lie in [1, T)");
  const int T0 = T - holdout;

  RollingReport report;
  report.forecasts.resize(K, holdout);
  report.truth = x.values.rightCols(holdout);

  if (mode == RollingMode::filter_extend) {
    SeriesMatrix prefix{x.values.leftCols(T0)};
    RollingForecaster roller(fit(prefix, cfg));
    for (int i = 0; i < holdout; ++i) {
      const ForecastResult fc =
          roller.forecast(1, J, cfg.seed, cfg.replicate,
                          static_cast<std::uint32_t>(i) * static_cast<std::uint32_t>(J));
      report.forecasts.col(i) = fc.mean.col(0);
      roller.observe(x.values.col(T0 + i));
    }
  } else {
    for (int i = 0; i < holdout; ++i) {
      SeriesMatrix prefix{x.values.leftCols(T0 + i)};
      const BclfFit f = fit(prefix, cfg);
      const ForecastResult fc =
          forecast(f, 1, J, cfg.seed, cfg.replicate,
                   static_cast<std::uint32_t>(i) * static_cast<std::uint32_t>(J));
      report.forecasts.col(i) = fc.mean.col(0);
    }
  }
  report.mspe = (report.forecasts - report.truth).squaredNorm() /
                (static_cast<double>(K) * holdout);
  return report;
}

double rolling_mspe(const SeriesMatrix& x, int holdout, const FitConfig& cfg, RollingMode mode,
                    int J) {
  return rolling_forecasts(x, holdout, cfg, mode, J).mspe;
}

}  // namespace bclf
