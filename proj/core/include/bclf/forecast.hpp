#ifndef BCLF_FORECAST_HPP
#define BCLF_FORECAST_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "bclf/fit.hpp"

namespace bclf {

/// h-step predictive normal for one PARCOR coefficient:
/// mean mu_T, variance C_T + h G with G = C_T (1-gamma)/gamma.
struct PredictiveNormal {
  double mu = 0.0;
  double var = 0.0;
};

PredictiveNormal predict_parcor(const FilterEndState& end, double gamma, int h);

/// Forward and backward predictives for one fitted stage.
std::pair<PredictiveNormal, PredictiveNormal> predict_parcor(const StageFit& stage, int h);

struct ForecastResult {
  int horizon = 0;
  Eigen::MatrixXd mean;                  // K x h, average over draws
  std::vector<Eigen::MatrixXd> samples;  // J draws, each K x h
  long parcor_outside_unit = 0;  // diagnostic count of draws outside (-1, 1)
  std::optional<double> mspe;
};

/// Samples J joint PARCOR paths from their h-step predictives, transforms
/// each to TV-VAR coefficients, and propagates point forecasts with
/// observed values substituted for non-positive horizons. No innovation
/// noise is added, so spread reflects parameter uncertainty only.
ForecastResult forecast(const BclfFit& fit, int h, int J, std::uint64_t seed,
                        std::uint32_t replicate = 0, std::uint32_t stream_offset = 0);

enum class RollingMode { filter_extend, refit };

namespace detail {
/// Per-stage filter end states and discounts, the sufficient statistics
/// for predictive PARCOR sampling and filter extension.
struct StageEndState {
  FilterEndState f, b;
  double gamma_f = 1.0, delta_f = 1.0;
  double gamma_b = 1.0, delta_b = 1.0;
};
}  // namespace detail

/// Sequential one-step extension of a fitted lattice: each new observation
/// advances every stage's forward/backward DLM one step and propagates the
/// stage errors with the updated filtered means.
class RollingForecaster {
 public:
  explicit RollingForecaster(const BclfFit& fit);
  void observe(const Eigen::Ref<const Eigen::VectorXd>& x_new);
  ForecastResult forecast(int h, int J, std::uint64_t seed, std::uint32_t replicate = 0,
                          std::uint32_t stream_offset = 0) const;

 private:
  int K_ = 0;
  int P_ = 0;
  std::vector<std::vector<detail::StageEndState>> ends_;  // [k][m-1], m <= K*P+k
  std::vector<std::vector<double>> f_err_, b_err_;  // [m] interlaced, m = 0..max
  std::vector<double> y_;                           // interlaced history
  int T_ = 0;
};

struct RollingReport {
  double mspe = 0.0;
  Eigen::MatrixXd forecasts;  // K x holdout
  Eigen::MatrixXd truth;      // K x holdout
};

/// Rolling one-step forecasts over the last `holdout` observations: fit on
/// the prefix, then per origin either extend the filters with the new
/// observation (default) or refit from scratch.
RollingReport rolling_forecasts(const SeriesMatrix& x, int holdout, const FitConfig& cfg,
                                RollingMode mode = RollingMode::filter_extend, int J = 1000);

/// Mean squared prediction error of rolling_forecasts, averaged over
/// channels and held-out times.
double rolling_mspe(const SeriesMatrix& x, int holdout, const FitConfig& cfg,
                    RollingMode mode = RollingMode::filter_extend, int J = 1000);

}  // namespace bclf

#endif  // BCLF_FORECAST_HPP
