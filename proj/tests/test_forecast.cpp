#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "bclf/errors.hpp"
#include "bclf/forecast.hpp"
#include "bclf/rng.hpp"

using namespace bclf;
using Catch::Approx;

namespace {

// Hand-assembled bivariate VAR(1) fit with degenerate (point-mass) PARCOR
// posteriors, so every forecast draw is deterministic.
BclfFit point_mass_fit(double alpha1_f_ch0, double alpha2_f_ch1, double alpha1_f_ch1,
                       const Eigen::MatrixXd& history) {
  BclfFit f;
  f.K = 2;
  f.T = static_cast<int>(history.cols());
  f.order = 1;
  f.config.p_max = 1;
  SeriesMatrix x;
  x.values = history;
  f.y = interlace(x);
  f.stages.resize(2);
  auto make_stage = [](int k, int m, int T, double mu_f, double mu_b) {
    StageFit sf;
    sf.channel = k;
    sf.stage = m;
    sf.alpha_f = Eigen::VectorXd::Constant(T, mu_f);
    sf.alpha_b = Eigen::VectorXd::Constant(T, mu_b);
    sf.var_f = Eigen::VectorXd::Ones(T);
    sf.var_b = Eigen::VectorXd::Ones(T);
    sf.csmooth_f = Eigen::VectorXd::Zero(T);
    sf.csmooth_b = Eigen::VectorXd::Zero(T);
    sf.nu_f = Eigen::VectorXd::Constant(T, 50.0);
    sf.nu_b = Eigen::VectorXd::Constant(T, 50.0);
    sf.f_err = Eigen::VectorXd::Zero(T);
    sf.b_err = Eigen::VectorXd::Zero(T);
    sf.disc = {1.0, 1.0};
    sf.disc_b = {1.0, 1.0};
    sf.end_f = {mu_f, 0.0, 50.0, 50.0, 1.0};
    sf.end_b = {mu_b, 0.0, 50.0, 50.0, 1.0};
    return sf;
  };
  // Channel 0: stages m = 1..2; channel 1: stages m = 1..3. Backward
  // point masses sit at zero so the order recursion introduces no cross
  // terms and the transform stays hand-checkable.
  f.stages[0].push_back(make_stage(0, 1, f.T, 0.0, 0.0));
  f.stages[0].push_back(make_stage(0, 2, f.T, alpha1_f_ch0, 0.0));
  f.stages[1].push_back(make_stage(1, 1, f.T, alpha1_f_ch1, 0.0));
  f.stages[1].push_back(make_stage(1, 2, f.T, 0.0, 0.0));
  f.stages[1].push_back(make_stage(1, 3, f.T, alpha2_f_ch1, 0.0));
  return f;
}

}  // namespace

TEST_CASE("parcor predictive formula") {
  FilterEndState end{0.4, 0.09, 12.0, 10.0, 0.8};

  SECTION("static gamma keeps the posterior for every horizon") {
    for (int h : {0, 1, 5, 50}) {
      const PredictiveNormal p = predict_parcor(end, 1.0, h);
      CHECK(p.mu == 0.4);
      CHECK(p.var == 0.09);
    }
  }
  SECTION("horizon zero returns the time-T posterior") {
    const PredictiveNormal p = predict_parcor(end, 0.9, 0);
    CHECK(p.mu == 0.4);
    CHECK(p.var == 0.09);
  }
  SECTION("variance grows linearly in the horizon") {
    const PredictiveNormal p1 = predict_parcor(end, 0.95, 3);
    const PredictiveNormal p2 = predict_parcor(end, 0.95, 6);
    CHECK(p2.var - end.C == Approx(2.0 * (p1.var - end.C)).margin(1e-15));
  }
}

TEST_CASE("zero coefficients forecast zero") {
  Eigen::MatrixXd history(2, 10);
  rng::Engine eng(3, rng::stream_id(0, rng::Domain::test, 50));
  for (int i = 0; i < 20; ++i) history(i % 2, i / 2) = eng.normal();
  const BclfFit f = point_mass_fit(0.0, 0.0, 0.0, history);
  const ForecastResult fc = forecast(f, 4, 8, 99);
  for (int h = 0; h < 4; ++h)
    for (int k = 0; k < 2; ++k) REQUIRE(fc.mean(k, h) == 0.0);
  CHECK(fc.parcor_outside_unit == 0);
}

TEST_CASE("degenerate posterior propagates the plug-in deterministically") {
  Eigen::MatrixXd history(2, 6);
  history << 1.0, -0.5, 0.25, 2.0, -1.0, 0.5, 0.5, 0.25, -0.125, 1.0, 0.5, -0.25;
  const double a_ch0 = 0.6, a2_ch1 = 0.4, a1_ch1 = 0.2;
  const BclfFit f = point_mass_fit(a_ch0, a2_ch1, a1_ch1, history);

  // J = 1, zero posterior scale: the single draw equals the point forecast
  // Phi_hat * x_T computed by hand through the interlaced transform.
  const ForecastResult fc = forecast(f, 1, 1, 7);
  REQUIRE(fc.samples.size() == 1);
  REQUIRE(fc.mean == fc.samples[0]);

  // Hand transform: channel 0 carries lag coefficient a_ch0 (stage 2 =
  // lag K with K = 2); channel 1 has contemporaneous a1_ch1 (stage 1) and
  // lag coefficient a2_ch1 (stage 3 = K + 1).
  //   L^{-1} = [1 0; -a1_ch1 1],  A_1 = [0 a_ch0; a2_ch1 0]
  // row ordering: A_1(k, j) = a_{K + k - j}: channel 0 row reads stage-2
  // coefficient at j = 0... verified against assemble_tvvar in periodic
  // tests; here we check the propagated numbers.
  Eigen::MatrixXd linv(2, 2), a1(2, 2);
  linv << 1.0, 0.0, -a1_ch1, 1.0;
  // Channel 0 (row 0): lags m = K + 0 - j for j = 0, 1 -> m = 2 at j = 0
  // (coefficient a_ch0) and m = 1 at j = 1 (stage 1 = 0).
  // Channel 1 (row 1): m = K + 1 - j -> m = 3 at j = 0 (a2_ch1), m = 2 at
  // j = 1 (stage 2 = 0).
  a1 << a_ch0, 0.0, a2_ch1, 0.0;
  const Eigen::MatrixXd phi = linv.inverse() * a1;
  const Eigen::VectorXd expected = phi * history.col(5);
  REQUIRE(fc.mean.col(0).isApprox(expected, 1e-12));
}

TEST_CASE("one-step forecasts use only observed data") {
  // With order 2 and h = 1, both regressors are observed columns; changing
  // hypothetical future draws cannot matter. Verified by the substitution
  // rule: a 1-step forecast from history equals Phi_1 x_T + Phi_2 x_{T-1}.
  Eigen::MatrixXd history(1, 8);
  history << 0.2, -0.3, 0.5, 0.1, -0.2, 0.4, 0.3, -0.1;
  BclfFit f;
  f.K = 1;
  f.T = 8;
  f.order = 2;
  SeriesMatrix x;
  x.values = history;
  f.y = interlace(x);
  f.stages.resize(1);
  for (int m = 1; m <= 2; ++m) {
    StageFit sf;
    sf.channel = 0;
    sf.stage = m;
    const double mu = m == 1 ? 0.5 : -0.3;
    sf.alpha_f = Eigen::VectorXd::Constant(8, mu);
    sf.alpha_b = Eigen::VectorXd::Constant(8, mu);
    sf.var_f = sf.var_b = Eigen::VectorXd::Ones(8);
    sf.csmooth_f = sf.csmooth_b = Eigen::VectorXd::Zero(8);
    sf.nu_f = sf.nu_b = Eigen::VectorXd::Constant(8, 30.0);
    sf.f_err = sf.b_err = Eigen::VectorXd::Zero(8);
    sf.disc = sf.disc_b = {1.0, 1.0};
    sf.end_f = {mu, 0.0, 30.0, 30.0, 1.0};
    sf.end_b = {mu, 0.0, 30.0, 30.0, 1.0};
    f.stages[0].push_back(sf);
  }
  const ForecastResult fc = forecast(f, 1, 3, 123);
  // Durbin-Levinson with PARCOR (0.5, -0.3): a1 = 0.5 - (-0.3)(0.5) = 0.65,
  // a2 = -0.3.
  const double expected = 0.65 * history(0, 7) - 0.3 * history(0, 6);
  for (const auto& s : fc.samples) REQUIRE(s(0, 0) == Approx(expected).margin(1e-12));
}

TEST_CASE("forecast mean is the sample average and seeds agree within MC error") {
  Eigen::MatrixXd history(2, 12);
  rng::Engine eng(17, rng::stream_id(0, rng::Domain::test, 51));
  for (int i = 0; i < 24; ++i) history(i % 2, i / 2) = eng.normal();
  BclfFit f = point_mass_fit(0.5, 0.3, 0.2, history);
  // Give the posteriors spread so draws differ.
  for (auto& channel : f.stages)
    for (auto& sf : channel) {
      sf.end_f.C = 0.01;
      sf.end_b.C = 0.01;
    }
  const int J = 5000;
  const ForecastResult a = forecast(f, 2, J, 1);
  const ForecastResult b = forecast(f, 2, J, 2);

  Eigen::MatrixXd mean_check = Eigen::MatrixXd::Zero(2, 2);
  for (const auto& s : a.samples) mean_check += s;
  mean_check /= static_cast<double>(J);
  REQUIRE((mean_check - a.mean).cwiseAbs().maxCoeff() < 1e-12);

  for (int h = 0; h < 2; ++h)
    for (int k = 0; k < 2; ++k) {
      double va = 0.0, vb = 0.0;
      for (int j = 0; j < J; ++j) {
        va += std::pow(a.samples[j](k, h) - a.mean(k, h), 2);
        vb += std::pow(b.samples[j](k, h) - b.mean(k, h), 2);
      }
      va /= J - 1;
      vb /= J - 1;
      const double pooled_se = std::sqrt(va / J + vb / J);
      REQUIRE(std::abs(a.mean(k, h) - b.mean(k, h)) < 3.0 * pooled_se + 1e-12);
    }
}

TEST_CASE("parcor draws outside the unit interval are counted") {
  Eigen::MatrixXd history(2, 6);
  history.setConstant(0.1);
  const BclfFit f = point_mass_fit(1.5, 0.0, 0.0, history);  // |alpha| >= 1 by construction
  const ForecastResult fc = forecast(f, 1, 10, 5);
  CHECK(fc.parcor_outside_unit >= 10);  // the offending stage, once per draw
}

TEST_CASE("rolling mspe on near-noiseless autoregression is tiny") {
  // Deterministic AR(1) recursion with negligible innovation: the fitted
  // coefficient carries only the prior-regularization bias O(1/T), so the
  // rolling one-step MSPE sits at the 1e-6 scale rather than exactly zero.
  const int T = 3000;
  rng::Engine eng(21, rng::stream_id(0, rng::Domain::test, 52));
  SeriesMatrix x;
  x.values.resize(1, T);
  double prev = 1.0;
  for (int t = 0; t < T; ++t) {
    prev = 0.8 * prev + 1e-8 * eng.normal();
    x.values(0, t) = prev;
  }
  FitConfig cfg;
  cfg.p_max = 1;
  cfg.grid = {{1.0, 1.0}};
  const double mspe = rolling_mspe(x, 3, cfg, RollingMode::filter_extend, 1);
  CHECK(mspe < 1e-5);
}

TEST_CASE("white noise with zero coefficients forecasts at the innovation variance") {
  const int T = 2000;
  rng::Engine eng(33, rng::stream_id(0, rng::Domain::test, 53));
  SeriesMatrix x;
  x.values.resize(1, T);
  for (int t = 0; t < T; ++t) x.values(0, t) = eng.normal();
  FitConfig cfg;
  cfg.p_max = 1;
  cfg.grid = {{0.99, 0.99}};
  const double mspe = rolling_mspe(x, 20, cfg, RollingMode::filter_extend, 200);
  CHECK(mspe > 0.8);
  CHECK(mspe < 1.2);
}

TEST_CASE("rolling report matches a hand-computed error average") {
  const int T = 400;
  rng::Engine eng(44, rng::stream_id(0, rng::Domain::test, 54));
  SeriesMatrix x;
  x.values.resize(2, T);
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd phi(2, 2);
  phi << 0.6, 0.1, 0.0, 0.4;
  for (int t = 0; t < T; ++t) {
    Eigen::VectorXd z(2);
    z << eng.normal(), eng.normal();
    prev = phi * prev + z;
    x.values.col(t) = prev;
  }
  FitConfig cfg;
  cfg.p_max = 1;
  cfg.grid = {{1.0, 1.0}};
  const RollingReport report = rolling_forecasts(x, 3, cfg, RollingMode::filter_extend, 50);
  double hand = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 2; ++k) hand += std::pow(report.forecasts(k, i) - report.truth(k, i), 2);
  hand /= 6.0;
  REQUIRE(report.mspe == Approx(hand).margin(1e-12));
  REQUIRE(report.truth == x.values.rightCols(3));
}

TEST_CASE("refit and filter-extend agree loosely on stationary data") {
  const int T = 300;
  rng::Engine eng(55, rng::stream_id(0, rng::Domain::test, 55));
  SeriesMatrix x;
  x.values.resize(1, T);
  double prev = 0.0;
  for (int t = 0; t < T; ++t) {
    prev = 0.5 * prev + eng.normal();
    x.values(0, t) = prev;
  }
  FitConfig cfg;
  cfg.p_max = 1;
  cfg.grid = {{1.0, 1.0}};
  const double a = rolling_mspe(x, 5, cfg, RollingMode::filter_extend, 100);
  const double b = rolling_mspe(x, 5, cfg, RollingMode::refit, 100);
  CHECK(std::abs(a - b) / b < 0.2);
}

TEST_CASE("forecast input validation") {
  Eigen::MatrixXd history(2, 6);
  history.setConstant(0.1);
  const BclfFit f = point_mass_fit(0.2, 0.1, 0.0, history);
  REQUIRE_THROWS_AS(forecast(f, 0, 10, 1), ConfigError);
  REQUIRE_THROWS_AS(forecast(f, 1, 0, 1), ConfigError);
  SeriesMatrix x;
  x.values = history;
  FitConfig cfg;
  REQUIRE_THROWS_AS(rolling_mspe(x, 6, cfg), ConfigError);
}
