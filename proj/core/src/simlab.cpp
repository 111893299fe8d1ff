#include "bclf/simlab.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "bclf/errors.hpp"
#include "bclf/parallel.hpp"
#include "bclf/rng.hpp"

namespace bclf {

Generator generator_from_string(const std::string& name) {
  if (name == "sim1-case1") return Generator::sim1_case1;
  if (name == "sim1-case2") return Generator::sim1_case2;
  if (name == "sim1-case3") return Generator::sim1_case3;
  if (name == "sim1-case4") return Generator::sim1_case4;
  if (name == "sim1-case5") return Generator::sim1_case5;
  if (name == "sim1-case6") return Generator::sim1_case6;
  if (name == "sim2") return Generator::sim2;
  if (name == "wind6") return Generator::wind6;
  throw ConfigError("unknown generator '" + name + "'");
}

std::string to_string(Generator g) {
  switch (g) {
    case Generator::sim1_case1: return "sim1-case1";
    case Generator::sim1_case2: return "sim1-case2";
    case Generator::sim1_case3: return "sim1-case3";
    case Generator::sim1_case4: return "sim1-case4";
    case Generator::sim1_case5: return "sim1-case5";
    case Generator::sim1_case6: return "sim1-case6";
    case Generator::sim2: return "sim2";
    case Generator::wind6: return "wind6";
  }
  return "?";
}

int default_length(Generator g) {
  switch (g) {
    case Generator::sim2: return 300;
    case Generator::wind6: return 9000;
    default: return 1034;
  }
}

namespace {

int sim1_case_index(Generator g) {
  switch (g) {
    case Generator::sim1_case1: return 1;
    case Generator::sim1_case2: return 2;
    case Generator::sim1_case3: return 3;
    case Generator::sim1_case4: return 4;
    case Generator::sim1_case5: return 5;
    case Generator::sim1_case6: return 6;
    default: return 0;
  }
}

// Phi/Sigma paths for the bivariate TV-VAR(2) cases; t is 1-based.
void sim1_parameters(int case_index, double sigma_scale, int T,
                     std::vector<std::vector<Eigen::MatrixXd>>& phi,
                     std::vector<Eigen::MatrixXd>& sigma) {
  phi.resize(T);
  sigma.resize(T);
  for (int t1 = 1; t1 <= T; ++t1) {
    const double u = static_cast<double>(t1) / T;
    const double r1 = 0.1 * u + 0.85;
    const double r2 = -0.1 * u + 0.95;
    const double r3 = 0.2 * u - 0.9;
    const double r4 = 0.2 * u + 0.7;
    const double lambda1 = 15.0 * u + 5.0;
    const double lambda2 = -10.0 * u + 15.0;

    double off1 = 0.0, off2 = 0.0;
    switch ((case_index - 1) % 3) {
      case 0: break;
      case 1: off1 = -0.8; break;
      case 2:
        off1 = r3;
        off2 = r4;
        break;
    }

    Eigen::MatrixXd phi1(2, 2), phi2(2, 2);
    phi1 << r1 * std::cos(2.0 * std::numbers::pi / lambda1), off1, 0.0,
        r2 * std::cos(2.0 * std::numbers::pi / lambda2);
    phi2 << -r1 * r1, off2, 0.0, -r2 * r2;

    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2, 2);
    if (case_index >= 4) s *= (1.0 + u);
    s *= sigma_scale;

    phi[t1 - 1] = {phi1, phi2};
    sigma[t1 - 1] = s;
  }
}

void sim2_parameters(int T, std::vector<std::vector<Eigen::MatrixXd>>& phi,
                     std::vector<Eigen::MatrixXd>& sigma) {
  const int K = 20;
  phi.resize(T);
  sigma.resize(T);
  for (int t1 = 1; t1 <= T; ++t1) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(K, K);
    const double diag = 0.7 + 0.2 / 299.0 * t1;
    for (int i = 0; i < K; ++i) p(i, i) = diag;
    p(0, 4) = 0.9;
    p(1, 14) = 0.9;
    p(5, 11) = -0.9;
    p(14, 19) = -0.9;
    phi[t1 - 1] = {p};
    sigma[t1 - 1] = 0.1 * Eigen::MatrixXd::Identity(K, K);
  }
}

// Six channels with a shared 6-sample (24 h at 4-hour sampling) cycle of
// slowly drifting amplitude, one-way coupling between channel pairs, and a
// rising innovation scale. Shaped like the three-station wind analysis.
void wind6_parameters(int T, std::vector<std::vector<Eigen::MatrixXd>>& phi,
                      std::vector<Eigen::MatrixXd>& sigma) {
  const int K = 6;
  const double level[6] = {1.0, 1.2, 0.9, 1.1, 0.8, 1.0};
  phi.resize(T);
  sigma.resize(T);
  for (int t1 = 1; t1 <= T; ++t1) {
    const double u = static_cast<double>(t1) / T;
    Eigen::MatrixXd p1 = Eigen::MatrixXd::Zero(K, K);
    Eigen::MatrixXd p2 = Eigen::MatrixXd::Zero(K, K);
    for (int k = 0; k < K; ++k) {
      const double r =
          0.75 + 0.15 * std::sin(2.0 * std::numbers::pi * u + 0.5 * k);
      p1(k, k) = r * std::cos(2.0 * std::numbers::pi / 6.0);
      p2(k, k) = -r * r;
    }
    p1(0, 2) = 0.3;
    p1(2, 4) = -0.3;
    p1(1, 3) = 0.25;
    p1(3, 5) = 0.25;
    Eigen::VectorXd w(K);
    for (int k = 0; k < K; ++k) w[k] = level[k] * (0.5 + 0.5 * u);
    phi[t1 - 1] = {p1, p2};
    sigma[t1 - 1] = w.asDiagonal();
  }
}

}  // namespace

SimOutput generate(const SimSpec& spec, std::uint32_t replicate) {
  if (spec.replicates < 1) throw ConfigError("generate: replicate count must be >= 1");
  if (spec.burn_in < 0) throw ConfigError("generate: negative burn-in");
  const int T = spec.T > 0 ? spec.T : default_length(spec.gen);

  std::vector<std::vector<Eigen::MatrixXd>> phi;
  std::vector<Eigen::MatrixXd> sigma;
  if (int c = sim1_case_index(spec.gen); c > 0)
    sim1_parameters(c, spec.sigma_scale, T, phi, sigma);
  else if (spec.gen == Generator::sim2)
    sim2_parameters(T, phi, sigma);
  else
    wind6_parameters(T, phi, sigma);

  TvVarModel truth = make_tvvar(std::move(phi), std::move(sigma));
  const int K = truth.K;
  const int P = truth.P;

  rng::Engine eng(spec.seed, rng::stream_id(replicate, rng::Domain::data, 0));
  Eigen::MatrixXd lags = Eigen::MatrixXd::Zero(K, P);  // col i holds x_{t-1-i}
  Eigen::VectorXd z(K), u(K), x(K);

  auto step = [&](int t0 /*0-based parameter index*/) {
    for (int k = 0; k < K; ++k) z[k] = eng.normal();
    u = truth.chol_l[t0] *
        (truth.innovation_var[t0].array().sqrt() * z.array()).matrix();
    x = u;
    for (int p = 1; p <= P; ++p) x.noalias() += truth.phi[t0][p - 1] * lags.col(p - 1);
    for (int p = P - 1; p >= 1; --p) lags.col(p) = lags.col(p - 1);
    lags.col(0) = x;
  };

  // Burn-in runs under the t = 1 parameters from a zero start.
  for (int b = 0; b < spec.burn_in; ++b) step(0);

  SimOutput out;
  out.x.values.resize(K, T);
  for (int t = 0; t < T; ++t) {
    step(t);
    out.x.values.col(t) = x;
  }
  out.truth = std::move(truth);
  return out;
}

namespace {

SummaryStat summarize(const std::vector<double>& values) {
  SummaryStat s;
  s.n = static_cast<int>(values.size());
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / s.n;
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (s.n - 1));
  }
  return s;
}

struct ReplicateResult {
  bool ok = false;
  std::string error;
  std::map<Criterion, int> chosen;
  Eigen::VectorXd ase_values;
  int channels = 0;
  double mspe = 0.0;
  bool has_mspe = false;
  double seconds = 0.0;
};

}  // namespace

ExperimentSummary run_experiment(const SimSpec& spec, const ExperimentConfig& cfg) {
  const bool mc_computed =
      cfg.fit.compute_all_criteria || cfg.fit.criterion != Criterion::bic;
  const bool do_forecast = cfg.forecast_holdout > 0;
  const bool do_ase = !do_forecast && cfg.spectral_freqs > 0;

  std::vector<ReplicateResult> results(spec.replicates);
  parallel_for(static_cast<std::size_t>(spec.replicates), cfg.threads, [&](std::size_t r) {
    ReplicateResult& res = results[r];
    try {
      const SimOutput sim = generate(spec, static_cast<std::uint32_t>(r));
      res.channels = sim.x.channels();
      FitConfig fc = cfg.fit;
      fc.seed = spec.seed;
      fc.replicate = static_cast<std::uint32_t>(r);

      const auto start = std::chrono::steady_clock::now();
      if (do_forecast) {
        res.mspe = rolling_mspe(sim.x, cfg.forecast_holdout, fc, cfg.rolling,
                                cfg.forecast_samples);
        res.has_mspe = true;
      } else {
        const BclfFit f = fit(sim.x, fc);
        res.chosen[Criterion::bic] = f.report.argmin(Criterion::bic);
        if (mc_computed) {
          res.chosen[Criterion::dic] = f.report.argmin(Criterion::dic);
          res.chosen[Criterion::waic] = f.report.argmin(Criterion::waic);
        }
        if (do_ase) {
          const SpectralField est = spectral_field(f.model, cfg.spectral_freqs);
          const SpectralField truth = spectral_field(sim.truth, cfg.spectral_freqs);
          res.ase_values = ase(est, truth).values;
        }
      }
      res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                        .count();
      res.ok = true;
    } catch (const std::exception& err) {
      res.error = err.what();
    }
  });

  ExperimentSummary summary;
  summary.replicates = spec.replicates;
  summary.p_max = cfg.fit.p_max;
  if (!do_forecast) {
    summary.selection_counts[Criterion::bic].assign(cfg.fit.p_max, 0);
    if (mc_computed) {
      summary.selection_counts[Criterion::dic].assign(cfg.fit.p_max, 0);
      summary.selection_counts[Criterion::waic].assign(cfg.fit.p_max, 0);
    }
  }

  std::vector<double> seconds, mspes;
  std::vector<std::vector<double>> ase_cols;
  int channels = 0;
  for (int r = 0; r < spec.replicates; ++r) {
    const ReplicateResult& res = results[r];
    if (!res.ok) {
      summary.failures.emplace_back(r, res.error);
      continue;
    }
    seconds.push_back(res.seconds);
    channels = res.channels;
    for (const auto& [crit, P] : res.chosen) summary.selection_counts[crit][P - 1] += 1;
    if (res.has_mspe) mspes.push_back(res.mspe);
    if (res.ase_values.size() > 0) {
      if (ase_cols.empty()) ase_cols.resize(res.ase_values.size());
      for (Eigen::Index i = 0; i < res.ase_values.size(); ++i)
        ase_cols[i].push_back(res.ase_values[i]);
    }
  }
  summary.seconds = summarize(seconds);
  if (!mspes.empty()) summary.mspe = summarize(mspes);
  if (!ase_cols.empty()) {
    summary.ase_names = ase_quantity_names(channels);
    for (const auto& col : ase_cols) summary.ase.push_back(summarize(col));
  }
  return summary;
}

}  // namespace bclf
