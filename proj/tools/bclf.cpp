// bclf: fit, simulate, analyze and forecast time-varying vector
// autoregressions with the circular lattice filter.
//
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 numeric failure. Errors also emit a one-line JSON record on stderr.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <list>
#include <numeric>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "bclf/errors.hpp"
#include "bclf/fit.hpp"
#include "bclf/forecast.hpp"
#include "bclf/io.hpp"
#include "bclf/rng.hpp"
#include "bclf/selection.hpp"
#include "bclf/simlab.hpp"
#include "bclf/spectral.hpp"
#include "bclf/version.hpp"

namespace fs = std::filesystem;
using bclf::ConfigError;
using bclf::DataError;

namespace {

// ---------------------------------------------------------------------------
// Layered configuration: defaults < --config file < --from-manifest <
// explicit flags < BCLF_SEED. The resolved map is written verbatim to the
// run manifest, so a manifest fully determines a rerun.

struct Resolver {
  bclf::io::ConfigMap values;  // starts as defaults

  void overlay(const bclf::io::ConfigMap& layer, const std::string& origin) {
    for (const auto& [key, value] : layer) {
      if (!values.count(key))
        throw ConfigError(origin + ": unknown configuration key '" + key + "'");
      values[key] = value;
    }
  }

  const std::string& str(const std::string& key) const { return values.at(key); }

  long integer(const std::string& key, long lo, long hi) const {
    try {
      const long v = std::stol(values.at(key));
      if (v < lo || v > hi)
        throw ConfigError(key + " = " + values.at(key) + " outside [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return v;
    } catch (const std::logic_error&) {
      throw ConfigError(key + " = '" + values.at(key) + "' is not an integer");
    }
  }

  double real(const std::string& key, double lo, double hi) const {
    try {
      const double v = std::stod(values.at(key));
      if (!(v >= lo && v <= hi))
        throw ConfigError(key + " = " + values.at(key) + " outside range");
      return v;
    } catch (const std::logic_error&) {
      throw ConfigError(key + " = '" + values.at(key) + "' is not a number");
    }
  }

  bool flag(const std::string& key) const {
    const std::string& v = values.at(key);
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw ConfigError(key + " must be true/false");
  }

  std::uint64_t seed() const {
    try {
      return static_cast<std::uint64_t>(std::stoull(values.at("seed")));
    } catch (const std::logic_error&) {
      throw ConfigError("seed = '" + values.at("seed") + "' is not an integer");
    }
  }
};

class Command {
 public:
  Command(CLI::App& app, const std::string& name, const std::string& desc)
      : sub_(app.add_subcommand(name, desc)), name_(name) {
    sub_->add_option("--config", config_file_, "key = value configuration file");
    sub_->add_option("--from-manifest", manifest_file_,
                     "load the config object of a previous run manifest");
  }

  CLI::App* sub() { return sub_; }
  const std::string& name() const { return name_; }

  /// Declares an option whose resolved value lives in the config map.
  void declare(const std::string& key, const std::string& default_value,
               const std::string& help) {
    defaults_[key] = default_value;
    storage_.emplace_back();
    CLI::Option* opt = sub_->add_option("--" + flag_name(key), storage_.back(), help);
    captured_.emplace_back(key, &storage_.back(), opt);
  }

  Resolver resolve() const {
    Resolver r;
    r.values = defaults_;
    if (!config_file_.empty()) r.overlay(bclf::io::read_config_file(config_file_), config_file_);
    if (!manifest_file_.empty()) {
      std::string cmd;
      bclf::io::ConfigMap m = bclf::io::read_manifest(manifest_file_, &cmd);
      if (!cmd.empty() && cmd != name_)
        throw ConfigError("manifest was written by command '" + cmd + "', not '" + name_ +
                          "'");
      r.overlay(m, manifest_file_);
    }
    for (const auto& [key, storage, opt] : captured_)
      if (opt->count() > 0) r.values[key] = *storage;
    if (const char* env = std::getenv("BCLF_SEED"); env != nullptr && r.values.count("seed"))
      r.values["seed"] = env;
    return r;
  }

 private:
  static std::string flag_name(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
  }

  CLI::App* sub_;
  std::string name_;
  std::string config_file_, manifest_file_;
  bclf::io::ConfigMap defaults_;
  std::list<std::string> storage_;  // stable addresses for CLI11 bindings
  std::vector<std::tuple<std::string, std::string*, CLI::Option*>> captured_;
};

void ensure_outdir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir + ": " + ec.message());
}

int report_error(const char* type, const std::string& message, int code) {
  std::string clean = message;
  for (char& c : clean)
    if (c == '"' || c == '\\' || c == '\n') c = '\'';
  std::cerr << "{\"error\":{\"type\":\"" << type << "\",\"message\":\"" << clean << "\"}}\n";
  return code;
}

// ---------------------------------------------------------------------------
// Shared fit-option block.

void declare_fit_options(Command& cmd) {
  cmd.declare("p_max", "5", "maximum candidate order");
  cmd.declare("criterion", "bic", "order selection criterion: bic|dic|waic");
  cmd.declare("all_criteria", "false", "also compute DIC and WAIC when criterion is bic");
  cmd.declare("grid_lo", "0.99", "discount grid lower bound");
  cmd.declare("grid_hi", "1.0", "discount grid upper bound (inclusive)");
  cmd.declare("grid_step", "0.002", "discount grid step");
  cmd.declare("mc_samples", "500", "Monte Carlo draws for DIC/WAIC");
  cmd.declare("kappa0_window", "40", "observations behind the kappa0 estimate");
  cmd.declare("threads", "1", "worker threads");
  cmd.declare("seed", "0", "rng seed (BCLF_SEED overrides)");
}

bclf::FitConfig fit_config(const Resolver& r) {
  bclf::FitConfig cfg;
  cfg.p_max = static_cast<int>(r.integer("p_max", 1, 50));
  cfg.criterion = bclf::criterion_from_string(r.str("criterion"));
  cfg.compute_all_criteria = r.flag("all_criteria");
  cfg.grid = bclf::make_discount_grid(r.real("grid_lo", 1e-6, 1.0),
                                      r.real("grid_hi", 1e-6, 1.0),
                                      r.real("grid_step", 1e-9, 1.0));
  cfg.mc_samples = static_cast<int>(r.integer("mc_samples", 1, 4096));
  cfg.kappa0_window = static_cast<int>(r.integer("kappa0_window", 2, 1000000));
  cfg.threads = static_cast<int>(r.integer("threads", 1, 256));
  cfg.seed = r.seed();
  return cfg;
}

std::vector<int> parse_ordering(const std::string& text, int K) {
  std::vector<int> perm;
  std::string cell;
  std::istringstream ss(text);
  while (std::getline(ss, cell, ','))
    try {
      perm.push_back(std::stoi(cell));
    } catch (const std::logic_error&) {
      throw ConfigError("ordering entry '" + cell + "' is not an integer");
    }
  if (static_cast<int>(perm.size()) != K)
    throw ConfigError("ordering must list all " + std::to_string(K) + " channels");
  std::vector<int> seen(K, 0);
  for (int v : perm) {
    if (v < 1 || v > K || seen[v - 1]++)
      throw ConfigError("ordering must be a permutation of 1.." + std::to_string(K));
  }
  return perm;
}

bclf::SeriesMatrix permute_channels(const bclf::SeriesMatrix& x, const std::vector<int>& perm) {
  bclf::SeriesMatrix out;
  out.values.resize(x.channels(), x.length());
  for (int k = 0; k < x.channels(); ++k) out.values.row(k) = x.values.row(perm[k] - 1);
  return out;
}

// ---------------------------------------------------------------------------
// Subcommand bodies.

int run_simulate(const Resolver& r) {
  bclf::SimSpec spec;
  spec.gen = bclf::generator_from_string(r.str("gen"));
  spec.T = static_cast<int>(r.integer("T", 0, 10000000));
  spec.seed = r.seed();
  spec.burn_in = static_cast<int>(r.integer("burn_in", 0, 1000000));
  spec.sigma_scale = r.real("sigma_scale", 1e-12, 1e12);
  const auto replicate = static_cast<std::uint32_t>(r.integer("replicate", 0, 1 << 30));
  const std::string out = r.str("out");
  ensure_outdir(out);

  const bclf::SimOutput sim = bclf::generate(spec, replicate);
  bclf::io::write_series_csv((fs::path(out) / "data.csv").string(), sim.x);
  bclf::io::write_model_csv((fs::path(out) / "truth_phi.csv").string(),
                            (fs::path(out) / "truth_sigma.csv").string(), sim.truth);
  bclf::io::write_manifest((fs::path(out) / "manifest.json").string(), "simulate", r.values);
  std::cout << "wrote " << sim.x.channels() << "x" << sim.x.length() << " series to " << out
            << "\n";
  return 0;
}

void write_fit_artifacts(const std::string& out, const bclf::BclfFit& fit) {
  bclf::io::write_model_csv((fs::path(out) / "model_phi.csv").string(),
                            (fs::path(out) / "model_sigma.csv").string(), fit.model);
  bclf::io::write_stages_csv((fs::path(out) / "stages.csv").string(), fit);
  bclf::io::write_order_report_csv((fs::path(out) / "order_report.csv").string(), fit.report);
}

int run_fit(const Resolver& r) {
  const std::string input = r.str("input");
  const std::string out = r.str("out");
  if (input.empty()) throw ConfigError("fit requires --input");
  const bclf::FitConfig cfg = fit_config(r);
  ensure_outdir(out);
  bclf::SeriesMatrix x = bclf::io::read_series_csv(input);

  if (r.flag("all_orderings")) {
    if (x.channels() > 5)
      throw ConfigError("--all-orderings supports at most 5 channels (K! fits)");
    std::vector<int> perm(x.channels());
    std::iota(perm.begin(), perm.end(), 1);
    std::ofstream table((fs::path(out) / "orderings.csv").string());
    table << "ordering,selected_P,logl,bic,stage_logpredlik\n";
    do {
      const bclf::BclfFit fit = bclf::fit(permute_channels(x, perm), cfg);
      double stage_ll = 0.0;
      for (const auto& channel : fit.stages)
        for (const auto& sf : channel) stage_ll += sf.logpredlik;
      std::string label;
      for (int v : perm) label += (label.empty() ? "" : "-") + std::to_string(v);
      const auto& row = fit.report.rows[fit.order - 1];
      table << label << ',' << fit.order << ',' << bclf::io::format_double(row.logl) << ','
            << bclf::io::format_double(row.bic) << ','
            << bclf::io::format_double(stage_ll) << "\n";
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  if (!r.str("ordering").empty())
    x = permute_channels(x, parse_ordering(r.str("ordering"), x.channels()));

  const bclf::BclfFit fit = bclf::fit(x, cfg);
  write_fit_artifacts(out, fit);
  bclf::io::write_manifest((fs::path(out) / "manifest.json").string(), "fit", r.values);

  const auto unstable = bclf::unstable_timesteps(fit.model);
  std::cout << "selected order " << fit.order << " by " << to_string(fit.report.used) << "; "
            << unstable.size() << " timesteps with companion spectral radius > 1\n";
  return 0;
}

int run_spectrum(const Resolver& r) {
  std::string phi = r.str("phi");
  std::string sigma = r.str("sigma");
  const std::string model_dir = r.str("model");
  if (phi.empty() && !model_dir.empty()) {
    for (const char* base : {"model", "truth"}) {
      const fs::path candidate = fs::path(model_dir) / (std::string(base) + "_phi.csv");
      if (fs::exists(candidate)) {
        phi = candidate.string();
        sigma = (fs::path(model_dir) / (std::string(base) + "_sigma.csv")).string();
        break;
      }
    }
  }
  if (phi.empty() || sigma.empty())
    throw ConfigError("spectrum requires --phi/--sigma or --model DIR");
  const std::string out = r.str("out");
  ensure_outdir(out);

  const bclf::TvVarModel model = bclf::io::read_model_csv(phi, sigma);
  const bclf::SpectralField field =
      bclf::spectral_field(model, static_cast<int>(r.integer("L", 1, 100000)),
                           static_cast<int>(r.integer("t_stride", 1, 1000000)));
  bclf::io::write_spectrum_csv((fs::path(out) / "spectrum.csv").string(), field,
                               r.flag("full_matrix"));
  bclf::io::write_manifest((fs::path(out) / "manifest.json").string(), "spectrum", r.values);
  std::cout << "wrote " << field.times() << "x" << field.nfreq() << " spectral grid to "
            << out << "\n";
  return 0;
}

int run_forecast(const Resolver& r) {
  const std::string input = r.str("input");
  if (input.empty()) throw ConfigError("forecast requires --input");
  const std::string out = r.str("out");
  const bclf::FitConfig cfg = fit_config(r);
  const int h = static_cast<int>(r.integer("horizon", 1, 100000));
  const int J = static_cast<int>(r.integer("J", 1, 1 << 22));
  ensure_outdir(out);
  const bclf::SeriesMatrix x = bclf::io::read_series_csv(input);

  const bclf::BclfFit fit = bclf::fit(x, cfg);
  const bclf::ForecastResult fc = bclf::forecast(fit, h, J, cfg.seed);
  bclf::io::write_forecast_csv((fs::path(out) / "forecast.csv").string(), fc);
  write_fit_artifacts(out, fit);
  bclf::io::write_manifest((fs::path(out) / "manifest.json").string(), "forecast", r.values);
  std::cout << "order " << fit.order << "; " << fc.parcor_outside_unit
            << " PARCOR draws outside (-1, 1)\n";
  return 0;
}

int run_experiment(const Resolver& r) {
  bclf::SimSpec spec;
  spec.gen = bclf::generator_from_string(r.str("gen"));
  spec.T = static_cast<int>(r.integer("T", 0, 10000000));
  spec.seed = r.seed();
  spec.replicates = static_cast<int>(r.integer("reps", 1, 100000));
  spec.burn_in = static_cast<int>(r.integer("burn_in", 0, 1000000));
  spec.sigma_scale = r.real("sigma_scale", 1e-12, 1e12);

  bclf::ExperimentConfig cfg;
  cfg.fit = fit_config(r);
  cfg.spectral_freqs = static_cast<int>(r.integer("L", 0, 100000));
  cfg.forecast_holdout = static_cast<int>(r.integer("holdout", 0, 1000000));
  cfg.forecast_samples = static_cast<int>(r.integer("J", 1, 1 << 22));
  cfg.rolling = r.str("rolling") == "refit" ? bclf::RollingMode::refit
                                            : bclf::RollingMode::filter_extend;
  if (r.str("rolling") != "refit" && r.str("rolling") != "filter-extend")
    throw ConfigError("rolling must be filter-extend or refit");
  cfg.threads = cfg.fit.threads;

  const std::string out = r.str("out");
  ensure_outdir(out);
  const bclf::ExperimentSummary summary = bclf::run_experiment(spec, cfg);
  bclf::io::write_experiment_csvs(out, summary);
  bclf::io::write_manifest((fs::path(out) / "manifest.json").string(), "experiment", r.values);

  std::cout << summary.replicates - static_cast<int>(summary.failures.size()) << "/"
            << summary.replicates << " replicates succeeded; mean fit time "
            << summary.seconds.mean << " s\n";
  if (!summary.selection_counts.empty()) {
    for (const auto& [crit, counts] : summary.selection_counts) {
      std::cout << to_string(crit) << " selection:";
      for (std::size_t p = 0; p < counts.size(); ++p)
        std::cout << " P=" << (p + 1) << ":" << counts[p];
      std::cout << "\n";
    }
  }
  if (summary.mspe) std::cout << "mean MSPE " << summary.mspe->mean << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian circular lattice filter for time-varying VAR models"};
  app.set_version_flag("--version", BCLF_VERSION_STRING);
  app.require_subcommand(1);

  Command simulate(app, "simulate", "generate a dataset from a built-in process");
  simulate.declare("gen", "sim1-case1", "generator id (sim1-case1..6, sim2, wind6)");
  simulate.declare("T", "0", "series length; 0 = generator default");
  simulate.declare("seed", "0", "rng seed");
  simulate.declare("replicate", "0", "replicate substream index");
  simulate.declare("burn_in", "200", "discarded warm-up samples");
  simulate.declare("sigma_scale", "1.0", "covariance scale for sim1 cases 1-3");
  simulate.declare("out", "bclf-sim", "output directory");

  Command fit_cmd(app, "fit", "fit a TV-VAR model to a CSV series");
  fit_cmd.declare("input", "", "input CSV (T rows x K columns)");
  fit_cmd.declare("out", "bclf-fit", "output directory");
  fit_cmd.declare("ordering", "", "channel permutation, e.g. 2,1,3");
  fit_cmd.declare("all_orderings", "false", "fit every channel permutation (K <= 5)");
  declare_fit_options(fit_cmd);

  Command spectrum(app, "spectrum", "time-varying spectra and coherences of a model");
  spectrum.declare("model", "", "directory holding model_/truth_ phi and sigma CSVs");
  spectrum.declare("phi", "", "phi coefficient CSV");
  spectrum.declare("sigma", "", "sigma CSV");
  spectrum.declare("L", "100", "number of frequencies");
  spectrum.declare("t_stride", "1", "time subsampling stride");
  spectrum.declare("full_matrix", "false", "also emit complex matrix entries");
  spectrum.declare("out", "bclf-spectrum", "output directory");

  Command forecast_cmd(app, "forecast", "fit and forecast h steps ahead");
  forecast_cmd.declare("input", "", "input CSV (T rows x K columns)");
  forecast_cmd.declare("out", "bclf-forecast", "output directory");
  forecast_cmd.declare("horizon", "1", "forecast horizon");
  forecast_cmd.declare("J", "1000", "predictive sample paths");
  declare_fit_options(forecast_cmd);

  Command experiment(app, "experiment", "replicated simulation study");
  experiment.declare("gen", "sim1-case1", "generator id");
  experiment.declare("T", "0", "series length; 0 = generator default");
  experiment.declare("reps", "50", "replicate count");
  experiment.declare("burn_in", "200", "discarded warm-up samples");
  experiment.declare("sigma_scale", "1.0", "covariance scale for sim1 cases 1-3");
  experiment.declare("L", "100", "ASE frequencies; 0 disables the spectral comparison");
  experiment.declare("holdout", "0", "rolling forecast holdout; > 0 switches to MSPE mode");
  experiment.declare("J", "1000", "predictive sample paths per origin");
  experiment.declare("rolling", "filter-extend", "rolling mode: filter-extend|refit");
  experiment.declare("out", "bclf-experiment", "output directory");
  declare_fit_options(experiment);

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      return report_error("ConfigError", e.what(), 2);
    }
    if (simulate.sub()->parsed()) return run_simulate(simulate.resolve());
    if (fit_cmd.sub()->parsed()) return run_fit(fit_cmd.resolve());
    if (spectrum.sub()->parsed()) return run_spectrum(spectrum.resolve());
    if (forecast_cmd.sub()->parsed()) return run_forecast(forecast_cmd.resolve());
    if (experiment.sub()->parsed()) return run_experiment(experiment.resolve());
    return 2;
  } catch (const ConfigError& e) {
    return report_error("ConfigError", e.what(), 2);
  } catch (const DataError& e) {
    return report_error("DataError", e.what(), 3);
  } catch (const bclf::Error& e) {
    return report_error("NumericError", e.what(), 4);
  } catch (const std::exception& e) {
    return report_error("InternalError", e.what(), 4);
  }
}
