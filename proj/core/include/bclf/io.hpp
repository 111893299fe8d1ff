#ifndef BCLF_IO_HPP
#define BCLF_IO_HPP

#include <map>
#include <string>

#include "bclf/fit.hpp"
#include "bclf/forecast.hpp"
#include "bclf/series.hpp"
#include "bclf/simlab.hpp"
#include "bclf/spectral.hpp"

namespace bclf::io {

/// Doubles are serialized with 17 significant digits so that read-back is
/// bit-exact.
std::string format_double(double v);

/// T rows x K numeric columns; optional header row; ',' or ';' delimiter
/// (auto-detected); '.' decimal separator. Throws DataError with row and
/// column on parse failures.
SeriesMatrix read_series_csv(const std::string& path);

/// Writes with a header row x1..xK and no index column, so the file is
/// itself valid fit input.
void write_series_csv(const std::string& path, const SeriesMatrix& x);

/// Long-format coefficient tables (1-based indices):
///   phi csv:   t,p,i,j,value
///   sigma csv: t,i,j,value
void write_model_csv(const std::string& phi_path, const std::string& sigma_path,
                     const TvVarModel& model);
TvVarModel read_model_csv(const std::string& phi_path, const std::string& sigma_path);

/// Per-stage selection diagnostics: one row per (channel, stage) with the
/// chosen discounts, predictive log likelihood and the time-averaged
/// forward innovation variance (scree data).
void write_stages_csv(const std::string& path, const BclfFit& fit);

void write_order_report_csv(const std::string& path, const OrderReport& report);

/// Long-format spectral grid: t,omega,quantity,value with quantities
/// g11..gKK and rho2_i_j; with full_matrix also g_i_j_re / g_i_j_im.
void write_spectrum_csv(const std::string& path, const SpectralField& field,
                        bool full_matrix = false);

/// Per-horizon forecast summary: h,channel,mean,sd over draws.
void write_forecast_csv(const std::string& path, const ForecastResult& fc);

/// selection_frequencies.csv, ase_summary.csv, mspe_summary.csv,
/// timing.csv, failures.csv under dir (files only written when the summary
/// carries the corresponding section).
void write_experiment_csvs(const std::string& dir, const ExperimentSummary& summary);

/// Flat string key-value configuration, ordered for deterministic output.
using ConfigMap = std::map<std::string, std::string>;

/// `key = value` lines; '#' comments; blank lines ignored.
ConfigMap read_config_file(const std::string& path);

/// Reads the "config" object back out of a run manifest.
ConfigMap read_manifest(const std::string& path, std::string* command = nullptr);

/// JSON run manifest recording tool, version, command and the resolved
/// configuration; rerunning the same command with this config reproduces
/// all artifacts byte-identically.
void write_manifest(const std::string& path, const std::string& command,
                    const ConfigMap& config);

}  // namespace bclf::io

#endif  // BCLF_IO_HPP
