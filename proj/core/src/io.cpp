#include "bclf/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "bclf/errors.hpp"
#include "bclf/version.hpp"

namespace bclf::io {

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file: " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file: " + path);
  return out;
}

void strip_bom(std::string& line) {
  if (line.size() >= 3 && line[0] == '\xEF' && line[1] == '\xBB' && line[2] == '\xBF')
    line.erase(0, 3);
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delim)) cells.push_back(cell);
  if (!line.empty() && line.back() == delim) cells.push_back("");
  return cells;
}

bool parse_double(const std::string& cell, double& out) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(end[-1]))) --end;
  if (begin == end) return false;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

char detect_delimiter(const std::string& line) {
  const auto commas = std::count(line.begin(), line.end(), ',');
  const auto semis = std::count(line.begin(), line.end(), ';');
  return semis > commas ? ';' : ',';
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

SeriesMatrix read_series_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  char delim = ',';
  bool first = true;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (first) strip_bom(line);
    strip_cr(line);
    if (line.empty()) continue;
    if (first) delim = detect_delimiter(line);
    const std::vector<std::string> cells = split(line, delim);
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(cells[c], row[c])) {
        if (first) {
          numeric = false;  // header row
          break;
        }
        throw DataError(path + ": row " + std::to_string(lineno) + ", column " +
                        std::to_string(c + 1) + ": cannot parse '" + cells[c] + "'");
      }
    }
    first = false;
    if (!numeric) continue;
    if (!rows.empty() && rows.front().size() != row.size())
      throw DataError(path + ": row " + std::to_string(lineno) + " has " +
                      std::to_string(row.size()) + " columns, expected " +
                      std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": no numeric rows");
  const int T = static_cast<int>(rows.size());
  const int K = static_cast<int>(rows.front().size());
  Eigen::MatrixXd values(K, T);
  for (int t = 0; t < T; ++t)
    for (int k = 0; k < K; ++k) values(k, t) = rows[t][k];
  return SeriesMatrix::checked(std::move(values));
}

void write_series_csv(const std::string& path, const SeriesMatrix& x) {
  std::ofstream out = open_output(path);
  for (int k = 0; k < x.channels(); ++k) out << (k ? "," : "") << "x" << (k + 1);
  out << "\n";
  for (int t = 0; t < x.length(); ++t) {
    for (int k = 0; k < x.channels(); ++k)
      out << (k ? "," : "") << format_double(x.values(k, t));
    out << "\n";
  }
}

void write_model_csv(const std::string& phi_path, const std::string& sigma_path,
                     const TvVarModel& model) {
  {
    std::ofstream out = open_output(phi_path);
    out << "t,p,i,j,value\n";
    for (int t = 0; t < model.T; ++t)
      for (int p = 1; p <= model.P; ++p)
        for (int i = 0; i < model.K; ++i)
          for (int j = 0; j < model.K; ++j)
            out << (t + 1) << ',' << p << ',' << (i + 1) << ',' << (j + 1) << ','
                << format_double(model.phi[t][p - 1](i, j)) << "\n";
  }
  {
    std::ofstream out = open_output(sigma_path);
    out << "t,i,j,value\n";
    for (int t = 0; t < model.T; ++t)
      for (int i = 0; i < model.K; ++i)
        for (int j = 0; j < model.K; ++j)
          out << (t + 1) << ',' << (i + 1) << ',' << (j + 1) << ','
              << format_double(model.sigma[t](i, j)) << "\n";
  }
}

namespace {

struct LongRow {
  int t, p, i, j;
  double value;
};

std::vector<LongRow> read_long_csv(const std::string& path, bool with_p) {
  std::ifstream in = open_input(path);
  std::string line;
  std::vector<LongRow> rows;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1) {
      strip_bom(line);
      continue;  // header
    }
    strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    const std::size_t expected = with_p ? 5 : 4;
    if (cells.size() != expected)
      throw DataError(path + ": row " + std::to_string(lineno) + ": expected " +
                      std::to_string(expected) + " columns");
    LongRow r{};
    std::size_t c = 0;
    double tmp;
    auto next_int = [&](int& dst) {
      if (!parse_double(cells[c], tmp))
        throw DataError(path + ": row " + std::to_string(lineno) + ", column " +
                        std::to_string(c + 1) + ": cannot parse '" + cells[c] + "'");
      dst = static_cast<int>(tmp);
      ++c;
    };
    next_int(r.t);
    if (with_p) next_int(r.p);
    next_int(r.i);
    next_int(r.j);
    if (!parse_double(cells[c], r.value))
      throw DataError(path + ": row " + std::to_string(lineno) + ", column " +
                      std::to_string(c + 1) + ": cannot parse '" + cells[c] + "'");
    rows.push_back(r);
  }
  if (rows.empty()) throw DataError(path + ": no data rows");
  return rows;
}

}  // namespace

TvVarModel read_model_csv(const std::string& phi_path, const std::string& sigma_path) {
  const auto phi_rows = read_long_csv(phi_path, true);
  const auto sigma_rows = read_long_csv(sigma_path, false);
  int T = 0, P = 0, K = 0;
  for (const auto& r : phi_rows) {
    T = std::max(T, r.t);
    P = std::max(P, r.p);
    K = std::max({K, r.i, r.j});
  }
  if (T < 1 || P < 1 || K < 1) throw DataError(phi_path + ": invalid indices");
  std::vector<std::vector<Eigen::MatrixXd>> phi(
      T, std::vector<Eigen::MatrixXd>(P, Eigen::MatrixXd::Zero(K, K)));
  std::vector<Eigen::MatrixXd> sigma(T, Eigen::MatrixXd::Zero(K, K));
  for (const auto& r : phi_rows) phi[r.t - 1][r.p - 1](r.i - 1, r.j - 1) = r.value;
  for (const auto& r : sigma_rows) {
    if (r.t < 1 || r.t > T || r.i < 1 || r.i > K || r.j < 1 || r.j > K)
      throw DataError(sigma_path + ": index out of range");
    sigma[r.t - 1](r.i - 1, r.j - 1) = r.value;
  }
  return make_tvvar(std::move(phi), std::move(sigma));
}

void write_stages_csv(const std::string& path, const BclfFit& fit) {
  std::ofstream out = open_output(path);
  out << "k,m,gamma_f,delta_f,gamma_b,delta_b,logpredlik,first_active,tavg_var_f\n";
  for (int k = 0; k < fit.K; ++k)
    for (const StageFit& sf : fit.stages[k])
      out << (k + 1) << ',' << sf.stage << ',' << format_double(sf.disc.gamma) << ','
          << format_double(sf.disc.delta) << ',' << format_double(sf.disc_b.gamma) << ','
          << format_double(sf.disc_b.delta) << ',' << format_double(sf.logpredlik) << ','
          << (sf.first_active + 1) << ',' << format_double(sf.var_f.mean()) << "\n";
}

void write_order_report_csv(const std::string& path, const OrderReport& report) {
  std::ofstream out = open_output(path);
  out << "P,n_theta,logl,bic,dic,waic,p_dic,p_waic,chosen\n";
  for (const auto& row : report.rows)
    out << row.P << ',' << row.n_theta << ',' << format_double(row.logl) << ','
        << format_double(row.bic) << ',' << format_double(row.dic) << ','
        << format_double(row.waic) << ',' << format_double(row.p_dic) << ','
        << format_double(row.p_waic) << ',' << (row.P == report.chosen ? 1 : 0) << "\n";
}

void write_spectrum_csv(const std::string& path, const SpectralField& field,
                        bool full_matrix) {
  std::ofstream out = open_output(path);
  out << "t,omega,quantity,value\n";
  const int K = field.K;
  for (int ti = 0; ti < field.times(); ++ti) {
    const int t1 = field.t_index[ti] + 1;
    for (int l = 0; l < field.nfreq(); ++l) {
      const std::string omega = format_double(field.freqs[l]);
      for (int i = 0; i < K; ++i)
        out << t1 << ',' << omega << ",g" << (i + 1) << (i + 1) << ','
            << format_double(field.g[ti][l](i, i).real()) << "\n";
      for (int i = 0; i < K; ++i)
        for (int j = i + 1; j < K; ++j)
          out << t1 << ',' << omega << ",rho2_" << (i + 1) << '_' << (j + 1) << ','
              << format_double(field.coherence(ti, l, i, j)) << "\n";
      if (full_matrix)
        for (int i = 0; i < K; ++i)
          for (int j = 0; j < K; ++j) {
            out << t1 << ',' << omega << ",g_" << (i + 1) << '_' << (j + 1) << "_re,"
                << format_double(field.g[ti][l](i, j).real()) << "\n";
            out << t1 << ',' << omega << ",g_" << (i + 1) << '_' << (j + 1) << "_im,"
                << format_double(field.g[ti][l](i, j).imag()) << "\n";
          }
    }
  }
}

void write_forecast_csv(const std::string& path, const ForecastResult& fc) {
  std::ofstream out = open_output(path);
  out << "h,channel,mean,sd\n";
  const int K = static_cast<int>(fc.mean.rows());
  const int J = static_cast<int>(fc.samples.size());
  for (int h = 0; h < fc.horizon; ++h)
    for (int k = 0; k < K; ++k) {
      double ss = 0.0;
      for (const auto& s : fc.samples) {
        const double d = s(k, h) - fc.mean(k, h);
        ss += d * d;
      }
      const double sd = J > 1 ? std::sqrt(ss / (J - 1)) : 0.0;
      out << (h + 1) << ',' << (k + 1) << ',' << format_double(fc.mean(k, h)) << ','
          << format_double(sd) << "\n";
    }
}

void write_experiment_csvs(const std::string& dir, const ExperimentSummary& summary) {
  namespace fs = std::filesystem;
  const fs::path base(dir);
  if (!summary.selection_counts.empty()) {
    std::ofstream out = open_output((base / "selection_frequencies.csv").string());
    out << "criterion,P,count,frequency\n";
    for (const auto& [crit, counts] : summary.selection_counts) {
      int total = 0;
      for (int c : counts) total += c;
      for (int p = 1; p <= static_cast<int>(counts.size()); ++p)
        out << to_string(crit) << ',' << p << ',' << counts[p - 1] << ','
            << format_double(total > 0 ? static_cast<double>(counts[p - 1]) / total : 0.0)
            << "\n";
    }
  }
  if (!summary.ase.empty()) {
    std::ofstream out = open_output((base / "ase_summary.csv").string());
    out << "quantity,mean,sd,n\n";
    for (std::size_t i = 0; i < summary.ase.size(); ++i)
      out << summary.ase_names[i] << ',' << format_double(summary.ase[i].mean) << ','
          << format_double(summary.ase[i].sd) << ',' << summary.ase[i].n << "\n";
  }
  if (summary.mspe) {
    std::ofstream out = open_output((base / "mspe_summary.csv").string());
    out << "mean,sd,n\n";
    out << format_double(summary.mspe->mean) << ',' << format_double(summary.mspe->sd) << ','
        << summary.mspe->n << "\n";
  }
  {
    std::ofstream out = open_output((base / "timing.csv").string());
    out << "mean_seconds,sd_seconds,n\n";
    out << format_double(summary.seconds.mean) << ',' << format_double(summary.seconds.sd)
        << ',' << summary.seconds.n << "\n";
  }
  if (!summary.failures.empty()) {
    std::ofstream out = open_output((base / "failures.csv").string());
    out << "replicate,error\n";
    for (const auto& [r, msg] : summary.failures) {
      std::string clean = msg;
      std::replace(clean.begin(), clean.end(), ',', ';');
      std::replace(clean.begin(), clean.end(), '\n', ' ');
      out << r << ',' << clean << "\n";
    }
  }
}

ConfigMap read_config_file(const std::string& path) {
  std::ifstream in = open_input(path);
  ConfigMap config;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1) strip_bom(line);
    strip_cr(line);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ": line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(path + ": line " + std::to_string(lineno) + ": empty key");
    config[key] = value;
  }
  return config;
}

ConfigMap read_manifest(const std::string& path, std::string* command) {
  std::ifstream in = open_input(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& err) {
    throw DataError(path + ": invalid manifest JSON: " + err.what());
  }
  if (!j.contains("config") || !j["config"].is_object())
    throw DataError(path + ": manifest has no config object");
  if (command != nullptr && j.contains("command")) *command = j["command"].get<std::string>();
  ConfigMap config;
  for (const auto& [key, value] : j["config"].items())
    config[key] = value.get<std::string>();
  return config;
}

void write_manifest(const std::string& path, const std::string& command,
                    const ConfigMap& config) {
  nlohmann::ordered_json j;
  j["tool"] = "bclf";
  j["version"] = BCLF_VERSION_STRING;
  j["command"] = command;
  nlohmann::ordered_json c;
  for (const auto& [key, value] : config) c[key] = value;
  j["config"] = c;
  std::ofstream out = open_output(path);
  out << j.dump(2) << "\n";
}

}  // namespace bclf::io
