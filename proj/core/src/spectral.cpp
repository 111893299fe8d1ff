#include "bclf/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "bclf/errors.hpp"

namespace bclf {

double SpectralField::coherence(int ti, int l, int i, int j) const {
  const Eigen::MatrixXcd& m = g[ti][l];
  const double denom = m(i, i).real() * m(j, j).real();
  return std::norm(m(i, j)) / denom;
}

SpectralField spectral_field(const TvVarModel& model, int L, int t_stride) {
  if (L < 1) throw ConfigError("spectral_field: need at least one frequency");
  if (t_stride < 1) throw ConfigError("spectral_field: stride must be positive");
  const int K = model.K;
  const int P = model.P;

  SpectralField field;
  field.K = K;
  field.freqs.resize(L);
  for (int l = 0; l < L; ++l) field.freqs[l] = static_cast<double>(l + 1) / (2.0 * L);
  for (int t = 0; t < model.T; t += t_stride) field.t_index.push_back(t);

  // e^{-2 pi i p omega_l} depends on (p, l) only.
  Eigen::MatrixXcd twiddle(P, L);
  for (int p = 1; p <= P; ++p)
    for (int l = 0; l < L; ++l) {
      const double angle = -2.0 * std::numbers::pi * p * field.freqs[l];
      twiddle(p - 1, l) = std::complex<double>(std::cos(angle), std::sin(angle));
    }

  field.g.resize(field.t_index.size());
  Eigen::MatrixXcd psi(K, K);
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(K, K);
  for (std::size_t ti = 0; ti < field.t_index.size(); ++ti) {
    const int t = field.t_index[ti];
    field.g[ti].resize(L);
    for (int l = 0; l < L; ++l) {
      psi = eye;
      for (int p = 1; p <= P; ++p) psi -= twiddle(p - 1, l) * model.phi[t][p - 1];
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu(psi);
      const Eigen::MatrixXcd inv = lu.solve(eye);
      if (!inv.allFinite())
        throw SingularityError("spectral_field: singular transfer function at t=" +
                                   std::to_string(t + 1) +
                                   ", omega=" + std::to_string(field.freqs[l]),
                               t + 1, field.freqs[l]);
      Eigen::MatrixXcd gg = inv * model.sigma[t] * inv.adjoint();
      // Enforce exact Hermitian symmetry against rounding drift.
      field.g[ti][l] = 0.5 * (gg + gg.adjoint());
    }
  }
  return field;
}

std::vector<std::string> ase_quantity_names(int K) {
  std::vector<std::string> names;
  for (int i = 1; i <= K; ++i) names.push_back("g" + std::to_string(i) + std::to_string(i));
  for (int i = 1; i <= K; ++i)
    for (int j = i + 1; j <= K; ++j)
      names.push_back("rho2_" + std::to_string(i) + "_" + std::to_string(j));
  return names;
}

AseReport ase(const SpectralField& est, const SpectralField& truth) {
  if (est.K != truth.K || est.t_index != truth.t_index || est.nfreq() != truth.nfreq())
    throw DimensionError("ase: fields are not on the same (t, omega) grid");
  const int K = est.K;
  const int nT = est.times();
  const int L = est.nfreq();
  const double scale = 1.0 / (static_cast<double>(nT) * L);

  AseReport report;
  report.names = ase_quantity_names(K);
  report.values.setZero(static_cast<Eigen::Index>(report.names.size()));

  for (int ti = 0; ti < nT; ++ti)
    for (int l = 0; l < L; ++l) {
      const Eigen::MatrixXcd& ge = est.g[ti][l];
      const Eigen::MatrixXcd& gt = truth.g[ti][l];
      for (int i = 0; i < K; ++i) {
        const double a = ge(i, i).real();
        const double b = gt(i, i).real();
        if (!(a > 0.0) || !(b > 0.0))
          throw DomainError("ase: non-positive diagonal spectrum at t index " +
                            std::to_string(ti));
        const double d = std::log(a) - std::log(b);
        report.values[i] += scale * d * d;
      }
      int idx = K;
      for (int i = 0; i < K; ++i)
        for (int j = i + 1; j < K; ++j) {
          const double d = est.coherence(ti, l, i, j) - truth.coherence(ti, l, i, j);
          report.values[idx++] += scale * d * d;
        }
    }
  return report;
}

}  // namespace bclf
