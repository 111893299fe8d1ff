#ifndef BCLF_SPECTRAL_HPP
#define BCLF_SPECTRAL_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bclf/periodic.hpp"

namespace bclf {

/// Time-frequency field of spectral matrices g(t, omega) on the grid
/// omega_l = l/(2L), l = 1..L, evaluated at the (possibly strided) time
/// indices in t_index.
struct SpectralField {
  int K = 0;
  std::vector<int> t_index;  // 0-based model times
  Eigen::VectorXd freqs;     // length L, in cycles per sample, (0, 0.5]
  std::vector<std::vector<Eigen::MatrixXcd>> g;  // [ti][l], each K x K Hermitian

  int times() const { return static_cast<int>(t_index.size()); }
  int nfreq() const { return static_cast<int>(freqs.size()); }
  /// Squared coherence |g_ij|^2 / (g_ii g_jj) at grid point (ti, l).
  double coherence(int ti, int l, int i, int j) const;
};

/// Evaluates g(t,omega) = Psi^-1 Sigma_t Psi^-*, with
/// Psi(t,omega) = I - sum_p Phi_{p,t} e^{-2 pi i p omega}. Throws
/// SingularityError when Psi is numerically singular at some (t, omega).
SpectralField spectral_field(const TvVarModel& model, int L, int t_stride = 1);

/// Average squared errors between two fields on the same grid: log-scale
/// for the diagonal spectra, raw squared difference for the coherences.
struct AseReport {
  std::vector<std::string> names;  // g11..gKK, then rho2_ij for i<j
  Eigen::VectorXd values;
};
AseReport ase(const SpectralField& est, const SpectralField& truth);

/// Quantity names in the AseReport layout for a K-channel model.
std::vector<std::string> ase_quantity_names(int K);

}  // namespace bclf

#endif  // BCLF_SPECTRAL_HPP
