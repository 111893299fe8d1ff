#ifndef BCLF_LATTICE_HPP
#define BCLF_LATTICE_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "bclf/dlm.hpp"
#include "bclf/periodic.hpp"
#include "bclf/series.hpp"

namespace bclf {

/// Final filtered DLM state, kept for forecasting and filter extension.
struct FilterEndState {
  double mu = 0.0;
  double C = 0.0;
  double nu = 0.0;
  double kappa = 0.0;
  double s = 0.0;
};

/// Result of one circular-lattice stage for one channel: smoothed forward
/// and backward PARCOR trajectories, their posterior spread, the stage
/// prediction errors at this channel's interlaced positions, and the
/// discount pairs selected by the per-direction grid searches.
///
/// Trajectories have length T. Timesteps before first_active have no
/// defined regressor; their smoothed values are the first defined value
/// carried backward.
struct StageFit {
  int channel = 0;  // 0-based k
  int stage = 0;    // 1-based m
  Eigen::VectorXd alpha_f, alpha_b;      // smoothed PARCOR means
  Eigen::VectorXd var_f, var_b;          // smoothed innovation variances s_{t,T}
  Eigen::VectorXd csmooth_f, csmooth_b;  // smoothed scale C_{t,T}
  Eigen::VectorXd nu_f, nu_b;            // smoothed degrees of freedom
  Eigen::VectorXd f_err, b_err;          // stage-m errors at channel positions
  DiscountPair disc;                     // forward selection
  DiscountPair disc_b;                   // backward selection
  double logpredlik = 0.0;               // forward + backward predictive log-lik
  FilterEndState end_f, end_b;
  int first_active = 0;
};

struct LatticeOptions {
  DlmPriors priors;        // kappa0 used verbatim when auto_kappa0 is false
  bool auto_kappa0 = true; // kappa0 from the first active responses per run
  int kappa0_window = 40;
  std::vector<DiscountPair> grid;
  int threads = 1;
};

/// One stage for one channel: grid-searched forward regression
/// (f^(m-1)_n on b^(m-1)_{n-1}) and backward regression (b^(m-1)_{n-1} on
/// f^(m-1)_n) over positions n = k, k+K, ..., with positions n < m+1
/// (1-based) masked inactive, followed by the error updates
///   f^(m)_n = f^(m-1)_n - alpha_f b^(m-1)_{n-1},
///   b^(m)_n = b^(m-1)_{n-1} - alpha_b f^(m-1)_n
/// evaluated at the smoothed coefficient means.
StageFit lattice_stage(const Eigen::VectorXd& prev_f, const Eigen::VectorXd& prev_b, int K,
                       int T, int k, int m, const LatticeOptions& opt);

/// Runs stages m = 1..K*P_max+k for every channel k (0-based), propagating
/// errors between stages with a stage barrier. stages[k][m-1] is channel
/// k's stage-m fit.
std::vector<std::vector<StageFit>> run_lattice(const InterlacedSeries& y, int P_max,
                                               const LatticeOptions& opt);

/// Classic pointwise Durbin-Levinson on one channel's PARCOR trajectories
/// (each M x T; row m-1 is the stage-m path), applied column by column:
///   a^(m)_j = a^(m-1)_j - a^(m)_m d^(m-1)_{m-j},
///   d^(m)_j = d^(m-1)_j - d^(m)_m a^(m-1)_{m-j}.
/// This is the stationary textbook recursion; the fitting path uses the
/// interlaced variant below, which agrees on constant trajectories.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> durbin_levinson(const Eigen::MatrixXd& alpha_f,
                                                            const Eigen::MatrixXd& alpha_b);

/// durbin_levinson on a fitted channel's smoothed PARCOR trajectories.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> parcor_to_ar(
    const std::vector<StageFit>& channel_stages, int M);

/// Order recursion on the interlaced position index: the previous-order
/// backward polynomial enters from position n-1 (the neighboring channel),
/// mirroring the lattice error updates:
///   a^(m)_j[n] = a^(m-1)_j[n] - alpha_f^(m)[n] d^(m-1)_{m-j}[n-1],
///   d^(m)_j[n] = d^(m-1)_j[n-1] - alpha_b^(m)[n] a^(m-1)_{m-j}[n].
/// alpha_f[k] / alpha_b[k] are M_k x T with M_k = M_0 + k (the periodic
/// stage layout). Positions before the start use zero polynomials; the
/// ring boundary (T = 1 only) wraps channel 0 to channel K-1 of the same
/// column, for single-time conversions at a forecast origin.
struct InterlacedAr {
  std::vector<Eigen::MatrixXd> forward;   // per channel: M_k x T
  std::vector<Eigen::MatrixXd> backward;  // per channel: M_k x T
};
enum class DlBoundary { zero, ring };
InterlacedAr interlaced_parcor_to_ar(const std::vector<Eigen::MatrixXd>& alpha_f,
                                     const std::vector<Eigen::MatrixXd>& alpha_b, int K,
                                     int T, DlBoundary boundary = DlBoundary::zero);

/// Collects the interlaced periodic coefficients at candidate order P from
/// fitted stages: AR trajectories per channel at order K*P+k, innovation
/// variances from each channel's final forward stage.
PeriodicCoefficients build_coefficients(const std::vector<std::vector<StageFit>>& stages,
                                        int K, int T, int P);

/// Timesteps (0-based) where the companion matrix of Phi_t has spectral
/// radius above 1 + tol. Purely diagnostic; nothing is enforced.
std::vector<int> unstable_timesteps(const TvVarModel& model, double tol = 1e-9);

}  // namespace bclf

#endif  // BCLF_LATTICE_HPP
