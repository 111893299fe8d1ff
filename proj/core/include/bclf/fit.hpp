#ifndef BCLF_FIT_HPP
#define BCLF_FIT_HPP

#include <cstdint>
#include <vector>

#include "bclf/selection.hpp"

namespace bclf {

struct FitConfig {
  int p_max = 5;
  Criterion criterion = Criterion::bic;
  /// Also compute DIC and WAIC when the criterion itself is BIC.
  bool compute_all_criteria = false;
  std::vector<DiscountPair> grid = make_discount_grid(0.99, 1.0, 0.002);
  DlmPriors priors;
  bool auto_kappa0 = true;  // kappa0 from the initial active responses
  int kappa0_window = 40;
  int mc_samples = 500;  // S for DIC/WAIC
  std::uint64_t seed = 0;
  std::uint32_t replicate = 0;
  int threads = 1;
};

/// A fitted Bayesian circular lattice filter: all stage posteriors up to
/// P_max, the criterion table over candidate orders, and the assembled
/// TV-VAR model at the selected order.
struct BclfFit {
  int K = 0;
  int T = 0;
  int order = 0;  // selected P
  std::vector<std::vector<StageFit>> stages;  // [k][m-1], m = 1..K*P_max+k
  TvVarModel model;                           // at the selected order
  OrderReport report;
  std::vector<Eigen::MatrixXd> ar_forward;   // per channel, M_k x T at selected order
  std::vector<Eigen::MatrixXd> ar_backward;  // per channel, M_k x T at selected order
  InterlacedSeries y;                        // retained input
  FitConfig config;                          // as fitted
};

/// Master fitting routine: interlace, run the lattice to order P_max,
/// convert PARCOR to AR per candidate order, assemble candidate models,
/// score them, and keep the argmin-criterion order.
/// Requires T > K*P_max + K.
BclfFit fit(const SeriesMatrix& x, const FitConfig& cfg);

}  // namespace bclf

#endif  // BCLF_FIT_HPP
