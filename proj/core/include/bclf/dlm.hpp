#ifndef BCLF_DLM_HPP
#define BCLF_DLM_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace bclf {

/// Discount factors in (0, 1]: gamma drives the coefficient random walk,
/// delta the multiplicative variance walk. 1 means a static parameter.
struct DiscountPair {
  double gamma = 1.0;
  double delta = 1.0;
};

/// Conjugate initial state at t = 0: alpha ~ N(mu0, c0) (scaled by s),
/// sigma^-2 ~ Gamma(nu0/2, kappa0/2).
struct DlmPriors {
  double mu0 = 0.0;
  double c0 = 1.0;
  double nu0 = 1.0;
  double kappa0 = 1.0;
};

/// Timesteps where the regressor is undefined are inactive: the state
/// evolves by discount only and contributes no likelihood.
using ActiveMask = std::vector<std::uint8_t>;

/// Filtered and (optionally) smoothed scalar discount-DLM state paths.
struct DlmPosterior {
  Eigen::VectorXd mu, C, nu, kappa, s;  // filtered, length N
  Eigen::VectorXd e, q, z, R, G;        // one-step diagnostics (0 where inactive)
  Eigen::VectorXd mu_s, C_s, nu_s, s_s;  // smoothed, filled by dlm_smooth
  double logpredlik = 0.0;               // sum of one-step log predictive densities
  bool smoothed = false;

  Eigen::Index size() const { return mu.size(); }
};

/// Sequential filtering of response_t = F_t * alpha_t + noise with
/// discounted state evolution. For each active t:
///   R_t = C_{t-1}/gamma,  q_t = F_t^2 R_t + s_{t-1},  e_t = y_t - F_t mu_{t-1},
///   z_t = R_t F_t / q_t,  mu_t = mu_{t-1} + z_t e_t,
///   nu_t = delta nu_{t-1} + 1,  kappa_t = delta kappa_{t-1} + s_{t-1} e_t^2 / q_t,
///   C_t = (R_t - z_t^2 q_t) (s_t / s_{t-1}),
/// and the one-step predictive is Student-t with nu_{t-1} df and scale q_t.
/// Throws FilterDivergenceError (naming t, 1-based) when q_t or C_t is
/// non-positive or non-finite.
DlmPosterior dlm_filter(const Eigen::Ref<const Eigen::VectorXd>& response,
                        const Eigen::Ref<const Eigen::VectorXd>& regressor,
                        const DlmPriors& priors, const DiscountPair& disc,
                        const ActiveMask& active);

/// Likelihood-only filtering pass; same recursion and divergence behavior
/// as dlm_filter without materializing the state paths.
double dlm_logpredlik(const Eigen::Ref<const Eigen::VectorXd>& response,
                      const Eigen::Ref<const Eigen::VectorXd>& regressor,
                      const DlmPriors& priors, const DiscountPair& disc,
                      const ActiveMask& active);

/// Backward smoothing anchored at the final filtered state:
///   mu_{t,N} = (1-g) mu_t + g mu_{t+1,N}
///   nu_{t,N} = (1-d) nu_t + d nu_{t+1,N}
///   1/s_{t,N} = (1-d)/s_t + d/s_{t+1,N}
///   C_{t,N} = (1-g) C_t (s_{t,N}/s_t) + g^2 C_{t+1,N}
/// Fills the *_s fields in place. Throws StateError before filtering.
void dlm_smooth(DlmPosterior& post, const DiscountPair& disc);

/// Evaluates every pair on the one-step predictive likelihood and returns
/// the winner (ties break toward larger gamma, then larger delta) with its
/// filtered + smoothed posterior. Pairs that diverge are skipped; if all of
/// them diverge a GridSearchError is thrown.
std::pair<DiscountPair, DlmPosterior> grid_search(
    const Eigen::Ref<const Eigen::VectorXd>& response,
    const Eigen::Ref<const Eigen::VectorXd>& regressor, const DlmPriors& priors,
    const std::vector<DiscountPair>& grid, const ActiveMask& active);

/// Cross product {gammas} x {deltas} from an inclusive range with step.
std::vector<DiscountPair> make_discount_grid(double lo, double hi, double step);

/// Sample variance of the first min(window, #active) active responses,
/// floored away from zero; the conventional data-driven kappa0.
double initial_kappa(const Eigen::Ref<const Eigen::VectorXd>& response,
                     const ActiveMask& active, int window);

}  // namespace bclf

#endif  // BCLF_DLM_HPP
