#include "bclf/dlm.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bclf/errors.hpp"

namespace bclf {

namespace {

void check_inputs(const Eigen::Ref<const Eigen::VectorXd>& response,
                  const Eigen::Ref<const Eigen::VectorXd>& regressor,
                  const DlmPriors& priors, const DiscountPair& disc, const ActiveMask& active) {
  if (response.size() != regressor.size() ||
      static_cast<Eigen::Index>(active.size()) != response.size())
    throw DimensionError("dlm: response, regressor and mask lengths differ");
  if (!(disc.gamma > 0.0 && disc.gamma <= 1.0 && disc.delta > 0.0 && disc.delta <= 1.0))
    throw DomainError("dlm: discount factors must lie in (0, 1]");
  if (!(priors.c0 > 0.0 && priors.nu0 > 0.0 && priors.kappa0 > 0.0))
    throw DomainError("dlm: priors require c0, nu0, kappa0 > 0");
}

[[noreturn]] void diverged(Eigen::Index t, const char* what) {
  throw FilterDivergenceError(
      "dlm filter diverged at t=" + std::to_string(t + 1) + " (" + what + ")",
      static_cast<long>(t + 1));
}

// log density of a Student-t with dof degrees of freedom, location 0 and
// scale (variance-like) q, evaluated at e. lg_term caches the dof-only part
// lgamma((dof+1)/2) - lgamma(dof/2) - 0.5*log(dof*pi).
inline double student_t_logpdf(double e, double dof, double q, double lg_term) {
  return lg_term - 0.5 * std::log(q) - 0.5 * (dof + 1.0) * std::log1p(e * e / (dof * q));
}

inline double dof_term(double dof) {
  return std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
         0.5 * std::log(dof * std::numbers::pi);
}

}  // namespace

DlmPosterior dlm_filter(const Eigen::Ref<const Eigen::VectorXd>& response,
                        const Eigen::Ref<const Eigen::VectorXd>& regressor,
                        const DlmPriors& priors, const DiscountPair& disc,
                        const ActiveMask& active) {
  check_inputs(response, regressor, priors, disc, active);
  const Eigen::Index N = response.size();
  DlmPosterior out;
  out.mu.resize(N);
  out.C.resize(N);
  out.nu.resize(N);
  out.kappa.resize(N);
  out.s.resize(N);
  out.e.setZero(N);
  out.q.setZero(N);
  out.z.setZero(N);
  out.R.setZero(N);
  out.G.setZero(N);

  const double gamma = disc.gamma;
  const double delta = disc.delta;
  double mu = priors.mu0;
  double C = priors.c0;
  double nu = priors.nu0;
  double kappa = priors.kappa0;
  double s = kappa / nu;
  double logpredlik = 0.0;

  for (Eigen::Index t = 0; t < N; ++t) {
    const double G = C * (1.0 - gamma) / gamma;
    const double R = C + G;
    if (active[t]) {
      const double F = regressor[t];
      const double q = F * F * R + s;
      if (!(q > 0.0) || !std::isfinite(q)) diverged(t, "q non-positive");
      const double e = response[t] - F * mu;
      const double z = R * F / q;
      logpredlik += student_t_logpdf(e, nu, q, dof_term(nu));
      const double nu_new = delta * nu + 1.0;
      const double kappa_new = delta * kappa + s * e * e / q;
      const double s_new = kappa_new / nu_new;
      const double C_new = (R - z * z * q) * (s_new / s);
      if (!(C_new > 0.0) || !std::isfinite(C_new)) diverged(t, "C non-positive");
      mu += z * e;
      C = C_new;
      nu = nu_new;
      kappa = kappa_new;
      s = s_new;
      out.e[t] = e;
      out.q[t] = q;
      out.z[t] = z;
    } else {
      // Missing regressor: evolve by discount only.
      C = R;
      nu = delta * nu;
      kappa = delta * kappa;
    }
    out.R[t] = R;
    out.G[t] = G;
    out.mu[t] = mu;
    out.C[t] = C;
    out.nu[t] = nu;
    out.kappa[t] = kappa;
    out.s[t] = s;
  }
  out.logpredlik = logpredlik;
  return out;
}

double dlm_logpredlik(const Eigen::Ref<const Eigen::VectorXd>& response,
                      const Eigen::Ref<const Eigen::VectorXd>& regressor,
                      const DlmPriors& priors, const DiscountPair& disc,
                      const ActiveMask& active) {
  check_inputs(response, regressor, priors, disc, active);
  const Eigen::Index N = response.size();
  const double gamma = disc.gamma;
  const double delta = disc.delta;
  double mu = priors.mu0;
  double C = priors.c0;
  double nu = priors.nu0;
  double kappa = priors.kappa0;
  double s = kappa / nu;
  double logpredlik = 0.0;
  for (Eigen::Index t = 0; t < N; ++t) {
    const double R = C / gamma;
    if (!active[t]) {
      C = R;
      nu = delta * nu;
      kappa = delta * kappa;
      continue;
    }
    const double F = regressor[t];
    const double q = F * F * R + s;
    if (!(q > 0.0) || !std::isfinite(q)) diverged(t, "q non-positive");
    const double e = response[t] - F * mu;
    const double z = R * F / q;
    logpredlik += student_t_logpdf(e, nu, q, dof_term(nu));
    const double nu_new = delta * nu + 1.0;
    const double kappa_new = delta * kappa + s * e * e / q;
    const double s_new = kappa_new / nu_new;
    const double C_new = (R - z * z * q) * (s_new / s);
    if (!(C_new > 0.0) || !std::isfinite(C_new)) diverged(t, "C non-positive");
    mu += z * e;
    C = C_new;
    nu = nu_new;
    kappa = kappa_new;
    s = s_new;
  }
  return logpredlik;
}

void dlm_smooth(DlmPosterior& post, const DiscountPair& disc) {
  const Eigen::Index N = post.size();
  if (N == 0) throw StateError("dlm_smooth: filtering has not been run");
  const double g = disc.gamma;
  const double d = disc.delta;
  post.mu_s.resize(N);
  post.C_s.resize(N);
  post.nu_s.resize(N);
  post.s_s.resize(N);
  post.mu_s[N - 1] = post.mu[N - 1];
  post.C_s[N - 1] = post.C[N - 1];
  post.nu_s[N - 1] = post.nu[N - 1];
  post.s_s[N - 1] = post.s[N - 1];
  for (Eigen::Index t = N - 2; t >= 0; --t) {
    post.mu_s[t] = (1.0 - g) * post.mu[t] + g * post.mu_s[t + 1];
    post.nu_s[t] = (1.0 - d) * post.nu[t] + d * post.nu_s[t + 1];
    post.s_s[t] = 1.0 / ((1.0 - d) / post.s[t] + d / post.s_s[t + 1]);
    // The filtered C_t lives on the s_t scale while C_{t+1,N} is already on
    // the smoothed scale, so only the filtered term is rescaled. With
    // g = d = 1 this fixes C_{t,N} = C_N, the static-parameter posterior.
    post.C_s[t] =
        (1.0 - g) * post.C[t] * (post.s_s[t] / post.s[t]) + g * g * post.C_s[t + 1];
  }
  post.smoothed = true;
}

namespace {

// The Student-t dof term of the predictive density depends on t only
// through nu_{t-1}, whose path is a function of delta alone (given the
// prior and mask). Caching it per distinct delta removes the two lgamma
// calls per step from the grid-search inner loop.
std::vector<double> dof_terms_for_delta(double delta, double nu0, const ActiveMask& active) {
  std::vector<double> terms;
  double nu = nu0;
  for (std::uint8_t a : active) {
    if (a) {
      terms.push_back(dof_term(nu));
      nu = delta * nu + 1.0;
    } else {
      nu = delta * nu;
    }
  }
  return terms;
}

double logpredlik_cached(const Eigen::Ref<const Eigen::VectorXd>& response,
                         const Eigen::Ref<const Eigen::VectorXd>& regressor,
                         const DlmPriors& priors, const DiscountPair& disc,
                         const ActiveMask& active, const std::vector<double>& dof_terms) {
  const Eigen::Index N = response.size();
  const double gamma = disc.gamma;
  const double delta = disc.delta;
  double mu = priors.mu0;
  double C = priors.c0;
  double nu = priors.nu0;
  double kappa = priors.kappa0;
  double s = kappa / nu;
  double logpredlik = 0.0;
  std::size_t term_index = 0;
  for (Eigen::Index t = 0; t < N; ++t) {
    const double R = C / gamma;
    if (!active[t]) {
      C = R;
      nu = delta * nu;
      kappa = delta * kappa;
      continue;
    }
    const double F = regressor[t];
    const double q = F * F * R + s;
    if (!(q > 0.0) || !std::isfinite(q)) diverged(t, "q non-positive");
    const double e = response[t] - F * mu;
    const double z = R * F / q;
    logpredlik += student_t_logpdf(e, nu, q, dof_terms[term_index++]);
    const double nu_new = delta * nu + 1.0;
    const double kappa_new = delta * kappa + s * e * e / q;
    const double s_new = kappa_new / nu_new;
    const double C_new = (R - z * z * q) * (s_new / s);
    if (!(C_new > 0.0) || !std::isfinite(C_new)) diverged(t, "C non-positive");
    mu += z * e;
    C = C_new;
    nu = nu_new;
    kappa = kappa_new;
    s = s_new;
  }
  return logpredlik;
}

}  // namespace

std::pair<DiscountPair, DlmPosterior> grid_search(
    const Eigen::Ref<const Eigen::VectorXd>& response,
    const Eigen::Ref<const Eigen::VectorXd>& regressor, const DlmPriors& priors,
    const std::vector<DiscountPair>& grid, const ActiveMask& active) {
  if (grid.empty()) throw ConfigError("grid_search: empty discount grid");
  check_inputs(response, regressor, priors, grid.front(), active);
  std::vector<std::pair<double, std::vector<double>>> term_cache;
  term_cache.reserve(grid.size());  // stable references below
  auto terms_for = [&](double delta) -> const std::vector<double>& {
    for (const auto& [d, terms] : term_cache)
      if (d == delta) return terms;
    term_cache.emplace_back(delta, dof_terms_for_delta(delta, priors.nu0, active));
    return term_cache.back().second;
  };
  double best_ll = -std::numeric_limits<double>::infinity();
  const DiscountPair* best = nullptr;
  std::string last_error = "no pairs evaluated";
  for (const auto& pair : grid) {
    if (!(pair.gamma > 0.0 && pair.gamma <= 1.0 && pair.delta > 0.0 && pair.delta <= 1.0))
      throw DomainError("grid_search: discount factors must lie in (0, 1]");
    double ll;
    try {
      ll = logpredlik_cached(response, regressor, priors, pair, active, terms_for(pair.delta));
    } catch (const FilterDivergenceError& err) {
      last_error = err.what();
      continue;
    }
    const bool better =
        best == nullptr || ll > best_ll ||
        (ll == best_ll && (pair.gamma > best->gamma ||
                           (pair.gamma == best->gamma && pair.delta > best->delta)));
    if (better) {
      best_ll = ll;
      best = &pair;
    }
  }
  if (best == nullptr)
    throw GridSearchError("grid_search: every discount pair diverged; last: " + last_error);
  DlmPosterior post = dlm_filter(response, regressor, priors, *best, active);
  dlm_smooth(post, *best);
  return {*best, std::move(post)};
}

std::vector<DiscountPair> make_discount_grid(double lo, double hi, double step) {
  if (!(lo > 0.0 && lo <= hi && hi <= 1.0 && step > 0.0))
    throw ConfigError("make_discount_grid: need 0 < lo <= hi <= 1 and step > 0");
  std::vector<double> values;
  for (double v = lo; v <= hi + 1e-12; v += step) values.push_back(std::min(v, 1.0));
  std::vector<DiscountPair> grid;
  grid.reserve(values.size() * values.size());
  for (double g : values)
    for (double d : values) grid.push_back({g, d});
  return grid;
}

double initial_kappa(const Eigen::Ref<const Eigen::VectorXd>& response,
                     const ActiveMask& active, int window) {
  double sum = 0.0, sumsq = 0.0;
  int n = 0;
  for (Eigen::Index t = 0; t < response.size() && n < window; ++t) {
    if (!active[t]) continue;
    sum += response[t];
    sumsq += response[t] * response[t];
    ++n;
  }
  if (n < 2) return 1.0;
  const double var = (sumsq - sum * sum / n) / (n - 1);
  return std::max(var, 1e-12);
}

}  // namespace bclf
