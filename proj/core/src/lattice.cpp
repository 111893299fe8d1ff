#include "bclf/lattice.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "bclf/errors.hpp"
#include "bclf/parallel.hpp"

namespace bclf {

namespace {

void extend_boundary(Eigen::VectorXd& v, int first_active) {
  for (int t = 0; t < first_active; ++t) v[t] = v[first_active];
}

}  // namespace

StageFit lattice_stage(const Eigen::VectorXd& prev_f, const Eigen::VectorXd& prev_b, int K,
                       int T, int k, int m, const LatticeOptions& opt) {
  if (prev_f.size() != static_cast<Eigen::Index>(K) * T || prev_b.size() != prev_f.size())
    throw DimensionError("lattice_stage: error arrays must have length K*T");
  if (m < 1 || k < 0 || k >= K) throw DimensionError("lattice_stage: bad stage or channel");

  // Channel-k subsequences. Position n0 = t*K + k is active when it has m
  // earlier interlaced positions, i.e. n0 >= m.
  Eigen::VectorXd resp_f(T), reg_f(T);
  ActiveMask active(T, 0);
  int first_active = T;
  for (int t = 0; t < T; ++t) {
    const Eigen::Index n0 = static_cast<Eigen::Index>(t) * K + k;
    resp_f[t] = prev_f[n0];
    reg_f[t] = n0 >= 1 ? prev_b[n0 - 1] : 0.0;
    if (n0 >= m) {
      active[t] = 1;
      if (first_active == T) first_active = t;
    }
  }
  if (first_active == T)
    throw InsufficientDataError("lattice_stage: no active timestep at stage " +
                                std::to_string(m) + " for channel " + std::to_string(k + 1));

  DlmPriors priors_f = opt.priors;
  DlmPriors priors_b = opt.priors;
  if (opt.auto_kappa0) {
    priors_f.kappa0 = initial_kappa(resp_f, active, opt.kappa0_window);
    priors_b.kappa0 = initial_kappa(reg_f, active, opt.kappa0_window);
  }

  auto [best_f, post_f] = grid_search(resp_f, reg_f, priors_f, opt.grid, active);
  // Backward regression swaps response and regressor.
  auto [best_b, post_b] = grid_search(reg_f, resp_f, priors_b, opt.grid, active);

  StageFit sf;
  sf.channel = k;
  sf.stage = m;
  sf.first_active = first_active;
  sf.disc = best_f;
  sf.disc_b = best_b;
  sf.logpredlik = post_f.logpredlik + post_b.logpredlik;
  sf.alpha_f = post_f.mu_s;
  sf.var_f = post_f.s_s;
  sf.csmooth_f = post_f.C_s;
  sf.nu_f = post_f.nu_s;
  sf.alpha_b = post_b.mu_s;
  sf.var_b = post_b.s_s;
  sf.csmooth_b = post_b.C_s;
  sf.nu_b = post_b.nu_s;
  for (Eigen::VectorXd* v : {&sf.alpha_f, &sf.var_f, &sf.csmooth_f, &sf.nu_f, &sf.alpha_b,
                             &sf.var_b, &sf.csmooth_b, &sf.nu_b})
    extend_boundary(*v, first_active);
  const Eigen::Index last = static_cast<Eigen::Index>(T) - 1;
  sf.end_f = {post_f.mu[last], post_f.C[last], post_f.nu[last], post_f.kappa[last],
              post_f.s[last]};
  sf.end_b = {post_b.mu[last], post_b.C[last], post_b.nu[last], post_b.kappa[last],
              post_b.s[last]};

  sf.f_err.resize(T);
  sf.b_err.resize(T);
  for (int t = 0; t < T; ++t) {
    const double reg = reg_f[t];  // b^(m-1)_{n-1}, zero-extended at n0 = 0
    sf.f_err[t] = resp_f[t] - sf.alpha_f[t] * reg;
    sf.b_err[t] = reg - sf.alpha_b[t] * resp_f[t];
  }
  return sf;
}

std::vector<std::vector<StageFit>> run_lattice(const InterlacedSeries& y, int P_max,
                                               const LatticeOptions& opt) {
  if (P_max < 1) throw ConfigError("run_lattice: P_max must be at least 1");
  const int K = y.K;
  const int T = y.T;
  std::vector<std::vector<StageFit>> stages(K);
  for (int k = 0; k < K; ++k) stages[k].reserve(K * P_max + k);

  Eigen::VectorXd f_prev = y.y;
  Eigen::VectorXd b_prev = y.y;
  Eigen::VectorXd f_next(y.y.size()), b_next(y.y.size());

  const int max_stage = K * P_max + K - 1;  // channel K-1 runs the longest
  for (int m = 1; m <= max_stage; ++m) {
    f_next = f_prev;
    b_next = b_prev;
    std::vector<int> todo;
    for (int k = 0; k < K; ++k)
      if (m <= K * P_max + k) todo.push_back(k);

    std::vector<StageFit> fits(todo.size());
    parallel_for(todo.size(), opt.threads, [&](std::size_t i) {
      fits[i] = lattice_stage(f_prev, b_prev, K, T, todo[i], m, opt);
    });

    for (std::size_t i = 0; i < todo.size(); ++i) {
      const int k = todo[i];
      for (int t = 0; t < T; ++t) {
        const Eigen::Index n0 = static_cast<Eigen::Index>(t) * K + k;
        f_next[n0] = fits[i].f_err[t];
        b_next[n0] = fits[i].b_err[t];
      }
      stages[k].push_back(std::move(fits[i]));
    }
    std::swap(f_prev, f_next);
    std::swap(b_prev, b_next);
  }
  return stages;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> durbin_levinson(const Eigen::MatrixXd& alpha_f,
                                                            const Eigen::MatrixXd& alpha_b) {
  const int M = static_cast<int>(alpha_f.rows());
  const Eigen::Index T = alpha_f.cols();
  if (alpha_b.rows() != M || alpha_b.cols() != T)
    throw DimensionError("durbin_levinson: trajectory shapes differ");
  Eigen::MatrixXd a(M, T), d(M, T);
  Eigen::VectorXd a_prev(M), d_prev(M), a_cur(M), d_cur(M);
  for (Eigen::Index t = 0; t < T; ++t) {
    for (int m = 1; m <= M; ++m) {
      const double am = alpha_f(m - 1, t);
      const double dm = alpha_b(m - 1, t);
      for (int j = 1; j < m; ++j) {
        a_cur[j - 1] = a_prev[j - 1] - am * d_prev[m - j - 1];
        d_cur[j - 1] = d_prev[j - 1] - dm * a_prev[m - j - 1];
      }
      a_cur[m - 1] = am;
      d_cur[m - 1] = dm;
      std::swap(a_prev, a_cur);
      std::swap(d_prev, d_cur);
    }
    a.col(t) = a_prev.head(M);
    d.col(t) = d_prev.head(M);
  }
  return {std::move(a), std::move(d)};
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> parcor_to_ar(
    const std::vector<StageFit>& channel_stages, int M) {
  if (M < 1 || static_cast<int>(channel_stages.size()) < M)
    throw DimensionError("parcor_to_ar: need at least M fitted stages");
  const Eigen::Index T = channel_stages[0].alpha_f.size();
  Eigen::MatrixXd af(M, T), ab(M, T);
  for (int m = 0; m < M; ++m) {
    af.row(m) = channel_stages[m].alpha_f;
    ab.row(m) = channel_stages[m].alpha_b;
  }
  return durbin_levinson(af, ab);
}

InterlacedAr interlaced_parcor_to_ar(const std::vector<Eigen::MatrixXd>& alpha_f,
                                     const std::vector<Eigen::MatrixXd>& alpha_b, int K,
                                     int T, DlBoundary boundary) {
  if (static_cast<int>(alpha_f.size()) != K || static_cast<int>(alpha_b.size()) != K)
    throw DimensionError("interlaced_parcor_to_ar: need one trajectory block per channel");
  if (boundary == DlBoundary::ring && T != 1)
    throw DimensionError("interlaced_parcor_to_ar: ring boundary requires T = 1");
  const int base = static_cast<int>(alpha_f[0].rows());
  int max_m = 0;
  for (int k = 0; k < K; ++k) {
    if (alpha_f[k].rows() != base + k || alpha_b[k].rows() != base + k ||
        alpha_f[k].cols() != T || alpha_b[k].cols() != T)
      throw DimensionError("interlaced_parcor_to_ar: channel " + std::to_string(k + 1) +
                           " trajectories must be (M_0 + k) x T");
    max_m = std::max(max_m, base + k);
  }

  const Eigen::Index n_pos = static_cast<Eigen::Index>(K) * T;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_pos, max_m);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n_pos, max_m);
  Eigen::MatrixXd d_prev_ring;  // previous-stage d rows for the ring boundary
  Eigen::VectorXd a_old(max_m), d_old(max_m);

  InterlacedAr out;
  out.forward.resize(K);
  out.backward.resize(K);
  for (int k = 0; k < K; ++k) {
    out.forward[k].resize(base + k, T);
    out.backward[k].resize(base + k, T);
  }

  for (int m = 1; m <= max_m; ++m) {
    if (boundary == DlBoundary::ring) d_prev_ring = d;
    // Descending position order keeps d.row(n-1) at the previous stage
    // while updating in place.
    for (Eigen::Index n = n_pos - 1; n >= 0; --n) {
      const int k = static_cast<int>(n % K);
      const int t = static_cast<int>(n / K);
      const int mk = base + k;
      if (m > mk) continue;
      const double af = alpha_f[k](m - 1, t);
      const double ab = alpha_b[k](m - 1, t);
      a_old.head(m - 1) = a.row(n).head(m - 1);
      if (n >= 1)
        d_old.head(m - 1) = d.row(n - 1).head(m - 1);
      else if (boundary == DlBoundary::ring)
        d_old.head(m - 1) = d_prev_ring.row(n_pos - 1).head(m - 1);
      else
        d_old.head(m - 1).setZero();
      for (int j = 1; j < m; ++j) {
        a(n, j - 1) = a_old[j - 1] - af * d_old[m - j - 1];
        d(n, j - 1) = d_old[j - 1] - ab * a_old[m - j - 1];
      }
      a(n, m - 1) = af;
      d(n, m - 1) = ab;
    }
    for (int k = 0; k < K; ++k) {
      if (base + k != m) continue;  // channel k finishes at this stage
      for (int t = 0; t < T; ++t) {
        const Eigen::Index n = static_cast<Eigen::Index>(t) * K + k;
        out.forward[k].col(t) = a.row(n).head(m);
        out.backward[k].col(t) = d.row(n).head(m);
      }
    }
  }
  return out;
}

namespace {

std::vector<Eigen::MatrixXd> gather_alpha(const std::vector<std::vector<StageFit>>& stages,
                                          int K, int T, int P, bool forward) {
  std::vector<Eigen::MatrixXd> alpha(K);
  for (int k = 0; k < K; ++k) {
    const int M = K * P + k;
    if (static_cast<int>(stages[k].size()) < M)
      throw DimensionError("channel " + std::to_string(k + 1) +
                           " has fewer than M_k fitted stages");
    alpha[k].resize(M, T);
    for (int m = 0; m < M; ++m)
      alpha[k].row(m) = forward ? stages[k][m].alpha_f : stages[k][m].alpha_b;
  }
  return alpha;
}

}  // namespace

PeriodicCoefficients build_coefficients(const std::vector<std::vector<StageFit>>& stages,
                                        int K, int T, int P) {
  PeriodicCoefficients coeffs;
  coeffs.K = K;
  coeffs.T = T;
  coeffs.P = P;
  coeffs.coeff = interlaced_parcor_to_ar(gather_alpha(stages, K, T, P, true),
                                         gather_alpha(stages, K, T, P, false), K, T)
                     .forward;
  coeffs.variance.resize(K);
  for (int k = 0; k < K; ++k) coeffs.variance[k] = stages[k][K * P + k - 1].var_f;
  return coeffs;
}

std::vector<int> unstable_timesteps(const TvVarModel& model, double tol) {
  const int K = model.K;
  const int P = model.P;
  const Eigen::Index dim = static_cast<Eigen::Index>(K) * P;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(dim, dim);
  if (P > 1) companion.block(K, 0, dim - K, dim - K).setIdentity();
  std::vector<int> out;
  for (int t = 0; t < model.T; ++t) {
    for (int p = 0; p < P; ++p) companion.block(0, p * K, K, K) = model.phi[t][p];
    const double radius = companion.eigenvalues().cwiseAbs().maxCoeff();
    if (radius > 1.0 + tol) out.push_back(t);
  }
  return out;
}

}  // namespace bclf
