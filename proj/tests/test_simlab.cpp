#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>
#include <numbers>

#include "bclf/errors.hpp"
#include "bclf/simlab.hpp"

using namespace bclf;
using Catch::Approx;

TEST_CASE("generator names round trip") {
  for (const char* name : {"sim1-case1", "sim1-case4", "sim2", "wind6"})
    CHECK(to_string(generator_from_string(name)) == name);
  REQUIRE_THROWS_AS(generator_from_string("sim9"), ConfigError);
}

TEST_CASE("bivariate generator endpoint values") {
  SimSpec spec;
  spec.gen = Generator::sim1_case1;
  const SimOutput out = generate(spec);
  const int T = 1034;
  REQUIRE(out.x.length() == T);
  REQUIRE(out.x.channels() == 2);

  // At t = T: r1 = 0.95, lambda1 = 20, so Phi_1(1,1) = 0.95 cos(2 pi / 20).
  const double expected = 0.95 * std::cos(2.0 * std::numbers::pi / 20.0);
  CHECK(out.truth.phi[T - 1][0](0, 0) == Approx(expected).margin(1e-12));
  CHECK(out.truth.phi[T - 1][1](0, 0) == Approx(-0.95 * 0.95).margin(1e-12));
  CHECK(out.truth.phi[T - 1][0](0, 1) == 0.0);  // case 1 off-diagonals vanish
  CHECK(out.truth.phi[T - 1][0](1, 0) == 0.0);
  CHECK(out.truth.sigma[T - 1](0, 0) == 1.0);

  SimSpec case4 = spec;
  case4.gen = Generator::sim1_case4;
  const SimOutput out4 = generate(case4);
  CHECK(out4.truth.sigma[T - 1](0, 0) == Approx(2.0).margin(1e-12));
  CHECK(out4.truth.sigma[T - 1](0, 1) == 0.0);

  SimSpec case2 = spec;
  case2.gen = Generator::sim1_case2;
  const SimOutput out2 = generate(case2);
  CHECK(out2.truth.phi[10][0](0, 1) == Approx(-0.8).margin(1e-12));
  CHECK(out2.truth.phi[10][1](0, 1) == 0.0);

  SimSpec case3 = spec;
  case3.gen = Generator::sim1_case3;
  const SimOutput out3 = generate(case3);
  // phi_{1,1,2,t} = r3 = 0.2 t/T - 0.9 and phi_{2,1,2,t} = r4 = 0.2 t/T + 0.7.
  CHECK(out3.truth.phi[T - 1][0](0, 1) == Approx(-0.7).margin(1e-12));
  CHECK(out3.truth.phi[T - 1][1](0, 1) == Approx(0.9).margin(1e-12));
}

TEST_CASE("sigma scale knob") {
  SimSpec spec;
  spec.gen = Generator::sim1_case2;
  spec.sigma_scale = 3.0;
  const SimOutput out = generate(spec);
  CHECK(out.truth.sigma[0](0, 0) == 3.0);
  CHECK(out.truth.sigma[0](1, 1) == 3.0);
}

TEST_CASE("twenty dimensional generator layout") {
  SimSpec spec;
  spec.gen = Generator::sim2;
  const SimOutput out = generate(spec);
  REQUIRE(out.x.channels() == 20);
  REQUIRE(out.x.length() == 300);
  const Eigen::MatrixXd& phi1 = out.truth.phi[0][0];
  CHECK(phi1(0, 0) == Approx(0.7 + 0.2 / 299.0).margin(1e-12));
  CHECK(phi1(19, 19) == Approx(0.7 + 0.2 / 299.0).margin(1e-12));
  CHECK(phi1(0, 4) == 0.9);
  CHECK(phi1(1, 14) == 0.9);
  CHECK(phi1(5, 11) == -0.9);
  CHECK(phi1(14, 19) == -0.9);
  CHECK(phi1(3, 7) == 0.0);
  CHECK(out.truth.sigma[0](0, 0) == Approx(0.1).margin(1e-15));
  // Strictly upper-triangular coupling keeps the process stable.
  const Eigen::MatrixXd& last = out.truth.phi[299][0];
  CHECK(last(0, 0) == Approx(0.7 + 0.2 * 300.0 / 299.0).margin(1e-12));
}

TEST_CASE("wind-shaped generator") {
  SimSpec spec;
  spec.gen = Generator::wind6;
  spec.T = 500;  // shortened for the unit test
  const SimOutput out = generate(spec);
  REQUIRE(out.x.channels() == 6);
  REQUIRE(out.x.length() == 500);
  REQUIRE(out.truth.P == 2);
  for (int t = 0; t < 500; t += 97)
    for (int k = 0; k < 6; ++k) REQUIRE(out.truth.sigma[t](k, k) > 0.0);
}

TEST_CASE("generation is deterministic in (spec, replicate)") {
  SimSpec spec;
  spec.gen = Generator::sim1_case1;
  spec.seed = 77;
  spec.T = 300;
  const SimOutput a = generate(spec, 3);
  const SimOutput b = generate(spec, 3);
  REQUIRE(a.x.values == b.x.values);  // bit-identical
  const SimOutput c = generate(spec, 4);
  REQUIRE(a.x.values != c.x.values);
}

TEST_CASE("truth model satisfies the factorization invariants everywhere") {
  for (Generator g : {Generator::sim1_case3, Generator::sim1_case5, Generator::sim2}) {
    SimSpec spec;
    spec.gen = g;
    spec.T = g == Generator::sim2 ? 300 : 200;
    const SimOutput out = generate(spec);
    for (int t = 0; t < out.truth.T; ++t) {
      const Eigen::MatrixXd rec = out.truth.chol_l[t] *
                                  out.truth.innovation_var[t].asDiagonal() *
                                  out.truth.chol_l[t].transpose();
      REQUIRE((rec - out.truth.sigma[t]).norm() / out.truth.sigma[t].norm() < 1e-12);
      REQUIRE((out.truth.innovation_var[t].array() > 0.0).all());
    }
  }
}

TEST_CASE("generated innovations have the specified covariance") {
  // Residuals against the true coefficients recover Sigma = I within 10%
  // averaged over 50 replicates.
  SimSpec spec;
  spec.gen = Generator::sim1_case1;
  spec.seed = 5;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
  long n = 0;
  for (int r = 0; r < 50; ++r) {
    const SimOutput out = generate(spec, r);
    for (int t = 2; t < out.x.length(); ++t) {
      Eigen::VectorXd u = out.x.values.col(t);
      for (int p = 1; p <= 2; ++p)
        u -= out.truth.phi[t][p - 1] * out.x.values.col(t - p);
      cov += u * u.transpose();
      ++n;
    }
  }
  cov /= static_cast<double>(n);
  CHECK((cov - Eigen::MatrixXd::Identity(2, 2)).norm() /
            Eigen::MatrixXd::Identity(2, 2).norm() <
        0.1);
}

TEST_CASE("case 2 truth coherence matches the analytic cross-spectrum formula") {
  // Independent algebra route: explicit 2x2 inverse of Psi rather than the
  // library's LU solve.
  SimSpec spec;
  spec.gen = Generator::sim1_case2;
  spec.T = 64;
  const SimOutput out = generate(spec);
  const SpectralField field = spectral_field(out.truth, 12);
  for (int ti : {0, 31, 63})
    for (int l : {0, 5, 11}) {
      const double omega = field.freqs[l];
      Eigen::Matrix2cd psi = Eigen::Matrix2cd::Identity();
      for (int p = 1; p <= 2; ++p) {
        const std::complex<double> e =
            std::exp(std::complex<double>(0, -2.0 * std::numbers::pi * p * omega));
        psi -= e * out.truth.phi[ti][p - 1];
      }
      const std::complex<double> det = psi(0, 0) * psi(1, 1) - psi(0, 1) * psi(1, 0);
      Eigen::Matrix2cd inv;
      inv << psi(1, 1), -psi(0, 1), -psi(1, 0), psi(0, 0);
      inv /= det;
      const Eigen::Matrix2cd g = inv * out.truth.sigma[ti] * inv.adjoint();
      const double rho2 = std::norm(g(0, 1)) / (g(0, 0).real() * g(1, 1).real());
      REQUIRE(field.coherence(ti, l, 0, 1) == Approx(rho2).margin(1e-12));
    }
}

TEST_CASE("experiment summary is bit-stable and carries selection counts") {
  SimSpec spec;
  spec.gen = Generator::sim1_case1;
  spec.seed = 11;
  spec.T = 400;
  spec.replicates = 2;
  ExperimentConfig cfg;
  cfg.fit.p_max = 3;
  cfg.spectral_freqs = 24;
  cfg.threads = 2;

  const ExperimentSummary a = run_experiment(spec, cfg);
  const ExperimentSummary b = run_experiment(spec, cfg);
  REQUIRE(a.failures.empty());
  REQUIRE(a.replicates == 2);
  REQUIRE(a.selection_counts.at(Criterion::bic).size() == 3);
  int total = 0;
  for (int c : a.selection_counts.at(Criterion::bic)) total += c;
  REQUIRE(total == 2);
  REQUIRE(a.ase_names.size() == 3);
  for (std::size_t i = 0; i < a.ase.size(); ++i) {
    REQUIRE(a.ase[i].mean == b.ase[i].mean);  // identical summaries across runs
    REQUIRE(a.ase[i].sd == b.ase[i].sd);
    REQUIRE(a.ase[i].mean >= 0.0);
  }
  REQUIRE(a.mspe.has_value() == false);
}

TEST_CASE("experiment forecast mode produces an mspe summary") {
  SimSpec spec;
  spec.gen = Generator::sim1_case1;
  spec.seed = 13;
  spec.T = 400;
  spec.replicates = 2;
  ExperimentConfig cfg;
  cfg.fit.p_max = 2;
  cfg.forecast_holdout = 4;
  cfg.forecast_samples = 100;
  cfg.threads = 2;
  const ExperimentSummary s = run_experiment(spec, cfg);
  REQUIRE(s.failures.empty());
  REQUIRE(s.mspe.has_value());
  CHECK(s.mspe->n == 2);
  CHECK(s.mspe->mean > 0.0);
  CHECK(s.selection_counts.empty());
  CHECK(s.ase.empty());
}

TEST_CASE("replicate failures are recorded, not fatal") {
  SimSpec spec;
  spec.gen = Generator::sim1_case1;
  spec.T = 8;  // needs T > K*P_max + K = 8: fit throws per replicate
  spec.replicates = 2;
  ExperimentConfig cfg;
  cfg.fit.p_max = 3;
  const ExperimentSummary s = run_experiment(spec, cfg);
  REQUIRE(s.failures.size() == 2);
  CHECK(s.seconds.n == 0);
}
