#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rotnum/random.hpp"
#include "rotnum/random_composition.hpp"
#include "rotnum/sampling.hpp"

using namespace rotnum;

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

Eigen::Matrix2d J() { return (Eigen::Matrix2d() << 0, -1, 1, 0).finished(); }

DeterministicSpec rotation_flow(double rate) { return DeterministicSpec{rate * kTau * J()}; }

}  // namespace

TEST(SampleMatrices, AutonomousFlowRepeatsExponential) {
  const Eigen::Matrix2d A = (Eigen::Matrix2d() << 0.2, -1.0, 3.0, -0.5).finished();
  const auto mats = sample_matrices(DeterministicSpec{A}, 0.3, 10, 0);
  ASSERT_EQ(mats.size(), 10u);
  const Eigen::Matrix2d E = flow_deterministic(A, 0.3).matrix();
  for (const Mat2& g : mats) EXPECT_LT((g.matrix() - E).norm(), 1e-12 * E.norm());
}

TEST(SampleMatrices, BrownianRotationWindows) {
  IntegrationConfig cfg;
  cfg.dt = 1e-3;
  cfg.seed = 13;
  const double T = 0.05;
  const auto mats = sample_matrices(brownian_rotation_spec(), T, 40, cfg);
  const BrownianPath path(cfg.seed, cfg.stream, cfg.dt);
  for (std::size_t k = 0; k < mats.size(); ++k) {
    double dW = 0.0;
    for (std::size_t j = 0; j < 50; ++j) dW += path.increment(0, 50 * k + j, 0);
    const Eigen::Matrix2d R = Mat2::rotation(T + dW).matrix();
    ASSERT_LT((mats[k].matrix() - R).norm(), 1e-9) << k;
  }
}

TEST(SampleMatrices, RejectsEmptyRequests) {
  EXPECT_THROW(sample_matrices(rotation_flow(1.0), 0.1, 0, 0), std::invalid_argument);
  EXPECT_THROW(sample_matrices(rotation_flow(1.0), 0.0, 5, 0), std::invalid_argument);
}

TEST(SampleMatrices, WindowProductIsFullFlow) {
  const SdeSpec spec{(Eigen::Matrix2d() << 0.1, -3.0, 2.0, 0.0).finished(),
                     {(Eigen::Matrix2d() << 0.4, 0.2, -0.3, -0.4).finished()}};
  IntegrationConfig cfg;
  cfg.seed = 21;
  const auto mats = sample_matrices(spec, 0.1, 20, cfg);
  Eigen::Matrix2d prod = Eigen::Matrix2d::Identity();
  for (const Mat2& g : mats) prod = g.matrix() * prod;
  const Eigen::Matrix2d full = integrate(spec, 2.0, cfg).matrices.back().matrix();
  EXPECT_LT((prod - full).norm(), 1e-9 * full.norm());
}

TEST(SampledRotation, Examples) {
  EXPECT_NEAR(sampled_rotation_number(std::vector<Mat2>(1000, Mat2::rotation(0.1))).value, 0.1,
              1e-12);
  const auto mats = sample_matrices(rotation_flow(1.0), 0.2, 1000, 0);
  EXPECT_NEAR(sampled_rotation_number(mats).value, 0.2, 1e-12);
  EXPECT_THROW(sampled_rotation_number(std::vector<Mat2>{}), std::invalid_argument);
}

TEST(SampledRotation, TriangularWindows) {
  IidMatrixSampler s = triangular_sampler(0.5);
  std::vector<std::vector<Mat2>> seqs(32);
  for (std::size_t r = 0; r < seqs.size(); ++r) {
    s.reset(replica_seed(4, r));
    for (int i = 0; i < 5000; ++i) seqs[r].push_back(s.next());
  }
  const RotationEstimate est = sampled_rotation_number(seqs);
  EXPECT_NEAR(est.value, 0.25, 3.0 * est.std_error);
}

TEST(ConvergenceStudy, DeterministicRotationIsExact) {
  SamplingStudy study;
  study.spec = rotation_flow(0.3);
  study.T_grid = {1.0, 0.5, 0.25, 0.1};
  study.steps_per_T = 200;
  study.replicas = 2;
  const StudyTable table = convergence_study(study);
  for (const StudyRow& row : table.rows) EXPECT_NEAR(row.rho_over_T, 0.3, 1e-12) << row.T;
  EXPECT_NEAR(table.rho_cont.value, 0.3, 1e-12);
  EXPECT_TRUE(table.monotone);
}

TEST(ConvergenceStudy, ZeroCocycle) {
  SamplingStudy study;
  study.spec = DeterministicSpec{};
  study.T_grid = {0.5, 0.1};
  study.steps_per_T = 50;
  study.replicas = 2;
  for (const StudyRow& row : convergence_study(study).rows) EXPECT_EQ(row.rho_over_T, 0.0);
}

TEST(ConvergenceStudy, BrownianRotationApproachesOne) {
  SamplingStudy study;
  study.spec = brownian_rotation_spec();
  study.T_grid = {0.5, 0.25, 0.1, 0.05, 0.02};
  study.steps_per_T = 25000;
  study.replicas = 16;
  study.seed = 5;
  const StudyTable table = convergence_study(study);
  for (const StudyRow& row : table.rows) {
    // The exact mean sits below one; the estimate only within its error.
    EXPECT_LT(wrapped_gaussian_mean(row.T, row.T) / row.T, 1.0) << row.T;
    EXPECT_LT(row.rho_over_T, 1.0 + 3.0 * row.std_error) << row.T;
    EXPECT_NEAR(row.rho_over_T, wrapped_gaussian_mean(row.T, row.T) / row.T,
                4.0 * row.std_error) << row.T;
  }
  EXPECT_TRUE(table.monotone);
}

TEST(ConvergenceStudy, RealNoiseMonotone) {
  SamplingStudy study;
  study.spec = quasi_periodic_noise((Eigen::Matrix2d() << 0.0, -4.0, 3.0, 0.2).finished(),
                                    (Eigen::Matrix2d() << 0.0, -2.0, 2.0, 0.0).finished(), 0.37);
  study.T_grid = {0.8, 0.4, 0.2, 0.1};
  study.steps_per_T = 2000;
  study.replicas = 8;
  const StudyTable table = convergence_study(study);
  EXPECT_TRUE(table.monotone);
  EXPECT_NEAR(table.rows.back().rho_over_T, table.rho_cont.value, 0.01);
}

TEST(ConvergenceStudy, RejectsMisalignedGrid) {
  SamplingStudy study;
  study.spec = rotation_flow(1.0);
  study.T_grid = {0.1, 0.0505};
  study.integration.dt = 0.01;
  study.steps_per_T = 10;
  EXPECT_THROW(convergence_study(study), std::invalid_argument);
}

TEST(Nyquist, Examples) {
  const Eigen::Matrix2d A = kTau * J();
  const NyquistResult below = nyquist_check(A, 0.4);
  EXPECT_TRUE(below.exact);
  EXPECT_NEAR(below.rho_T_over_T, 1.0, 1e-12);
  const NyquistResult above = nyquist_check(A, 0.75);
  EXPECT_FALSE(above.exact);
  EXPECT_NEAR(above.rho_T, -0.25, 1e-12);
  EXPECT_NEAR(above.rho_T_over_T, -1.0 / 3.0, 1e-12);
  const NyquistResult real = nyquist_check((Eigen::Matrix2d() << 1, 2, 3, -1).finished(), 5.0);
  EXPECT_TRUE(real.exact);
  EXPECT_EQ(real.rho_T, 0.0);
  EXPECT_EQ(real.rho_cont, 0.0);
}

TEST(Nyquist, RandomComplexGenerators) {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> z(0.0, 3.0);
  std::uniform_real_distribution<double> frac(0.01, 0.99);
  int checked = 0;
  while (checked < 100) {
    Eigen::Matrix2d A;
    A << z(rng), z(rng), z(rng), z(rng);
    const double rho = flow_rotation_rate(A);
    if (rho == 0.0) continue;
    const double T = frac(rng) / (2.0 * std::abs(rho));
    const NyquistResult r = nyquist_check(A, T);
    EXPECT_TRUE(r.exact) << A << " T=" << T << " defect=" << r.rho_T_over_T - rho;
    ++checked;
  }
}

TEST(WrappedGaussian, ClosedFormMatchesQuadrature) {
  for (double T : {0.5, 0.25, 0.1, 0.05, 0.02, 1.7}) {
    EXPECT_NEAR(wrapped_gaussian_mean(T, T), oracle::wrapped_gaussian_mean_simpson(T, T), 1e-12)
        << T;
  }
  EXPECT_NEAR(wrapped_gaussian_mean(0.3, 0.0), 0.3, 1e-15);
}

TEST(WrappedGaussian, PeriodMeans) {
  // E[wrap(T + Z)] with Var Z = T.
  EXPECT_NEAR(wrapped_gaussian_mean(0.02, 0.02), 0.0197738, 1e-6);
  EXPECT_NEAR(wrapped_gaussian_mean(0.1, 0.1), 0.0259336, 1e-6);
  EXPECT_NEAR(wrapped_gaussian_mean(0.25, 0.25), 0.0022892, 1e-6);
  EXPECT_NEAR(wrapped_gaussian_mean(0.5, 0.5), 0.0, 1e-15);
}

TEST(WrappedGaussian, CdfMatchesQuadrature) {
  const double mu = 0.1, var = 0.1, sigma = std::sqrt(var);
  for (double y : {-0.4, -0.1, 0.0, 0.2, 0.5}) {
    // Density of the wrapped law integrated by the trapezoid rule.
    double s = 0.0;
    const int n = 20000;
    for (int i = 0; i <= n; ++i) {
      const double x = -0.5 + (y + 0.5) * i / n;
      double d = 0.0;
      for (int k = -10; k <= 10; ++k) {
        const double z = (x + k - mu) / sigma;
        d += std::exp(-0.5 * z * z) / (sigma * std::sqrt(kTau));
      }
      s += (i == 0 || i == n ? 0.5 : 1.0) * d;
    }
    s *= (y + 0.5) / n;
    EXPECT_NEAR(wrapped_gaussian_cdf(y, mu, var), s, 1e-8) << y;
  }
  EXPECT_NEAR(wrapped_gaussian_cdf(0.5, mu, var), 1.0, 1e-14);
}

TEST(BetaSamples, DeterministicRotation) {
  IntegrationConfig cfg;
  const BetaSamples b = beta_T_samples(rotation_flow(1.0), 0.1, 100, cfg);
  for (double v : b.samples) EXPECT_NEAR(v, 0.1, 1e-12);
  EXPECT_NEAR(b.stats.mean, 0.1, 1e-12);
}

TEST(BetaSamples, BrownianRotationMeanAndShape) {
  IntegrationConfig cfg;
  cfg.seed = 8;
  const double T = 0.1;
  const BetaSamples b = beta_T_samples(brownian_rotation_spec(), T, 40000, cfg);
  for (double v : b.samples) {
    ASSERT_GT(v, -0.5);
    ASSERT_LE(v, 0.5);
  }
  EXPECT_NEAR(b.stats.mean, wrapped_gaussian_mean(T, T), 3.0 * b.stats.std_error);
  double total = 0.0;
  for (double m : b.histogram.masses()) total += m;
  EXPECT_NEAR(total, 1.0, 1e-9);
  EXPECT_EQ(b.histogram.bins(), 1024u);
  const double ks = sup_cdf_distance(b.histogram, [&](double y) {
    return wrapped_gaussian_cdf(y, T, T);
  });
  EXPECT_LT(ks, 0.02);
}

TEST(BetaSamples, ReproducibleAcrossWorkers) {
  IntegrationConfig cfg;
  cfg.seed = 2;
  const auto a = beta_T_samples(brownian_rotation_spec(), 0.05, 9000, cfg, Eigen::Vector2d::UnitX(),
                                1024, 1);
  const auto b = beta_T_samples(brownian_rotation_spec(), 0.05, 9000, cfg, Eigen::Vector2d::UnitX(),
                                1024, 3);
  EXPECT_EQ(a.samples, b.samples);
}

TEST(Winding, DeterministicRotation) {
  const auto short_window = winding_counts(rotation_flow(1.0), 0.3, 10, 0.3 / 256, 0);
  for (const auto& w : short_window.records) {
    EXPECT_EQ(w.N_plus, 0);
    EXPECT_EQ(w.N_minus, 0);
    EXPECT_LT(w.first_crossing, 0.0);
  }
  const auto long_window = winding_counts(rotation_flow(1.0), 0.7, 10, 0.7 / 256, 0);
  for (const auto& w : long_window.records) {
    EXPECT_EQ(w.N_plus, 1);
    EXPECT_EQ(w.N_minus, 0);
    EXPECT_NEAR(w.first_crossing, 0.5, 0.7 / 256 + 1e-12);
  }
  EXPECT_NEAR(long_window.E_Nplus_over_T, 1.0 / 0.7, 1e-12);
}

TEST(Winding, BrownianRotationRatesDecrease) {
  double prev_plus = 1e9, prev_minus = 1e9;
  for (double T : {0.25, 0.1, 0.05, 0.02}) {
    const auto w = winding_counts(brownian_rotation_spec(), T, 50000, T / 64, 3);
    EXPECT_LT(w.E_Nplus_over_T, prev_plus) << T;
    EXPECT_LT(w.E_Nminus_over_T, prev_minus) << T;
    prev_plus = w.E_Nplus_over_T;
    prev_minus = w.E_Nminus_over_T;
  }
}

TEST(Winding, NoCrossingMeansNoCorrection) {
  const auto w = winding_counts(brownian_rotation_spec(), 0.01, 2000, 0.01 / 64, 4);
  for (const auto& r : w.records) {
    if (r.net() == 0 && std::abs(r.increment) < 0.5) {
      EXPECT_EQ(wrap_turn(r.increment), r.increment);
    }
  }
}

TEST(WindingIdentity, DeterministicAndBrownian) {
  const IdentityDefect d = erratum_identity_check(rotation_flow(1.3), 0.9, 20, 0);
  EXPECT_EQ(d.integer_defect, 0);
  EXPECT_LT(d.angle_defect, 1e-9);
  const IdentityDefect b = erratum_identity_check(brownian_rotation_spec(), 0.25, 10000, 6);
  EXPECT_EQ(b.integer_defect, 0);
  EXPECT_LT(b.angle_defect, 1e-9);
  EXPECT_EQ(b.samples, 10000u);
}
