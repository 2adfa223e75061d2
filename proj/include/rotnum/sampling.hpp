#pragma once

// Sampling a continuous cocycle at period T: window matrices, sampled
// rotation numbers, convergence as T -> 0, the Nyquist bound for
// autonomous flows, the law of the sampled displacement and the winding
// count diagnostic.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "rotnum/cocycle.hpp"
#include "rotnum/linear.hpp"
#include "rotnum/measure.hpp"
#include "rotnum/parallel.hpp"

namespace rotnum {

/// The n window matrices phi((k+1)T) phi(kT)^{-1} of one trajectory on
/// [0, nT]. The integration step is cfg.dt shrunk so that it divides T.
std::vector<Mat2> sample_matrices(const CocycleSpec& spec, double T, std::size_t n,
                                  const IntegrationConfig& cfg);
std::vector<Mat2> sample_matrices(const CocycleSpec& spec, double T, std::size_t n,
                                  std::uint64_t seed);

/// Rotation number of the product of `mats` (turns per window).
RotationEstimate sampled_rotation_number(const std::vector<Mat2>& mats);
/// Pooled over independent sequences as in compose_rotation_number.
RotationEstimate sampled_rotation_number(const std::vector<std::vector<Mat2>>& sequences);

struct SamplingStudy {
  CocycleSpec spec;
  std::vector<double> T_grid;
  /// Number of windows at the smallest T; every T is read off the same path
  /// of length steps_per_T * min(T_grid).
  std::size_t steps_per_T = 10000;
  std::size_t replicas = 32;
  std::uint64_t seed = 0;
  IntegrationConfig integration{};
  Eigen::Vector2d s0 = Eigen::Vector2d::UnitX();
  unsigned workers = 1;
};

struct StudyRow {
  double T = 0.0;
  /// Sampled rotation number, turns per window, in (-1/2, 1/2].
  double rho_T = 0.0;
  double rho_over_T = 0.0;
  /// Standard error of rho_over_T.
  double std_error = 0.0;
  /// Windows per replica.
  std::size_t windows = 0;
};

struct StudyTable {
  /// Rows in the order of the T grid.
  std::vector<StudyRow> rows;
  /// Continuous rotation number alpha(H) / H pooled over the same paths.
  RotationEstimate rho_cont;
  /// |rho_T/T - rho_cont| never grows by more than twice the combined
  /// standard error from one row to the next.
  bool monotone = true;
};

/// Throws std::invalid_argument if some T is not a whole number of
/// integration steps of the smallest one.
StudyTable convergence_study(const SamplingStudy& study);

struct NyquistResult {
  bool exact = false;
  double rho_T = 0.0;
  double rho_T_over_T = 0.0;
  double rho_cont = 0.0;
};

/// rho_cont = b / (2 pi) for eigenvalues a +- ib of A (sign by the sense of
/// rotation, 0 for real eigenvalues), rho_T the eigenvalue rotation number
/// of exp(T A). Exact recovery when T < 1 / (2 |rho_cont|).
NyquistResult nyquist_check(const Eigen::Matrix2d& A, double T);

/// Continuous rotation rate of x' = A x from its eigenvalues.
double flow_rotation_rate(const Eigen::Matrix2d& A);

struct BetaSamples {
  std::vector<double> samples;
  SampleStats stats;
  EmpiricalMeasure histogram;
};

/// wrap(alpha(T) - alpha(0)) for n independent trajectories started at s0.
BetaSamples beta_T_samples(const CocycleSpec& spec, double T, std::size_t n_samples,
                           const IntegrationConfig& cfg,
                           const Eigen::Vector2d& s0 = Eigen::Vector2d::UnitX(),
                           std::size_t bins = 1024, unsigned workers = 1);

/// E[wrap(mu + Z)], Z ~ N(0, variance), in closed form.
double wrapped_gaussian_mean(double mu, double variance);
/// P[wrap(mu + Z) <= y] for y in (-1/2, 1/2].
double wrapped_gaussian_cdf(double y, double mu, double variance);

/// Largest gap between the cumulative mass of `hist` at bin edges and `cdf`.
template <typename Cdf>
double sup_cdf_distance(const EmpiricalMeasure& hist, Cdf&& cdf) {
  double acc = 0.0, worst = 0.0;
  for (std::size_t b = 0; b < hist.bins(); ++b) {
    acc += hist.mass(b);
    worst = std::max(worst, std::abs(acc - cdf(hist.bin_right(b))));
  }
  return worst;
}

/// Crossings of alpha(t) - alpha(0) through the levels k + 1/2 within one
/// window: upward crossings are anti-clockwise passages through the
/// antipode of s0.
struct WindingRecord {
  long N_plus = 0;
  long N_minus = 0;
  /// alpha(T) - alpha(0).
  double increment = 0.0;
  /// First grid time with a crossing; negative when there is none.
  double first_crossing = -1.0;

  long net() const { return N_plus - N_minus; }
};

/// Level index L(x) = ceil(x - 1/2), so wrap_turn(x) = x - L(x).
inline long winding_level(double x) { return static_cast<long>(std::ceil(x - 0.5)); }

struct WindingSummary {
  std::vector<WindingRecord> records;
  double E_Nplus_over_T = 0.0;
  double E_Nminus_over_T = 0.0;
  double Nplus_std_error = 0.0;
  double Nminus_std_error = 0.0;
};

WindingSummary winding_counts(const CocycleSpec& spec, double T, std::size_t n_samples,
                              double fine_dt, std::uint64_t seed,
                              const Eigen::Vector2d& s0 = Eigen::Vector2d::UnitX(),
                              unsigned workers = 1);

struct IdentityDefect {
  /// Largest |k - (N_plus - N_minus)| with k = increment - wrap(increment).
  long integer_defect = 0;
  /// Largest |wrap(increment) - beta| with beta read from the lift of the
  /// window matrix, an independent computation of the same displacement.
  double angle_defect = 0.0;
  std::size_t samples = 0;
};

/// Sample-by-sample check of beta = (alpha_T - alpha_0) + N with
/// N = -(N_plus - N_minus).
IdentityDefect erratum_identity_check(const CocycleSpec& spec, double T, std::size_t n_samples,
                                      std::uint64_t seed, double fine_dt = 0.0,
                                      unsigned workers = 1);

}  // namespace rotnum
