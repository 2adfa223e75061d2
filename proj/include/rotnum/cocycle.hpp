#pragma once

// Continuous linear cocycles on R^2: autonomous flows, real-noise linear
// ODEs and Stratonovich SDEs, integrated together with the continuous
// (unwrapped) angle of a tracked direction. Angles are in turns.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "rotnum/circle.hpp"
#include "rotnum/linear.hpp"

namespace rotnum {

/// x' = A x.
struct DeterministicSpec {
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
};

/// x' = A(theta_t omega) x. The coefficient is evaluated along the driver
/// path selected by `seed`.
struct RealNoiseSpec {
  std::function<Eigen::Matrix2d(double t, std::uint64_t seed)> coefficient;
};

/// dx = A x dt + sum_i B_i x o dW^i (Stratonovich).
struct SdeSpec {
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  std::vector<Eigen::Matrix2d> B;
};

using CocycleSpec = std::variant<DeterministicSpec, RealNoiseSpec, SdeSpec>;

enum class SdeScheme {
  /// x_{k+1} = exp(A h + sum B_i dW_i) x_k. Exact when A and the B_i
  /// commute.
  exponential,
  /// Stratonovich-Heun predictor-corrector, x_{k+1} = (I + M + M^2/2) x_k
  /// with M = A h + sum B_i dW_i.
  heun,
};

struct IntegrationConfig {
  /// Base step; shrunk slightly when it does not divide the horizon.
  double dt = 1e-3;
  /// Dyadic refinement of the base grid. Level L uses dt / 2^L on the same
  /// Brownian path.
  unsigned level = 0;
  SdeScheme scheme = SdeScheme::exponential;
  std::uint64_t seed = 0;
  /// Independent noise stream (replica index).
  std::uint64_t stream = 0;
  /// Maximum number of automatic step halvings within one grid step.
  unsigned max_halvings = 24;
};

using SdeConfig = IntegrationConfig;

/// Raised when step halving reaches its floor.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One grid step of an integration.
struct StepView {
  std::size_t index;  // 1-based index of the grid point reached
  double t;           // time at the end of the step
  const Eigen::Matrix2d& step;  // propagator over the step
  const Eigen::Vector2d& s;     // tracked unit direction at t
  double alpha;                 // continuous angle of s, turns
};

using StepObserver = std::function<void(const StepView&)>;

/// Integrates `spec` over [0, horizon] starting from direction s0, calling
/// `observer` after every grid step. Every step keeps the tracked angle
/// increment below a quarter turn, halving the step when needed.
void simulate(const CocycleSpec& spec, double horizon, const IntegrationConfig& cfg,
              const Eigen::Vector2d& s0, const StepObserver& observer);

/// Number of grid steps and the step length used for `horizon`.
struct Grid {
  std::size_t steps;
  double h;
};
Grid make_grid(double horizon, const IntegrationConfig& cfg);

/// Stored path: matrices[k] = phi(times[k]), alpha in turns, s unit
/// directions phi(t) s0 / |phi(t) s0|.
struct Trajectory {
  std::vector<double> times;
  std::vector<Mat2> matrices;
  std::vector<double> alpha;
  std::vector<Eigen::Vector2d> s;
};

Trajectory integrate(const CocycleSpec& spec, double T, const IntegrationConfig& cfg,
                     const Eigen::Vector2d& s0 = Eigen::Vector2d::UnitX());

/// RK4 for both the matrix equation and the angle equation
/// alpha' = <v, A(t) s> / (2 pi) on the same grid.
Trajectory integrate_real_noise(const RealNoiseSpec& spec, double T, double dt,
                                std::uint64_t seed = 0,
                                const Eigen::Vector2d& s0 = Eigen::Vector2d::UnitX());

Trajectory integrate_sde(const SdeSpec& spec, double T, const SdeConfig& cfg,
                         const Eigen::Vector2d& s0 = Eigen::Vector2d::UnitX());

/// exp(t A) in closed form.
Mat2 flow_deterministic(const Eigen::Matrix2d& A, double t);
Eigen::Matrix2d expm2(const Eigen::Matrix2d& M);

/// Ito drift of the angle, radians per unit time:
/// f(s) = <A s, v> + sum_i ( <B_i^2 s, v> / 2 - <B_i s, s> <B_i s, v> ),
/// v the anti-clockwise normal of s.
double angular_drift(const Eigen::Matrix2d& A, const std::vector<Eigen::Matrix2d>& B,
                     const Eigen::Vector2d& s);

/// Heun on the scalar Stratonovich angle equation
/// d alpha = <v, A s> dt + sum_i <v, B_i s> o dW^i (turns), driven by the
/// same increments integrate_sde uses for `cfg`. No step halving.
std::vector<double> integrate_angle_sde(const SdeSpec& spec, double T, const SdeConfig& cfg,
                                        double alpha0 = 0.0);

/// (alpha(T) - alpha(0)) / T, turns per unit time.
RotationEstimate continuous_rotation_number(const Trajectory& traj);

/// Generator of the anti-clockwise rotation at `turns_per_time`.
Eigen::Matrix2d rotation_generator(double turns_per_time);

/// dx = 2 pi (drift J x dt + noise J x o dW): rotation by the angle
/// drift t + noise W_t turns.
SdeSpec brownian_rotation_spec(double drift = 1.0, double noise = 1.0);

/// A(t) = base + sin(2 pi (frequency t + phase)) modulation, phase uniform
/// from the seed.
RealNoiseSpec quasi_periodic_noise(const Eigen::Matrix2d& base, const Eigen::Matrix2d& modulation,
                                   double frequency);

}  // namespace rotnum
