#pragma once

// Rotation numbers of compositions f_n o ... o f_1 of stationary random
// circle homeomorphisms f_n = f(theta^{n-1} omega).

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "rotnum/circle.hpp"
#include "rotnum/measure.hpp"

namespace rotnum {

/// Driver (omega, theta) together with the emission omega -> f(omega).
/// A sampler reset with the same seed replays the same sequence.
class HomeoSampler {
 public:
  virtual ~HomeoSampler() = default;
  virtual void reset(std::uint64_t seed) = 0;
  /// Returns f(omega) for the current state, then advances omega.
  virtual Lift next() = 0;
  virtual std::unique_ptr<HomeoSampler> clone() const = 0;
};

/// i.i.d. homeomorphisms produced by a draw function.
class IidHomeoSampler final : public HomeoSampler {
 public:
  using Draw = std::function<Lift(std::mt19937_64&)>;

  explicit IidHomeoSampler(Draw draw, std::uint64_t seed = 0)
      : draw_(std::move(draw)), rng_(seed) {}

  /// Picks lifts[i] with probability weights[i] / sum(weights).
  static IidHomeoSampler from_list(std::vector<Lift> lifts, std::vector<double> weights,
                                   std::uint64_t seed = 0);

  void reset(std::uint64_t seed) override { rng_.seed(seed); }
  Lift next() override { return draw_(rng_); }
  std::unique_ptr<HomeoSampler> clone() const override {
    return std::make_unique<IidHomeoSampler>(*this);
  }

 private:
  Draw draw_;
  std::mt19937_64 rng_;
};

/// Deterministic periodic sequence f_1, f_2, ..., f_k, f_1, ... starting at
/// `phase`. The seed is ignored.
class CyclicHomeoSampler final : public HomeoSampler {
 public:
  explicit CyclicHomeoSampler(std::vector<Lift> cycle, std::size_t phase = 0);

  void reset(std::uint64_t) override { index_ = phase_; }
  Lift next() override {
    const Lift& f = cycle_[index_];
    index_ = (index_ + 1) % cycle_.size();
    return f;
  }
  std::unique_ptr<HomeoSampler> clone() const override {
    return std::make_unique<CyclicHomeoSampler>(*this);
  }

 private:
  std::vector<Lift> cycle_;
  std::size_t phase_;
  std::size_t index_;
};

/// Ergodic, non-i.i.d. driver: omega lives on the circle and is advanced by
/// an irrational rotation omega -> omega + step. The seed picks omega_0.
class IrrationalRotationDriver final : public HomeoSampler {
 public:
  using Family = std::function<Lift(double omega)>;

  IrrationalRotationDriver(Family family, double step, std::uint64_t seed = 0)
      : family_(std::move(family)), step_(step) {
    reset(seed);
  }

  void reset(std::uint64_t seed) override;
  Lift next() override {
    Lift f = family_(omega_);
    omega_ = frac_turn(omega_ + step_);
    return f;
  }
  std::unique_ptr<HomeoSampler> clone() const override {
    return std::make_unique<IrrationalRotationDriver>(*this);
  }

  double state() const { return omega_; }

 private:
  Family family_;
  double step_;
  double omega_ = 0.0;
};

/// Accumulates F_n = f_n o ... o f_1 evaluated at x0 through the telescoping
/// sum F_n(x0) = x0 + sum beta_i, keeping the current point reduced to
/// [0, 1) so the composition is never nested.
class LiftComposer {
 public:
  explicit LiftComposer(double x0 = 0.0) : pos_(frac_turn(x0)) {}

  /// Applies f; returns the displacement beta = F(x) - x at the current x.
  double push(const Lift& f) {
    const double y = f(pos_);
    const double beta = y - pos_;
    add(beta);
    pos_ = frac_turn(y);
    return beta;
  }

  /// Current point in [0, 1).
  double position() const { return pos_; }
  /// F_n(x0) - x0.
  double travelled() const { return sum_ + carry_; }
  std::size_t count() const { return count_; }

  /// Records a displacement computed elsewhere and moves to `new_pos`.
  void advance(double beta, double new_pos) {
    add(beta);
    pos_ = new_pos;
  }

 private:
  void add(double v) {
    // Neumaier summation.
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      carry_ += (sum_ - t) + v;
    } else {
      carry_ += (v - t) + sum_;
    }
    sum_ = t;
    ++count_;
  }

  double pos_;
  double sum_ = 0.0;
  double carry_ = 0.0;
  std::size_t count_ = 0;
};

/// F(x) - x at any representative x of s.
double beta_displacement(const Lift& f, double s);

/// Replica seed r derived from a base seed.
std::uint64_t replica_seed(std::uint64_t seed, std::size_t replica);

/// wrap((F_n(x0) - x0)/n) with F_n the composition of normalized lifts.
/// With replicas > 1 each replica restarts the sampler from its own seed,
/// the raw averages are pooled and std_error is their standard error.
RotationEstimate compose_rotation_number(const HomeoSampler& sampler, std::size_t n,
                                         double x0 = 0.0, std::size_t replicas = 1,
                                         std::uint64_t seed = 0, unsigned workers = 1);

/// Rotation number via the ordered lifted orbit of p under the
/// compositions (depends on p in general).
RotationEstimate pointwise_rotation(const HomeoSampler& sampler, std::size_t n, double p,
                                    std::uint64_t seed = 0);

struct OccupationResult {
  /// Birkhoff average of beta along the skew product.
  RotationEstimate estimate;
  /// Pooled occupation measure of the circle coordinate.
  EmpiricalMeasure measure;
};

/// Runs Theta(omega, s) = (theta omega, f(omega, s)) from s = p0 for n
/// steps per replica, recording where s spends its time.
OccupationResult ergodic_rotation_via_occupation(const HomeoSampler& sampler, std::size_t n,
                                                 std::size_t replicas, std::uint64_t seed = 0,
                                                 std::size_t bins = 1024, double p0 = 0.0,
                                                 unsigned workers = 1);

/// For i.i.d. samplers: integral over nu of E[beta(omega, s)], with the
/// expectation replaced by an average over `draws` fresh emissions.
double iid_integral_formula(const HomeoSampler& sampler, const EmpiricalMeasure& nu,
                            std::size_t draws, std::uint64_t seed = 0);

struct InvariantAverage {
  /// Integral of beta against nu, wrapped to (-1/2, 1/2].
  double value = 0.0;
  /// Sup distance between the cumulative distributions of nu and of its
  /// push-forward under f (bin centres moved by f).
  double pushforward_defect = 0.0;
};

/// Average angular displacement of f with respect to nu. Equals the
/// rotation number of f mod 1 whenever nu is f-invariant.
InvariantAverage invariant_average_check(const CircleHomeo& f, const EmpiricalMeasure& nu);

/// Four piecewise-linear maps fixing 0 that send 1/8 -> 3/8 -> 5/8 -> 7/8 ->
/// 1/8 in turn. Cycling them fixes 0 yet moves 1/8 a quarter turn per step.
std::vector<Lift> four_cycle_maps();

}  // namespace rotnum
