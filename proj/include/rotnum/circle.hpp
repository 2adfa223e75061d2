#pragma once

// Circle arithmetic, lifts of orientation-preserving circle homeomorphisms
// and rotation numbers of single maps.
//
// Angles are measured in turns throughout: the circle is R/Z and the
// projection R -> S^1 is x -> exp(2*pi*i*x). Circle points are carried as
// their representative in (-1/2, 1/2].

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace rotnum {

/// Representative of x mod 1 in the half-open interval (-1/2, 1/2].
template <typename Scalar>
Scalar wrap_turn(Scalar x) {
  if (!std::isfinite(x)) {
    throw std::domain_error("wrap_turn: non-finite input");
  }
  Scalar r = x - std::ceil(x - Scalar(0.5));
  if (r <= Scalar(-0.5)) r += Scalar(1);
  if (r > Scalar(0.5)) r -= Scalar(1);
  return r;
}

/// Representative of x mod 1 in [0, 1).
template <typename Scalar>
Scalar frac_turn(Scalar x) {
  Scalar r = x - std::floor(x);
  return r >= Scalar(1) ? Scalar(0) : r;
}

/// Distance on R/Z.
template <typename Scalar>
Scalar circular_distance(Scalar a, Scalar b) {
  return std::abs(wrap_turn(a - b));
}

/// A rotation number (turns per step, or turns per unit time for
/// continuous systems) together with how it was obtained.
struct RotationEstimate {
  double value = 0.0;
  std::size_t n = 0;
  /// Monte Carlo standard error across replicas; 0 for a single run.
  double std_error = 0.0;
  /// A-priori bound on the finite-n truncation error (1/n for the
  /// discrete estimators).
  double truncation_bound = 0.0;
};

/// Lift F(x) = x + delta(x) of an orientation-preserving circle
/// homeomorphism, with delta 1-periodic.
///
/// Lifts are immutable values and cheap to copy. Pure translations are
/// stored inline; every other lift shares its displacement function.
class Lift {
 public:
  using Displacement = std::function<double(double)>;

  Lift() = default;

  /// x -> x + a. Not normalized unless a is in (-1/2, 1/2].
  static Lift translation(double a) {
    Lift f;
    f.shift_ = a;
    return f;
  }

  static Lift identity() { return translation(0.0); }

  /// Wraps a 1-periodic displacement without validation. `delta` receives
  /// the reduced argument in [0, 1).
  static Lift from_displacement(Displacement delta, double shift = 0.0);

  /// Strictly increasing samples F(k/N), k = 0..N-1, N >= 256, with
  /// F(N-1/N) < F(0) + 1. Interpolated piecewise linearly and extended by
  /// F(x+1) = F(x) + 1. Not normalized.
  static Lift from_table(std::vector<double> values);

  /// Piecewise-linear lift through the knots (x_i, F(x_i)) with x_i
  /// strictly increasing in [0, 1), tabulated on `grid` points.
  static Lift piecewise_linear(std::span<const double> knots_x,
                               std::span<const double> knots_y,
                               std::size_t grid = 256);

  double operator()(double x) const {
    if (!delta_) return x + shift_;
    return x + shift_ + (*delta_)(frac_turn(x));
  }

  /// F(x) - x.
  double displacement(double x) const { return (*this)(x) - x; }

  bool is_translation() const { return !delta_; }
  double translation_amount() const { return shift_; }

  /// F(0) in (-1/2, 1/2].
  bool is_normalized() const {
    const double f0 = (*this)(0.0);
    return f0 > -0.5 && f0 <= 0.5;
  }

  /// Same lift shifted by the integer k.
  Lift shifted(double k) const {
    Lift f = *this;
    f.shift_ += k;
    return f;
  }

 private:
  std::shared_ptr<const Displacement> delta_;
  double shift_ = 0.0;
};

/// Circle homeomorphism carried by its lift; acts on circle points by
/// wrap_turn(F(p)).
struct CircleHomeo {
  Lift lift;

  double operator()(double p) const { return wrap_turn(lift(p)); }
};

/// Result of checking a candidate lift on a sampling grid.
struct LiftCheck {
  bool periodic = true;
  bool increasing = true;
  double max_abs_displacement = 0.0;
};

/// Checks F(x+1) = F(x) + 1 and strict monotonicity on `grid` points of
/// [0, 1].
LiftCheck check_lift(const std::function<double(double)>& F,
                     std::size_t grid = 256, double tol = 1e-9);

/// Shifts F_raw by the unique integer putting F(0) in (-1/2, 1/2].
/// Throws std::invalid_argument if F_raw is not periodic-plus-identity or
/// not increasing on the check grid.
Lift normalize_lift(std::function<double(double)> F_raw,
                    std::size_t grid = 256);
Lift normalize_lift(const Lift& F);

/// (g o f)(x) = g(f(x)). The result is not re-normalized.
Lift lift_compose(const Lift& g, const Lift& f);

/// wrap((F^n(x0) - x0)/n). The integer part of the orbit is carried
/// separately so long runs keep full precision.
RotationEstimate classical_rotation_number(const Lift& f, std::size_t n_iter,
                                           double x0 = 0.0);
RotationEstimate classical_rotation_number(const CircleHomeo& f,
                                           std::size_t n_iter,
                                           double x0 = 0.0);

/// theta_0 <= theta_1 <= ... with theta_0 = wrap(p) and each theta_n the
/// smallest value >= theta_{n-1} projecting to images[n-1].
struct OrbitSequence {
  std::vector<double> thetas;
};

OrbitSequence ordered_lifted_orbit(std::span<const double> images, double p);

/// wrap((theta_n - theta_0)/n) over the whole orbit. Requires at least two
/// entries.
RotationEstimate orbit_rotation_number(const OrbitSequence& orbit);

/// Solves H(y) = x by bisection to `tol`. Throws std::runtime_error if no
/// bracket is found or the bisection stalls.
double inverse_lift(const Lift& h, double x, double tol = 1e-12);

/// h o f o h^{-1}, or with `reverse` the conjugacy by the
/// orientation-reversing map x -> -H(x), which flips the sign of the
/// rotation number. The result is normalized.
CircleHomeo conjugate(const CircleHomeo& h, const CircleHomeo& f,
                      bool reverse = false);

}  // namespace rotnum
