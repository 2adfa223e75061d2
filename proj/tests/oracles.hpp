#pragma once

// Independent reference computations used by the tests. None of them reuse
// the library's fast paths.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "rotnum/circle.hpp"
#include "rotnum/linear.hpp"

namespace oracle {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// f_n(...f_2(f_1(x))) built as a chain of nested closures.
inline double nested_composition(const std::vector<rotnum::Lift>& lifts, double x) {
  std::function<double(double)> chain = [](double y) { return y; };
  for (const auto& f : lifts) {
    chain = [inner = chain, f](double y) { return f(inner(y)); };
  }
  return chain(x);
}

// Plain (F^n(x0) - x0) / n without any integer bookkeeping.
inline double long_iteration(const std::function<double(double)>& F, std::size_t n, double x0) {
  long double x = x0;
  long double whole = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = F(double(x));
    const long double k = std::floor((long double)y);
    whole += k;
    x = (long double)y - k;
  }
  return double((whole + x - x0) / (long double)n);
}

// exp(M) by scaling and squaring of a truncated Taylor series.
inline Eigen::Matrix2d expm_series(const Eigen::Matrix2d& M) {
  int squarings = 0;
  double norm = M.lpNorm<Eigen::Infinity>();
  while (norm > 0.125) {
    norm *= 0.5;
    ++squarings;
  }
  const Eigen::Matrix2d X = M / std::ldexp(1.0, squarings);
  Eigen::Matrix2d term = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d sum = Eigen::Matrix2d::Identity();
  for (int k = 1; k <= 30; ++k) {
    term = term * X / double(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

// E[wrap(mu + Z)], Z ~ N(0, var), by composite Simpson quadrature of
// (x - k) * density over every unit translate [k - 1/2, k + 1/2].
inline double wrapped_gaussian_mean_simpson(double mu, double var, int panels = 4000) {
  const double sigma = std::sqrt(var);
  auto density = [&](double x) {
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(kTwoPi));
  };
  const long lo = long(std::floor(mu - 14.0 * sigma)) - 1;
  const long hi = long(std::ceil(mu + 14.0 * sigma)) + 1;
  double total = 0.0;
  for (long k = lo; k <= hi; ++k) {
    const double a = double(k) - 0.5, b = double(k) + 0.5;
    const double h = (b - a) / panels;
    double s = 0.0;
    for (int i = 0; i <= panels; ++i) {
      const double x = a + i * h;
      const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      s += w * (x - double(k)) * density(x);
    }
    total += s * h / 3.0;
  }
  return total;
}

// Psi_g(x) by continuous tracking of the angle of g u(t), t from 0 to x, in
// `steps_per_turn` increments per unit of x, starting from the normalized
// value at 0.
inline double unwrapped_projective_lift(const rotnum::Mat2& g, double x,
                                        int steps_per_turn = 4096) {
  const Eigen::Matrix2d& m = g.matrix();
  auto image = [&](double t) -> Eigen::Vector2d {
    return m * Eigen::Vector2d(std::cos(kTwoPi * t), std::sin(kTwoPi * t));
  };
  Eigen::Vector2d prev = image(0.0);
  double angle = rotnum::wrap_turn(std::atan2(prev.y(), prev.x()) / kTwoPi);
  const int steps = std::max(1, int(std::ceil(std::abs(x) * steps_per_turn)));
  for (int i = 1; i <= steps; ++i) {
    const Eigen::Vector2d next = image(x * double(i) / steps);
    angle += std::atan2(prev.x() * next.y() - prev.y() * next.x(), prev.dot(next)) / kTwoPi;
    prev = next;
  }
  return angle;
}

}  // namespace oracle
