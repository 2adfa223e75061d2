#include "rotnum/circle.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace rotnum {

Lift Lift::from_displacement(Displacement delta, double shift) {
  Lift f;
  f.delta_ = std::make_shared<const Displacement>(std::move(delta));
  f.shift_ = shift;
  return f;
}

Lift Lift::from_table(std::vector<double> values) {
  const std::size_t N = values.size();
  if (N < 256) {
    throw std::invalid_argument("Lift::from_table: need at least 256 samples, got " +
                                std::to_string(N));
  }
  for (std::size_t k = 1; k < N; ++k) {
    if (!(values[k] > values[k - 1])) {
      throw std::invalid_argument("Lift::from_table: samples not strictly increasing");
    }
  }
  if (!(values.back() < values.front() + 1.0)) {
    throw std::invalid_argument("Lift::from_table: last sample reaches F(0) + 1");
  }
  // Store displacements d_k = F(k/N) - k/N, closing the period with d_N = d_0.
  std::vector<double> d(N + 1);
  for (std::size_t k = 0; k < N; ++k) d[k] = values[k] - double(k) / double(N);
  d[N] = d[0];
  auto table = std::make_shared<const std::vector<double>>(std::move(d));
  return from_displacement([table, N](double s) {
    const double u = s * double(N);
    std::size_t k = std::min(static_cast<std::size_t>(u), N - 1);
    const double w = u - double(k);
    return (*table)[k] + w * ((*table)[k + 1] - (*table)[k]);
  });
}

Lift Lift::piecewise_linear(std::span<const double> knots_x,
                            std::span<const double> knots_y, std::size_t grid) {
  if (knots_x.size() != knots_y.size() || knots_x.empty()) {
    throw std::invalid_argument("Lift::piecewise_linear: knot arrays mismatch");
  }
  const std::size_t m = knots_x.size();
  for (std::size_t i = 0; i < m; ++i) {
    if (knots_x[i] < 0.0 || knots_x[i] >= 1.0 || (i > 0 && knots_x[i] <= knots_x[i - 1])) {
      throw std::invalid_argument("Lift::piecewise_linear: knots must increase within [0,1)");
    }
  }
  // Periodic extension: the knot after the last one is (x_0 + 1, y_0 + 1).
  auto eval = [&](double x) {
    for (std::size_t i = 0; i < m; ++i) {
      const double x0 = knots_x[i], y0 = knots_y[i];
      const double x1 = i + 1 < m ? knots_x[i + 1] : knots_x[0] + 1.0;
      const double y1 = i + 1 < m ? knots_y[i + 1] : knots_y[0] + 1.0;
      if (x >= x0 && x <= x1) return y0 + (x - x0) * (y1 - y0) / (x1 - x0);
    }
    // x lies before the first knot: use the wrap-around segment.
    const double x0 = knots_x[m - 1] - 1.0, y0 = knots_y[m - 1] - 1.0;
    const double x1 = knots_x[0], y1 = knots_y[0];
    return y0 + (x - x0) * (y1 - y0) / (x1 - x0);
  };
  std::vector<double> values(grid);
  for (std::size_t k = 0; k < grid; ++k) values[k] = eval(double(k) / double(grid));
  return from_table(std::move(values));
}

LiftCheck check_lift(const std::function<double(double)>& F, std::size_t grid,
                     double tol) {
  LiftCheck out;
  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= grid; ++k) {
    const double x = double(k) / double(grid);
    const double y = F(x);
    if (!std::isfinite(y)) {
      out.periodic = out.increasing = false;
      return out;
    }
    if (std::abs(F(x + 1.0) - y - 1.0) > tol) out.periodic = false;
    if (!(y > prev)) out.increasing = false;
    out.max_abs_displacement = std::max(out.max_abs_displacement, std::abs(y - x));
    prev = y;
  }
  return out;
}

Lift normalize_lift(std::function<double(double)> F_raw, std::size_t grid) {
  const LiftCheck chk = check_lift(F_raw, grid);
  if (!chk.periodic) throw std::invalid_argument("normalize_lift: F(x+1) != F(x)+1");
  if (!chk.increasing) throw std::invalid_argument("normalize_lift: lift is not increasing");
  const double f0 = F_raw(0.0);
  const double k = std::round(f0 - wrap_turn(f0));
  auto fn = std::make_shared<const std::function<double(double)>>(std::move(F_raw));
  return Lift::from_displacement([fn](double s) { return (*fn)(s) - s; }, -k);
}

Lift normalize_lift(const Lift& F) {
  const double f0 = F(0.0);
  return F.shifted(-std::round(f0 - wrap_turn(f0)));
}

Lift lift_compose(const Lift& g, const Lift& f) {
  if (g.is_translation() && f.is_translation()) {
    return Lift::translation(g.translation_amount() + f.translation_amount());
  }
  return Lift::from_displacement([g, f](double s) { return g(f(s)) - s; });
}

RotationEstimate classical_rotation_number(const Lift& f, std::size_t n_iter,
                                           double x0) {
  if (n_iter == 0) throw std::invalid_argument("classical_rotation_number: n_iter must be >= 1");
  // x = whole + pos with pos in [0, 1); F(pos + m) = F(pos) + m.
  double whole = std::floor(x0);
  double pos = x0 - whole;
  for (std::size_t i = 0; i < n_iter; ++i) {
    const double y = f(pos);
    const double fl = std::floor(y);
    whole += fl;
    pos = y - fl;
  }
  const double travelled = (whole - std::floor(x0)) + (pos - (x0 - std::floor(x0)));
  RotationEstimate est;
  est.value = wrap_turn(travelled / double(n_iter));
  est.n = n_iter;
  est.truncation_bound = 1.0 / double(n_iter);
  return est;
}

RotationEstimate classical_rotation_number(const CircleHomeo& f, std::size_t n_iter,
                                           double x0) {
  return classical_rotation_number(f.lift, n_iter, x0);
}

OrbitSequence ordered_lifted_orbit(std::span<const double> images, double p) {
  OrbitSequence orbit;
  orbit.thetas.reserve(images.size() + 1);
  double theta = wrap_turn(p);
  orbit.thetas.push_back(theta);
  for (double img : images) {
    theta += frac_turn(img - theta);
    orbit.thetas.push_back(theta);
  }
  return orbit;
}

RotationEstimate orbit_rotation_number(const OrbitSequence& orbit) {
  if (orbit.thetas.size() < 2) {
    throw std::invalid_argument("orbit_rotation_number: orbit needs at least two points");
  }
  const std::size_t n = orbit.thetas.size() - 1;
  RotationEstimate est;
  est.value = wrap_turn((orbit.thetas.back() - orbit.thetas.front()) / double(n));
  est.n = n;
  est.truncation_bound = 1.0 / double(n);
  return est;
}

double inverse_lift(const Lift& h, double x, double tol) {
  double lo = x - 2.0, hi = x + 2.0;
  for (int grow = 0; h(lo) > x; ++grow) {
    if (grow > 60) throw std::runtime_error("inverse_lift: no lower bracket");
    lo -= 2.0 * (grow + 1);
  }
  for (int grow = 0; h(hi) < x; ++grow) {
    if (grow > 60) throw std::runtime_error("inverse_lift: no upper bracket");
    hi += 2.0 * (grow + 1);
  }
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= tol) return 0.5 * (lo + hi);
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) return mid;
    if (h(mid) < x) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw std::runtime_error("inverse_lift: bisection did not converge; h is not a homeomorphism");
}

CircleHomeo conjugate(const CircleHomeo& h, const CircleHomeo& f, bool reverse) {
  const Lift H = h.lift;
  const Lift F = f.lift;
  std::function<double(double)> G;
  if (!reverse) {
    G = [H, F](double x) { return H(F(inverse_lift(H, x))); };
  } else {
    // Conjugacy by R(x) = -H(x), R^{-1}(x) = H^{-1}(-x).
    G = [H, F](double x) { return -H(F(inverse_lift(H, -x))); };
  }
  return CircleHomeo{normalize_lift(std::move(G))};
}

}  // namespace rotnum
