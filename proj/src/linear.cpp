#include "rotnum/linear.hpp"

#include <cmath>
#include <numbers>

#include "rotnum/parallel.hpp"

namespace rotnum {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Mat2::Mat2(const Eigen::Matrix2d& m) : m_(m) {
  const double det = m_.determinant();
  if (!(det > 0.0) || !m_.allFinite()) {
    throw std::invalid_argument("Mat2: determinant must be positive");
  }
}

Mat2::Mat2(double a11, double a12, double a21, double a22)
    : Mat2((Eigen::Matrix2d() << a11, a12, a21, a22).finished()) {}

Mat2 Mat2::rotation(double turns) {
  const double c = std::cos(kTwoPi * turns), s = std::sin(kTwoPi * turns);
  return Mat2((Eigen::Matrix2d() << c, -s, s, c).finished(), Unchecked{});
}

Mat2 Mat2::scaled(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("Mat2::scaled: factor must be positive");
  return Mat2(m_ * c, Unchecked{});
}

Eigen::Vector2d projective_action(const Mat2& g, const Eigen::Vector2d& s) {
  const Eigen::Vector2d v = g.matrix() * s;
  return v / v.norm();
}

ProjectiveLift::ProjectiveLift(const Mat2& g)
    : g_(g), ge1_(g.matrix().col(0)), psi0_(angle_turns(ge1_)) {}

double ProjectiveLift::offset_of_image(const Eigen::Vector2d& v) const {
  const double cross = ge1_.x() * v.y() - ge1_.y() * v.x();
  const double dot = ge1_.dot(v);
  // True offset lies in [0, 1/2); atan2 may return values just below 0 or
  // near -1/2 through rounding.
  double d = std::atan2(cross, dot) / kTwoPi;
  if (d < -0.25) d += 1.0;
  return psi0_ + d;
}

double ProjectiveLift::operator()(double x) const {
  const double m = std::floor(2.0 * x);
  const double r = x - 0.5 * m;
  return half_period_value(unit_vector(r)) + 0.5 * m;
}

double ProjectiveLift::displacement_at(double x, const Eigen::Vector2d& s) const {
  return displacement_from_image(x, g_.matrix() * s);
}

double ProjectiveLift::displacement_from_image(double x, const Eigen::Vector2d& gs) const {
  if (x < 0.5) return offset_of_image(gs) - x;
  return offset_of_image(-gs) + 0.5 - x;
}

Lift matrix_lift(const Mat2& g) {
  const ProjectiveLift psi(g);
  return Lift::from_displacement([psi](double s) { return psi(s) - s; });
}

double eigen_rotation_number(const Mat2& g) {
  const Eigen::Matrix2d& m = g.matrix();
  const double half_trace = 0.5 * (m(0, 0) + m(1, 1));
  const double half_diff = 0.5 * (m(0, 0) - m(1, 1));
  // Both products carry their rounding error so the difference keeps its
  // relative accuracy when the eigenvalues are nearly real.
  const double p = m(0, 1) * m(1, 0);
  const double q = half_diff * half_diff;
  const double disc = (q + p) + (std::fma(m(0, 1), m(1, 0), -p) + std::fma(half_diff, half_diff, -q));
  if (disc / g.determinant() < -1e-12) {
    const double arg = std::atan2(std::sqrt(-disc), half_trace);
    // For complex eigenvalues m(1,0) != 0 and its sign is the sense of
    // rotation of e1 (and of every direction).
    return (m(1, 0) > 0.0 ? arg : -arg) / kTwoPi;
  }
  return half_trace > 0.0 ? 0.0 : 0.5;
}

ProjectiveComposer::ProjectiveComposer(double x0) : composer_(x0), s_(unit_vector(x0)) {}

double ProjectiveComposer::push(const ProjectiveLift& lift) {
  const double x = composer_.position();
  const Eigen::Vector2d v = lift.matrix().matrix() * s_;
  const double beta = lift.displacement_from_image(x, v);
  composer_.advance(beta, frac_turn(x + beta));
  s_ = v / v.norm();
  return beta;
}

namespace {

// Angle of s lies in [0, 1/2).
bool upper_half(const Eigen::Vector2d& s) { return s.y() > 0.0 || (s.y() == 0.0 && s.x() > 0.0); }

// angle(s) < angle(u) with both angles taken in [0, 1).
bool angle_less(const Eigen::Vector2d& s, const Eigen::Vector2d& u) {
  const bool hs = upper_half(s), hu = upper_half(u);
  if (hs != hu) return hs;
  return s.x() * u.y() - s.y() * u.x() > 0.0;
}

}  // namespace

RotationEstimate iterated_matrix_rotation_number(const Mat2& g, std::size_t n, double x0) {
  if (n == 0) throw std::invalid_argument("iterated_matrix_rotation_number: n must be >= 1");
  // Psi is increasing with Psi(x + 1) = Psi(x) + 1, so floor(Psi(x)) =
  // floor(x - z) with z = Psi^{-1}(0) = f + j, f in [0, 1). Along the orbit
  // only the test x_k < f is needed; the angle itself is read once at the end.
  const ProjectiveLift psi(g);
  const Eigen::Matrix2d& m = g.matrix();
  const Eigen::Vector2d u = g.inverse().matrix().col(0).normalized();
  const double f = frac_turn(angle_turns(u));
  const long j = -std::lround(psi(f));
  Eigen::Vector2d s = unit_vector(x0);
  std::size_t below = 0;
  for (std::size_t i = 0; i < n; ++i) {
    below += angle_less(s, u);
    s = m * s;
    const double scale = std::abs(s.x()) + std::abs(s.y());
    if (scale > 1e100 || scale < 1e-100) s /= scale;
  }
  const double start = frac_turn(x0);
  const double end = frac_turn(angle_turns(s));
  const double travelled = (end - start) - double(below) - double(j) * double(n);
  RotationEstimate est;
  est.value = wrap_turn(travelled / double(n));
  est.n = n;
  est.truncation_bound = 1.0 / double(n);
  return est;
}

SequenceMatrixSampler::SequenceMatrixSampler(std::vector<Mat2> mats)
    : mats_(std::make_shared<const std::vector<Mat2>>(std::move(mats))) {
  if (mats_->empty()) throw std::invalid_argument("SequenceMatrixSampler: empty sequence");
}

RotationEstimate product_rotation_number(const MatrixSampler& sampler, std::size_t n,
                                         std::size_t replicas, std::uint64_t seed,
                                         unsigned workers) {
  if (n == 0 || replicas == 0) {
    throw std::invalid_argument("product_rotation_number: n and replicas must be >= 1");
  }
  const auto rates = parallel_map(replicas, workers, [&](std::size_t r) {
    auto s = sampler.clone();
    s->reset(replicas == 1 ? seed : replica_seed(seed, r));
    ProjectiveComposer comp(0.0);
    for (std::size_t i = 0; i < n; ++i) comp.push(s->next());
    return comp.travelled() / double(n);
  });
  const SampleStats st = sample_stats(rates);
  RotationEstimate est;
  est.value = wrap_turn(st.mean);
  est.n = n;
  est.std_error = st.std_error;
  est.truncation_bound = 1.0 / double(n);
  return est;
}

EmpiricalMeasure stationary_measure_estimate(const MatrixSampler& sampler, std::size_t n,
                                             std::uint64_t seed, std::size_t bins, double s0) {
  if (n == 0) throw std::invalid_argument("stationary_measure_estimate: n must be >= 1");
  auto s = sampler.clone();
  s->reset(seed);
  EmpiricalMeasure nu(bins);
  ProjectiveComposer comp(s0);
  for (std::size_t i = 0; i < n; ++i) {
    nu.add(comp.position());
    comp.push(s->next());
  }
  return nu;
}

IidMatrixSampler uniform_rotation_sampler(double lo, double hi) {
  return IidMatrixSampler([lo, hi](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> lambda(lo, hi);
    return Mat2::rotation(lambda(rng));
  });
}

IidMatrixSampler triangular_sampler(double p_negative) {
  return IidMatrixSampler([p_negative](std::mt19937_64& rng) {
    std::bernoulli_distribution negative(p_negative);
    std::uniform_real_distribution<double> size(0.5, 2.0);
    std::normal_distribution<double> shear(0.0, 1.0);
    const double sign = negative(rng) ? -1.0 : 1.0;
    const double a = sign * size(rng);
    const double d = sign * size(rng);
    return Mat2(a, shear(rng), 0.0, d);
  });
}

}  // namespace rotnum
