#pragma once

// GL+(2,R), its projective action on the circle, and rotation numbers of
// matrices and of products of random matrices.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "rotnum/circle.hpp"
#include "rotnum/measure.hpp"
#include "rotnum/random_composition.hpp"

namespace rotnum {

/// Real 2x2 matrix with strictly positive determinant.
class Mat2 {
 public:
  Mat2() : m_(Eigen::Matrix2d::Identity()) {}
  /// Throws std::invalid_argument unless det(m) > 0.
  explicit Mat2(const Eigen::Matrix2d& m);
  Mat2(double a11, double a12, double a21, double a22);

  static Mat2 identity() { return Mat2(); }
  /// Rotation by `turns` full turns, anti-clockwise.
  static Mat2 rotation(double turns);

  const Eigen::Matrix2d& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }
  double determinant() const { return m_.determinant(); }
  Mat2 inverse() const { return Mat2(m_.inverse()); }

  friend Mat2 operator*(const Mat2& a, const Mat2& b) { return Mat2(a.m_ * b.m_, Unchecked{}); }
  Mat2 scaled(double c) const;

 private:
  struct Unchecked {};
  Mat2(const Eigen::Matrix2d& m, Unchecked) : m_(m) {}
  Eigen::Matrix2d m_;
};

/// Unit vector at angle `turns`.
inline Eigen::Vector2d unit_vector(double turns) {
  const double a = 2.0 * std::numbers::pi * turns;
  return {std::cos(a), std::sin(a)};
}

/// Angle of v in turns, in (-1/2, 1/2].
inline double angle_turns(const Eigen::Vector2d& v) {
  return wrap_turn(std::atan2(v.y(), v.x()) / (2.0 * std::numbers::pi));
}

/// g s / |g s|.
Eigen::Vector2d projective_action(const Mat2& g, const Eigen::Vector2d& s);

/// Normalized lift of s -> g s / |g s|. Evaluation is closed form: psi(0)
/// is the wrapped angle of g e1, the lift is increasing and satisfies
/// Psi(x + 1/2) = Psi(x) + 1/2, so on [0, 1/2) it is the unique
/// representative of angle(g s_x) in [Psi(0), Psi(0) + 1/2).
class ProjectiveLift {
 public:
  explicit ProjectiveLift(const Mat2& g);

  /// Psi(x) for any real x.
  double operator()(double x) const;

  /// Psi(x) - x given x in [0, 1) and its unit vector s = (cos 2 pi x,
  /// sin 2 pi x). Avoids recomputing s from x.
  double displacement_at(double x, const Eigen::Vector2d& s) const;
  /// Same, given the image g s instead of s.
  double displacement_from_image(double x, const Eigen::Vector2d& gs) const;

  double at_zero() const { return psi0_; }
  const Mat2& matrix() const { return g_; }

 private:
  double half_period_value(const Eigen::Vector2d& s_r) const {
    return offset_of_image(g_.matrix() * s_r);
  }
  double offset_of_image(const Eigen::Vector2d& v) const;

  Mat2 g_;
  Eigen::Vector2d ge1_;
  double psi0_;
};

/// Normalized Lift of psi_g.
Lift matrix_lift(const Mat2& g);

/// Rotation number of psi_g from its eigenvalues, with anti-clockwise
/// orientation positive: complex pair -> +-arg(lambda)/(2 pi) signed by the
/// sense of rotation, positive real eigenvalues -> 0, negative -> 1/2.
/// Nearly repeated roots (|disc| / det < 1e-12) count as real.
double eigen_rotation_number(const Mat2& g);

/// Classical rotation number of psi_g by iterating its lift n times.
RotationEstimate iterated_matrix_rotation_number(const Mat2& g, std::size_t n, double x0 = 0.0);

/// Composes projective lifts through the telescoping sum, tracking the
/// current point both as a turn in [0, 1) and as a unit vector.
class ProjectiveComposer {
 public:
  explicit ProjectiveComposer(double x0 = 0.0);

  /// Applies psi_g; returns the displacement beta.
  double push(const Mat2& g) { return push(ProjectiveLift(g)); }
  double push(const ProjectiveLift& lift);

  double position() const { return composer_.position(); }
  const Eigen::Vector2d& direction() const { return s_; }
  double travelled() const { return composer_.travelled(); }
  std::size_t count() const { return composer_.count(); }

 private:
  LiftComposer composer_;
  Eigen::Vector2d s_;
};

/// Driver emitting matrices Y(theta^{n-1} omega).
class MatrixSampler {
 public:
  virtual ~MatrixSampler() = default;
  virtual void reset(std::uint64_t seed) = 0;
  virtual Mat2 next() = 0;
  virtual std::unique_ptr<MatrixSampler> clone() const = 0;
};

class IidMatrixSampler final : public MatrixSampler {
 public:
  using Draw = std::function<Mat2(std::mt19937_64&)>;

  explicit IidMatrixSampler(Draw draw, std::uint64_t seed = 0)
      : draw_(std::move(draw)), rng_(seed) {}

  void reset(std::uint64_t seed) override { rng_.seed(seed); }
  Mat2 next() override { return draw_(rng_); }
  std::unique_ptr<MatrixSampler> clone() const override {
    return std::make_unique<IidMatrixSampler>(*this);
  }

 private:
  Draw draw_;
  std::mt19937_64 rng_;
};

/// Replays a fixed list of matrices cyclically (a constant matrix when the
/// list has one entry). The seed is ignored.
class SequenceMatrixSampler final : public MatrixSampler {
 public:
  explicit SequenceMatrixSampler(std::vector<Mat2> mats);

  void reset(std::uint64_t) override { index_ = 0; }
  Mat2 next() override {
    const Mat2& g = (*mats_)[index_];
    index_ = (index_ + 1) % mats_->size();
    return g;
  }
  std::unique_ptr<MatrixSampler> clone() const override {
    return std::make_unique<SequenceMatrixSampler>(*this);
  }

 private:
  std::shared_ptr<const std::vector<Mat2>> mats_;
  std::size_t index_ = 0;
};

/// Views a matrix sampler as a homeomorphism sampler emitting matrix_lift.
class ProjectiveHomeoSampler final : public HomeoSampler {
 public:
  explicit ProjectiveHomeoSampler(const MatrixSampler& m) : inner_(m.clone()) {}
  ProjectiveHomeoSampler(const ProjectiveHomeoSampler& o) : inner_(o.inner_->clone()) {}

  void reset(std::uint64_t seed) override { inner_->reset(seed); }
  Lift next() override { return matrix_lift(inner_->next()); }
  std::unique_ptr<HomeoSampler> clone() const override {
    return std::make_unique<ProjectiveHomeoSampler>(*this);
  }

 private:
  std::unique_ptr<MatrixSampler> inner_;
};

/// Rotation number of Y_n ... Y_1 from x0 = 0 via the lift composition,
/// pooled over replicas as in compose_rotation_number.
RotationEstimate product_rotation_number(const MatrixSampler& sampler, std::size_t n,
                                         std::size_t replicas = 1, std::uint64_t seed = 0,
                                         unsigned workers = 1);

/// Occupation measure of s_{k+1} = psi_{Y_{k+1}}(s_k) started at s0 (turns).
EmpiricalMeasure stationary_measure_estimate(const MatrixSampler& sampler, std::size_t n,
                                             std::uint64_t seed = 0, std::size_t bins = 1024,
                                             double s0 = 0.0);

/// Rotations by 2 pi lambda with lambda drawn uniformly from [lo, hi].
IidMatrixSampler uniform_rotation_sampler(double lo, double hi);

/// Upper-triangular matrices [[a, b], [0, d]] with sign(a) = sign(d)
/// negative with probability p_negative, |a|, |d| uniform on [1/2, 2] and b
/// standard normal.
IidMatrixSampler triangular_sampler(double p_negative);

}  // namespace rotnum
