#include "rotnum/cocycle.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "rotnum/random.hpp"

namespace rotnum {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// A step whose generator has Frobenius norm below pi/2 turns any direction
// by less than a quarter turn.
constexpr double kMaxGeneratorNorm = 0.5 * std::numbers::pi;

double angle_step(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b)) / kTwoPi;
}

Eigen::Vector2d normal_of(const Eigen::Vector2d& s) { return {-s.y(), s.x()}; }

struct PathState {
  Eigen::Vector2d s;
  double alpha;
};

void apply_step(PathState& st, Eigen::Matrix2d& prop, const Eigen::Matrix2d& E) {
  prop = E * prop;
  const Eigen::Vector2d v = E * st.s;
  const Eigen::Vector2d next = v / v.norm();
  st.alpha += angle_step(st.s, next);
  st.s = next;
}

class SdeStepper {
 public:
  SdeStepper(const SdeSpec& spec, const IntegrationConfig& cfg, double h0)
      : spec_(spec), cfg_(cfg), path_(cfg.seed, cfg.stream, h0), dw_(spec.B.size()) {}

  void grid_step(PathState& st, Eigen::Matrix2d& prop, std::size_t k, double h) {
    for (unsigned i = 0; i < dw_.size(); ++i) dw_[i] = path_.increment(cfg_.level, k, i);
    advance(st, prop, h, dw_, 0, hash_key({cfg_.level, k}));
  }

 private:
  void advance(PathState& st, Eigen::Matrix2d& prop, double h, std::span<const double> dw,
               unsigned depth, std::uint64_t tag) {
    Eigen::Matrix2d M = spec_.A * h;
    for (std::size_t i = 0; i < dw.size(); ++i) M += spec_.B[i] * dw[i];
    if (M.norm() >= kMaxGeneratorNorm) {
      if (depth >= cfg_.max_halvings) {
        throw NumericFailure("integrate_sde: step halving floor reached");
      }
      std::vector<double> left(dw.size()), right(dw.size());
      for (std::size_t i = 0; i < dw.size(); ++i) {
        std::tie(left[i], right[i]) = path_.bridge_split(dw[i], h, hash_key({tag, i}));
      }
      advance(st, prop, 0.5 * h, left, depth + 1, hash_key({tag, 1}));
      advance(st, prop, 0.5 * h, right, depth + 1, hash_key({tag, 2}));
      return;
    }
    Eigen::Matrix2d E;
    if (cfg_.scheme == SdeScheme::exponential) {
      E = expm2(M);
    } else {
      E = Eigen::Matrix2d::Identity() + M + 0.5 * M * M;
    }
    apply_step(st, prop, E);
  }

  const SdeSpec& spec_;
  const IntegrationConfig& cfg_;
  BrownianPath path_;
  std::vector<double> dw_;
};

void deterministic_step(const Eigen::Matrix2d& A, PathState& st, Eigen::Matrix2d& prop, double h,
                        unsigned depth, unsigned max_depth) {
  const Eigen::Matrix2d M = A * h;
  if (M.norm() >= kMaxGeneratorNorm) {
    if (depth >= max_depth) throw NumericFailure("flow: step halving floor reached");
    deterministic_step(A, st, prop, 0.5 * h, depth + 1, max_depth);
    deterministic_step(A, st, prop, 0.5 * h, depth + 1, max_depth);
    return;
  }
  apply_step(st, prop, expm2(M));
}

class RealNoiseStepper {
 public:
  RealNoiseStepper(const RealNoiseSpec& spec, const IntegrationConfig& cfg)
      : spec_(spec), cfg_(cfg) {}

  void advance(PathState& st, Eigen::Matrix2d& prop, double t, double h, unsigned depth) {
    const Eigen::Matrix2d A0 = coeff(t);
    const Eigen::Matrix2d Am = coeff(t + 0.5 * h);
    const Eigen::Matrix2d A1 = coeff(t + h);
    const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();

    const Eigen::Matrix2d K1 = A0;
    const Eigen::Matrix2d K2 = Am * (I + 0.5 * h * K1);
    const Eigen::Matrix2d K3 = Am * (I + 0.5 * h * K2);
    const Eigen::Matrix2d K4 = A1 * (I + h * K3);
    const Eigen::Matrix2d E = I + (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);

    auto rate = [](const Eigen::Matrix2d& A, double alpha) {
      const Eigen::Vector2d s = unit_vector(alpha);
      return normal_of(s).dot(A * s) / kTwoPi;
    };
    const double k1 = rate(A0, st.alpha);
    const double k2 = rate(Am, st.alpha + 0.5 * h * k1);
    const double k3 = rate(Am, st.alpha + 0.5 * h * k2);
    const double k4 = rate(A1, st.alpha + h * k3);
    const double dalpha = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (std::abs(dalpha) >= 0.25 || (A0 * h).norm() >= kMaxGeneratorNorm) {
      if (depth >= cfg_.max_halvings) {
        throw NumericFailure("integrate_real_noise: step halving floor reached (stiff driver)");
      }
      advance(st, prop, t, 0.5 * h, depth + 1);
      advance(st, prop, t + 0.5 * h, 0.5 * h, depth + 1);
      return;
    }
    prop = E * prop;
    const Eigen::Vector2d v = E * st.s;
    st.s = v / v.norm();
    st.alpha += dalpha;
  }

 private:
  Eigen::Matrix2d coeff(double t) const { return spec_.coefficient(t, cfg_.seed); }

  const RealNoiseSpec& spec_;
  const IntegrationConfig& cfg_;
};

}  // namespace

Grid make_grid(double horizon, const IntegrationConfig& cfg) {
  if (!(horizon > 0.0)) throw std::invalid_argument("integration horizon must be positive");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("integration step dt must be positive");
  const double r = horizon / cfg.dt;
  const double nearest = std::round(r);
  std::size_t n0 = std::abs(r - nearest) <= 1e-9 * std::max(1.0, r)
                       ? static_cast<std::size_t>(nearest)
                       : static_cast<std::size_t>(std::ceil(r));
  n0 = std::max<std::size_t>(n0, 1);
  const std::size_t steps = n0 << cfg.level;
  return {steps, horizon / double(steps)};
}

void simulate(const CocycleSpec& spec, double horizon, const IntegrationConfig& cfg,
              const Eigen::Vector2d& s0, const StepObserver& observer) {
  const Grid grid = make_grid(horizon, cfg);
  const double h0 = horizon / double(grid.steps >> cfg.level);
  PathState st{s0.normalized(), angle_turns(s0)};
  Eigen::Matrix2d prop;

  auto emit = [&](std::size_t k) {
    const double t = (k + 1 == grid.steps) ? horizon : double(k + 1) * grid.h;
    observer(StepView{k + 1, t, prop, st.s, st.alpha});
  };

  if (const auto* det = std::get_if<DeterministicSpec>(&spec)) {
    const Eigen::Matrix2d M = det->A * grid.h;
    const bool direct = M.norm() < kMaxGeneratorNorm;
    const Eigen::Matrix2d E = direct ? expm2(M) : Eigen::Matrix2d::Identity();
    for (std::size_t k = 0; k < grid.steps; ++k) {
      prop.setIdentity();
      if (direct) {
        apply_step(st, prop, E);
      } else {
        deterministic_step(det->A, st, prop, grid.h, 0, cfg.max_halvings);
      }
      emit(k);
    }
  } else if (const auto* rn = std::get_if<RealNoiseSpec>(&spec)) {
    RealNoiseStepper stepper(*rn, cfg);
    for (std::size_t k = 0; k < grid.steps; ++k) {
      prop.setIdentity();
      stepper.advance(st, prop, double(k) * grid.h, grid.h, 0);
      emit(k);
    }
  } else {
    const auto& sde = std::get<SdeSpec>(spec);
    SdeStepper stepper(sde, cfg, h0);
    for (std::size_t k = 0; k < grid.steps; ++k) {
      prop.setIdentity();
      stepper.grid_step(st, prop, k, grid.h);
      emit(k);
    }
  }
}

Trajectory integrate(const CocycleSpec& spec, double T, const IntegrationConfig& cfg,
                     const Eigen::Vector2d& s0) {
  Trajectory traj;
  const Grid grid = make_grid(T, cfg);
  traj.times.reserve(grid.steps + 1);
  traj.matrices.reserve(grid.steps + 1);
  traj.alpha.reserve(grid.steps + 1);
  traj.s.reserve(grid.steps + 1);
  traj.times.push_back(0.0);
  traj.matrices.push_back(Mat2::identity());
  traj.alpha.push_back(angle_turns(s0));
  traj.s.push_back(s0.normalized());
  simulate(spec, T, cfg, s0, [&](const StepView& v) {
    traj.times.push_back(v.t);
    const Eigen::Matrix2d m = v.step * traj.matrices.back().matrix();
    if (!m.allFinite() || !(m.determinant() > 0.0))
      throw NumericFailure("integrate: propagator left the representable range at t = " +
                           std::to_string(v.t));
    traj.matrices.push_back(Mat2(m));
    traj.alpha.push_back(v.alpha);
    traj.s.push_back(v.s);
  });
  return traj;
}

Trajectory integrate_real_noise(const RealNoiseSpec& spec, double T, double dt,
                                std::uint64_t seed, const Eigen::Vector2d& s0) {
  IntegrationConfig cfg;
  cfg.dt = dt;
  cfg.seed = seed;
  return integrate(spec, T, cfg, s0);
}

Trajectory integrate_sde(const SdeSpec& spec, double T, const SdeConfig& cfg,
                         const Eigen::Vector2d& s0) {
  return integrate(spec, T, cfg, s0);
}

Eigen::Matrix2d expm2(const Eigen::Matrix2d& M) {
  const double mu = 0.5 * M.trace();
  Eigen::Matrix2d N = M;
  N.diagonal().array() -= mu;
  // N^2 = delta I for traceless N.
  const double delta = N(0, 0) * N(0, 0) + N(0, 1) * N(1, 0);
  double c = 1.0, sh = 1.0;
  if (delta > 0.0) {
    const double r = std::sqrt(delta);
    c = std::cosh(r);
    sh = std::sinh(r) / r;
  } else if (delta < 0.0) {
    const double r = std::sqrt(-delta);
    c = std::cos(r);
    sh = std::sin(r) / r;
  }
  Eigen::Matrix2d E = sh * N;
  E.diagonal().array() += c;
  return std::exp(mu) * E;
}

Mat2 flow_deterministic(const Eigen::Matrix2d& A, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("flow_deterministic: t must be finite");
  return Mat2(expm2(t * A));
}

double angular_drift(const Eigen::Matrix2d& A, const std::vector<Eigen::Matrix2d>& B,
                     const Eigen::Vector2d& s) {
  const Eigen::Vector2d v = normal_of(s);
  double f = (A * s).dot(v);
  for (const Eigen::Matrix2d& Bi : B) {
    const Eigen::Vector2d Bs = Bi * s;
    f += 0.5 * (Bi * Bs).dot(v) - Bs.dot(s) * Bs.dot(v);
  }
  return f;
}

std::vector<double> integrate_angle_sde(const SdeSpec& spec, double T, const SdeConfig& cfg,
                                        double alpha0) {
  const Grid grid = make_grid(T, cfg);
  const double h0 = T / double(grid.steps >> cfg.level);
  const BrownianPath path(cfg.seed, cfg.stream, h0);
  const std::size_t m = spec.B.size();

  auto drift = [&](double a) {
    const Eigen::Vector2d s = unit_vector(a);
    return normal_of(s).dot(spec.A * s) / kTwoPi;
  };
  auto diffusion = [&](double a, std::size_t i) {
    const Eigen::Vector2d s = unit_vector(a);
    return normal_of(s).dot(spec.B[i] * s) / kTwoPi;
  };

  std::vector<double> alpha(grid.steps + 1);
  alpha[0] = alpha0;
  std::vector<double> dw(m);
  for (std::size_t k = 0; k < grid.steps; ++k) {
    for (std::size_t i = 0; i < m; ++i) dw[i] = path.increment(cfg.level, k, unsigned(i));
    const double a = alpha[k];
    double pred = a + drift(a) * grid.h;
    for (std::size_t i = 0; i < m; ++i) pred += diffusion(a, i) * dw[i];
    double next = a + 0.5 * (drift(a) + drift(pred)) * grid.h;
    for (std::size_t i = 0; i < m; ++i) next += 0.5 * (diffusion(a, i) + diffusion(pred, i)) * dw[i];
    alpha[k + 1] = next;
  }
  return alpha;
}

RotationEstimate continuous_rotation_number(const Trajectory& traj) {
  if (traj.times.size() < 2 || !(traj.times.back() > traj.times.front())) {
    throw std::invalid_argument("continuous_rotation_number: trajectory must cover T > 0");
  }
  RotationEstimate est;
  est.value = (traj.alpha.back() - traj.alpha.front()) / (traj.times.back() - traj.times.front());
  est.n = traj.times.size() - 1;
  return est;
}

Eigen::Matrix2d rotation_generator(double turns_per_time) {
  const double w = kTwoPi * turns_per_time;
  return (Eigen::Matrix2d() << 0.0, -w, w, 0.0).finished();
}

SdeSpec brownian_rotation_spec(double drift, double noise) {
  return SdeSpec{rotation_generator(drift), {rotation_generator(noise)}};
}

RealNoiseSpec quasi_periodic_noise(const Eigen::Matrix2d& base, const Eigen::Matrix2d& modulation,
                                   double frequency) {
  return RealNoiseSpec{[base, modulation, frequency](double t, std::uint64_t seed) {
    const double phase = uniform_open(splitmix64(seed ^ 0x7a11ULL));
    return Eigen::Matrix2d(base + std::sin(kTwoPi * (frequency * t + phase)) * modulation);
  }};
}

}  // namespace rotnum
