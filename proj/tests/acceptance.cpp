// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "rotnum/circle.hpp"
#include "rotnum/cocycle.hpp"
#include "rotnum/linear.hpp"
#include "rotnum/random.hpp"
#include "rotnum/random_composition.hpp"
#include "rotnum/report.hpp"
#include "rotnum/sampling.hpp"

using namespace rotnum;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "!") + what;
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int failures = 0;

void criterion(int id, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < budget_s;
  const bool ok = o.pass && in_time;
  if (!ok) ++failures;
  std::printf("%s criterion %d (%.1fs of %.0fs) %s\n", ok ? "PASS" : "FAIL", id, secs, budget_s,
              o.detail.c_str());
  std::fflush(stdout);
}

Mat2 random_gl2_plus(std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  for (;;) {
    Eigen::Matrix2d m;
    m << z(rng), z(rng), z(rng), z(rng);
    if (m.determinant() > 1e-3) return Mat2(m);
  }
}

const CocycleSpec& example4() {
  static const CocycleSpec spec = make_spec(CocycleConfig{});
  return spec;
}

Outcome c1() {
  Outcome o;
  const CyclicHomeoSampler cycle(four_cycle_maps());
  o.require(compose_rotation_number(cycle, 400, 0.0).value == 0.0, "first approach = 0");
  auto s = cycle.clone();
  std::vector<double> images;
  double p = 0.125;
  for (int i = 0; i < 100; ++i) images.push_back(p = wrap_turn(s->next()(p)));
  const OrbitSequence orbit = ordered_lifted_orbit(images, 0.125);
  double worst = 0.0;
  for (std::size_t n = 0; n < orbit.thetas.size(); ++n)
    worst = std::max(worst, std::abs(orbit.thetas[n] - (2.0 * double(n) + 1.0) / 8.0));
  o.require(worst < 1e-12, "theta_n = (2n+1)/8 for n <= 100, max err " + fmt("%.1e", worst));
  const double second = orbit_rotation_number(orbit).value;
  o.require(std::abs(second - 0.25) < 1e-12, "second approach at 1/8 = " + fmt("%.15g", second));
  return o;
}

Outcome c2() {
  Outcome o;
  std::mt19937_64 rng(2024);
  const std::size_t n = 1000000;
  const double tol = 2e-6 + 1e-9;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Mat2 g = random_gl2_plus(rng);
    const double d = circular_distance(iterated_matrix_rotation_number(g, n).value,
                                       eigen_rotation_number(g));
    worst = std::max(worst, d);
  }
  o.require(worst <= tol, "1000 matrices, n = 1e6, max |iter - eigen| = " + fmt("%.3e", worst));
  return o;
}

Outcome c3() {
  Outcome o;
  const std::size_t n = 1000000;
  const IidMatrixSampler s = uniform_rotation_sampler(0.05, 0.35);
  const RotationEstimate est = product_rotation_number(s, n / 32, 32, 3);
  o.require(std::abs(est.value - 0.2) <= 3.0 * est.std_error,
            "rho = " + fmt("%.6f", est.value) + " se " + fmt("%.2e", est.std_error));
  const EmpiricalMeasure nu = stationary_measure_estimate(s, n, 3, 1024);
  const double dev = nu.max_deviation_from_uniform();
  o.require(dev < 0.005, "sup bin deviation " + fmt("%.2e", dev));
  return o;
}

Outcome c4() {
  Outcome o;
  for (double p : {0.2, 0.5, 0.8}) {
    const RotationEstimate est = product_rotation_number(triangular_sampler(p), 100000, 32, 4);
    o.require(std::abs(est.value - p / 2) <= 3.0 * est.std_error,
              "p=" + fmt("%.1f", p) + " rho " + fmt("%.5f", est.value) + " se " +
                  fmt("%.1e", est.std_error));
  }
  return o;
}

Outcome c5() {
  Outcome o;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  double worst = 0.0;
  for (int trial = 0; trial < 100;) {
    Eigen::Matrix2d A;
    A << u(rng), u(rng), u(rng), u(rng);
    const double tr = A.trace();
    if (tr * tr >= 4.0 * A.determinant()) continue;
    const double rho = std::abs(flow_rotation_rate(A));
    const double T = frac(rng) / (2.0 * rho);
    const NyquistResult r = nyquist_check(A, T);
    worst = std::max(worst, std::abs(r.rho_T_over_T - r.rho_cont));
    ++trial;
  }
  o.require(worst < 1e-12, "100 complex generators below Nyquist, max err " + fmt("%.1e", worst));
  const NyquistResult alias = nyquist_check(rotation_generator(1.0), 0.75);
  o.require(std::abs(alias.rho_T_over_T + 1.0 / 3.0) < 1e-12,
            "aliased T=0.75 rho_T/T = " + fmt("%.15g", alias.rho_T_over_T));
  return o;
}

// Example 4 has A and B proportional to the same rotation generator, so
// beta = wrap(T + W_T) in law.
Outcome c6() {
  Outcome o;
  const std::size_t n = 1000000;
  struct Case {
    double T, dt, quoted, quoted_tol;
  };
  for (const Case c : {Case{0.25, 1e-2, 0.0259, 0.002}, Case{0.02, 1e-3, 0.0197, 0.001}}) {
    IntegrationConfig cfg;
    cfg.dt = c.dt;
    cfg.seed = 6;
    const BetaSamples b = beta_T_samples(example4(), c.T, n, cfg);
    const double oracle = wrapped_gaussian_mean(c.T, c.T);
    const std::string tag = "T=" + fmt("%.2f", c.T) + " mean " + fmt("%.5f", b.stats.mean) +
                            " se " + fmt("%.1e", b.stats.std_error);
    o.require(std::abs(b.stats.mean - c.quoted) <= c.quoted_tol,
              tag + " vs quoted " + fmt("%.4f", c.quoted));
    o.require(std::abs(b.stats.mean - oracle) <= 3.0 * b.stats.std_error,
              "T=" + fmt("%.2f", c.T) + " vs wrapped Gaussian " + fmt("%.5f", oracle));
  }
  return o;
}

// Not a criterion: the value quoted for T = 0.25 equals the oracle at T = 0.1.
void info_t01() {
  IntegrationConfig cfg;
  cfg.dt = 1e-2;
  cfg.seed = 61;
  const BetaSamples b = beta_T_samples(example4(), 0.1, 200000, cfg);
  std::printf("INFO  T=0.10 mean %.5f se %.1e, wrapped Gaussian %.5f\n", b.stats.mean,
              b.stats.std_error, wrapped_gaussian_mean(0.1, 0.1));
}

Outcome c7() {
  Outcome o;
  SamplingStudy st;
  st.spec = example4();
  st.T_grid = {0.5, 0.25, 0.1, 0.05, 0.02};
  st.steps_per_T = 200000;
  st.replicas = 32;
  st.seed = 7;
  st.integration.dt = 1e-3;
  const StudyTable t = convergence_study(st);
  double worst = -1e300;
  bool nondecreasing = true;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const StudyRow& r = t.rows[i];
    worst = std::max(worst, r.rho_over_T);
    if (i > 0) {
      const StudyRow& q = t.rows[i - 1];
      if (r.rho_over_T < q.rho_over_T - 2.0 * std::hypot(r.std_error, q.std_error))
        nondecreasing = false;
    }
    std::printf("      T=%.2f rho_T/T=%.5f se %.1e\n", r.T, r.rho_over_T, r.std_error);
  }
  o.require(worst < 1.0, "max rho_T/T " + fmt("%.5f", worst));
  o.require(nondecreasing, "nondecreasing within 2 se");
  const double last = t.rows.back().rho_over_T;
  o.require(std::abs(last - 1.0) <= 0.02, "T=0.02 value " + fmt("%.5f", last));
  o.require(std::abs(t.rho_cont.value - 1.0) <= 3.0 * t.rho_cont.std_error,
            "rho_cont " + fmt("%.5f", t.rho_cont.value));
  return o;
}

Outcome c8() {
  Outcome o;
  const std::size_t n = 100000;
  const WindingSummary a = winding_counts(example4(), 0.25, n, 0.25 / 256, 8);
  const WindingSummary b = winding_counts(example4(), 0.02, n, 0.02 / 256, 8);
  std::printf("      E[N+]/T %.4f -> %.4f, E[N-]/T %.4f -> %.4f\n", a.E_Nplus_over_T,
              b.E_Nplus_over_T, a.E_Nminus_over_T, b.E_Nminus_over_T);
  o.require(a.E_Nplus_over_T >= 3.0 * b.E_Nplus_over_T && a.E_Nplus_over_T > 0.0,
            "N+ ratio " + fmt("%.1f", a.E_Nplus_over_T / b.E_Nplus_over_T));
  o.require(a.E_Nminus_over_T >= 3.0 * b.E_Nminus_over_T && a.E_Nminus_over_T > 0.0,
            "N- ratio " + fmt("%.1f", a.E_Nminus_over_T / std::max(b.E_Nminus_over_T, 1e-300)));
  const IdentityDefect d = erratum_identity_check(example4(), 0.25, 10000, 88);
  o.require(d.integer_defect == 0 && d.samples == 10000,
            "integer defect " + std::to_string(d.integer_defect) + " on " +
                std::to_string(d.samples) + " samples");
  o.require(d.angle_defect < 1e-6, "angle defect " + fmt("%.1e", d.angle_defect));
  return o;
}

Lift random_lift(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  std::uniform_real_distribution<double> shift(-2.0, 2.0);
  const double a = u(rng), b = u(rng), c = shift(rng);
  constexpr double tau = 2.0 * std::numbers::pi;
  return normalize_lift(std::function<double(double)>(
      [=](double x) { return x + c + a * std::sin(tau * x) + b * std::cos(2.0 * tau * x); }));
}

Outcome c9() {
  Outcome o;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> wide(-1e6, 1e6);

  bool wrap_ok = wrap_turn(0.5) == 0.5 && wrap_turn(-0.5) == 0.5 && wrap_turn(1.5) == 0.5;
  for (int i = 0; i < 100000; ++i) {
    const double x = wide(rng), w = wrap_turn(x);
    wrap_ok = wrap_ok && w > -0.5 && w <= 0.5 && wrap_turn(w) == w;
  }
  o.require(wrap_ok, "wrap idempotence and boundary");

  bool lift_ok = true, x0_ok = true, conj_ok = true;
  const std::size_t n = 5000;
  for (int trial = 0; trial < 50; ++trial) {
    const Lift F = random_lift(rng);
    for (int i = 0; i <= 100; ++i) {
      const double x = -1.0 + i / 50.0;
      lift_ok = lift_ok && std::abs(F(x + 1.0) - F(x) - 1.0) < 1e-9 && F(x + 0.01) > F(x) &&
                std::abs(F.displacement(x)) < 1.5;
    }
    const double r0 = classical_rotation_number(F, n, 0.0).value;
    const double r1 = classical_rotation_number(F, n, 0.37).value;
    x0_ok = x0_ok && circular_distance(r0, r1) <= 2.0 / n;
    const CircleHomeo f{F}, h{random_lift(rng)};
    const double rc = classical_rotation_number(conjugate(h, f), n).value;
    const double rr = classical_rotation_number(conjugate(h, f, true), n).value;
    conj_ok = conj_ok && circular_distance(rc, r0) <= 4.0 / n && circular_distance(rr, -r0) <= 4.0 / n;
  }
  o.require(lift_ok, "lift invariants");
  o.require(x0_ok, "initial-point bound 2/n");
  o.require(conj_ok, "conjugacy invariance and reversal sign flip");

  bool half_ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const Lift F = matrix_lift(random_gl2_plus(rng));
    for (int i = 0; i <= 32; ++i) {
      const double x = -1.0 + i / 16.0;
      half_ok = half_ok && std::abs(F(x + 0.5) - F(x) - 0.5) < 1e-9;
    }
  }
  o.require(half_ok, "period-1/2 linear lifts");

  IntegrationConfig cfg;
  cfg.seed = 99;
  const std::vector<Mat2> windows = sample_matrices(example4(), 0.1, 10, cfg);
  const Trajectory full = integrate(example4(), 1.0, cfg);
  Eigen::Matrix2d prod = Eigen::Matrix2d::Identity();
  for (const Mat2& w : windows) prod = w.matrix() * prod;
  const double cocycle_err = (prod - full.matrices.back().matrix()).norm();
  o.require(cocycle_err < 1e-9, "window product identity " + fmt("%.1e", cocycle_err));

  // Heun converges to the exponential scheme under refinement of one path.
  const SdeSpec tilted{Eigen::Matrix2d{{0.3, -6.0}, {6.5, -0.2}}, {Eigen::Matrix2d{{0.0, -1.0}, {1.2, 0.1}}}};
  IntegrationConfig e = cfg, h8 = cfg;
  e.level = 10;
  h8.level = 8;
  h8.scheme = SdeScheme::heun;
  const double heun_err =
      (integrate(tilted, 1.0, h8).matrices.back().matrix() - integrate(tilted, 1.0, e).matrices.back().matrix())
          .norm();
  o.require(heun_err < 1e-2, "Heun vs exponential " + fmt("%.1e", heun_err));

  // Zero noise reduces to the matrix exponential.
  const SdeSpec ode{Eigen::Matrix2d{{0.3, -6.0}, {6.5, -0.2}}, {}};
  const double ode_err = (integrate(ode, 1.0, cfg).matrices.back().matrix() -
                          expm2(Eigen::Matrix2d{{0.3, -6.0}, {6.5, -0.2}}))
                             .norm();
  o.require(ode_err < 1e-9, "ODE vs expm " + fmt("%.1e", ode_err));
  return o;
}

}  // namespace

int main() {
  criterion(1, 1, c1);
  criterion(2, 60, c2);
  criterion(3, 30, c3);
  criterion(4, 30, c4);
  criterion(5, 5, c5);
  criterion(6, 120, c6);
  info_t01();
  criterion(7, 300, c7);
  criterion(8, 300, c8);
  criterion(9, 180, c9);
  std::printf("%d criteria failed\n", failures);
  return failures;
}
