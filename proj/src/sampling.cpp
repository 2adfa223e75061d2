#include "rotnum/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rotnum/random_composition.hpp"

namespace rotnum {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Integration config whose step divides T exactly.
IntegrationConfig aligned_config(IntegrationConfig cfg, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("sampling period T must be positive");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("integration step dt must be positive");
  const double m = std::max(1.0, std::round(T / cfg.dt));
  cfg.dt = T / m;
  return cfg;
}

std::size_t steps_per(double T, double h) {
  const double r = T / h;
  const double m = std::round(r);
  if (m < 1.0 || std::abs(r - m) > 1e-9 * r) {
    throw std::invalid_argument("T grid: every T must be a whole number of integration steps");
  }
  return static_cast<std::size_t>(m);
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double standard_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(kTwoPi);
}

}  // namespace

std::vector<Mat2> sample_matrices(const CocycleSpec& spec, double T, std::size_t n,
                                  const IntegrationConfig& cfg) {
  if (n == 0) throw std::invalid_argument("sample_matrices: n must be >= 1");
  const IntegrationConfig c = aligned_config(cfg, T);
  const std::size_t m = steps_per(T, c.dt);
  std::vector<Mat2> out;
  out.reserve(n);
  Eigen::Matrix2d W = Eigen::Matrix2d::Identity();
  simulate(spec, double(n) * T, c, Eigen::Vector2d::UnitX(), [&](const StepView& v) {
    W = v.step * W;
    if (v.index % m == 0) {
      out.emplace_back(W);
      W.setIdentity();
    }
  });
  return out;
}

std::vector<Mat2> sample_matrices(const CocycleSpec& spec, double T, std::size_t n,
                                  std::uint64_t seed) {
  IntegrationConfig cfg;
  cfg.seed = seed;
  return sample_matrices(spec, T, n, cfg);
}

RotationEstimate sampled_rotation_number(const std::vector<Mat2>& mats) {
  if (mats.empty()) throw std::invalid_argument("sampled_rotation_number: empty sequence");
  ProjectiveComposer comp(0.0);
  for (const Mat2& g : mats) comp.push(g);
  RotationEstimate est;
  est.value = wrap_turn(comp.travelled() / double(mats.size()));
  est.n = mats.size();
  est.truncation_bound = 1.0 / double(mats.size());
  return est;
}

RotationEstimate sampled_rotation_number(const std::vector<std::vector<Mat2>>& sequences) {
  if (sequences.empty()) throw std::invalid_argument("sampled_rotation_number: no sequences");
  std::vector<double> rates;
  rates.reserve(sequences.size());
  std::size_t n = 0;
  for (const auto& mats : sequences) {
    if (mats.empty()) throw std::invalid_argument("sampled_rotation_number: empty sequence");
    ProjectiveComposer comp(0.0);
    for (const Mat2& g : mats) comp.push(g);
    rates.push_back(comp.travelled() / double(mats.size()));
    n = std::max(n, mats.size());
  }
  const SampleStats st = sample_stats(rates);
  RotationEstimate est;
  est.value = wrap_turn(st.mean);
  est.n = n;
  est.std_error = st.std_error;
  est.truncation_bound = 1.0 / double(n);
  return est;
}

StudyTable convergence_study(const SamplingStudy& study) {
  if (study.T_grid.empty()) throw std::invalid_argument("convergence_study: empty T grid");
  if (study.steps_per_T == 0 || study.replicas == 0) {
    throw std::invalid_argument("convergence_study: steps_per_T and replicas must be >= 1");
  }
  for (double T : study.T_grid) {
    if (!(T > 0.0)) throw std::invalid_argument("convergence_study: T must be positive");
  }
  const double T_min = *std::min_element(study.T_grid.begin(), study.T_grid.end());
  const IntegrationConfig base = aligned_config(study.integration, T_min);
  const double horizon = double(study.steps_per_T) * T_min;
  const std::size_t nT = study.T_grid.size();
  std::vector<std::size_t> stride(nT);
  for (std::size_t j = 0; j < nT; ++j) stride[j] = steps_per(study.T_grid[j], base.dt);

  struct ReplicaResult {
    std::vector<double> rates;
    std::vector<std::size_t> windows;
    double cont = 0.0;
  };

  const double x0 = angle_turns(study.s0);
  const auto results = parallel_map(study.replicas, study.workers, [&](std::size_t r) {
    IntegrationConfig cfg = base;
    cfg.seed = study.replicas == 1 ? study.seed : replica_seed(study.seed, r);
    std::vector<ProjectiveComposer> comps(nT, ProjectiveComposer(x0));
    std::vector<Eigen::Matrix2d> W(nT, Eigen::Matrix2d::Identity());
    double alpha_end = x0;
    simulate(study.spec, horizon, cfg, study.s0, [&](const StepView& v) {
      for (std::size_t j = 0; j < nT; ++j) {
        W[j] = v.step * W[j];
        if (v.index % stride[j] == 0) {
          comps[j].push(Mat2(W[j]));
          W[j].setIdentity();
        }
      }
      alpha_end = v.alpha;
    });
    ReplicaResult out;
    for (std::size_t j = 0; j < nT; ++j) {
      out.windows.push_back(comps[j].count());
      out.rates.push_back(comps[j].count() ? comps[j].travelled() / double(comps[j].count()) : 0.0);
    }
    out.cont = (alpha_end - x0) / horizon;
    return out;
  });

  StudyTable table;
  for (std::size_t j = 0; j < nT; ++j) {
    std::vector<double> rates;
    for (const auto& res : results) rates.push_back(res.rates[j]);
    const SampleStats st = sample_stats(rates);
    StudyRow row;
    row.T = study.T_grid[j];
    row.windows = results.front().windows[j];
    if (row.windows == 0) {
      throw std::invalid_argument("convergence_study: a T in the grid exceeds the path length");
    }
    row.rho_T = wrap_turn(st.mean);
    row.rho_over_T = row.rho_T / row.T;
    row.std_error = st.std_error / row.T;
    table.rows.push_back(row);
  }
  std::vector<double> cont;
  for (const auto& res : results) cont.push_back(res.cont);
  const SampleStats cs = sample_stats(cont);
  table.rho_cont.value = cs.mean;
  table.rho_cont.std_error = cs.std_error;
  table.rho_cont.n = make_grid(horizon, base).steps;

  for (std::size_t j = 0; j + 1 < nT; ++j) {
    const StudyRow& a = table.rows[j];
    const StudyRow& b = table.rows[j + 1];
    // Rounding allowance for noise-free studies where both errors vanish.
    const double slack = 2.0 * std::hypot(a.std_error, b.std_error) +
                         1e-12 * std::max(1.0, std::abs(cs.mean));
    if (std::abs(b.rho_over_T - cs.mean) > std::abs(a.rho_over_T - cs.mean) + slack) {
      table.monotone = false;
    }
  }
  return table;
}

double flow_rotation_rate(const Eigen::Matrix2d& A) {
  const double half_diff = 0.5 * (A(0, 0) - A(1, 1));
  const double disc = half_diff * half_diff + A(0, 1) * A(1, 0);
  if (disc >= 0.0) return 0.0;
  const double b = std::sqrt(-disc);
  return (A(1, 0) > 0.0 ? b : -b) / kTwoPi;
}

NyquistResult nyquist_check(const Eigen::Matrix2d& A, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("nyquist_check: T must be positive");
  NyquistResult res;
  res.rho_cont = flow_rotation_rate(A);
  res.rho_T = eigen_rotation_number(flow_deterministic(A, T));
  res.rho_T_over_T = res.rho_T / T;
  const bool below = res.rho_cont == 0.0 || T < 1.0 / (2.0 * std::abs(res.rho_cont));
  res.exact = below && std::abs(res.rho_T_over_T - res.rho_cont) < 1e-12;
  return res;
}

BetaSamples beta_T_samples(const CocycleSpec& spec, double T, std::size_t n_samples,
                           const IntegrationConfig& cfg, const Eigen::Vector2d& s0,
                           std::size_t bins, unsigned workers) {
  if (n_samples == 0) throw std::invalid_argument("beta_T_samples: n_samples must be >= 1");
  const IntegrationConfig base = aligned_config(cfg, T);
  // Contiguous chunks keep the per-task overhead small for short windows.
  const std::size_t chunk = 4096;
  const std::size_t tasks = (n_samples + chunk - 1) / chunk;
  const auto parts = parallel_map(tasks, workers, [&](std::size_t t) {
    std::vector<double> out;
    const std::size_t lo = t * chunk, hi = std::min(n_samples, lo + chunk);
    IntegrationConfig c = base;
    for (std::size_t r = lo; r < hi; ++r) {
      c.seed = replica_seed(cfg.seed, r);
      double a0 = angle_turns(s0), a1 = a0;
      simulate(spec, T, c, s0, [&](const StepView& v) { a1 = v.alpha; });
      out.push_back(wrap_turn(a1 - a0));
    }
    return out;
  });
  BetaSamples res{{}, {}, EmpiricalMeasure(bins)};
  res.samples.reserve(n_samples);
  for (const auto& p : parts) res.samples.insert(res.samples.end(), p.begin(), p.end());
  for (double b : res.samples) res.histogram.add(b);
  res.stats = sample_stats(res.samples);
  return res;
}

double wrapped_gaussian_mean(double mu, double variance) {
  if (!(variance > 0.0)) return wrap_turn(mu);
  const double sigma = std::sqrt(variance);
  // Sum over the unit translates [k - 1/2, k + 1/2] of the integral of
  // (x - k) against the normal density.
  const long k0 = winding_level(mu);
  const long reach = static_cast<long>(std::ceil(10.0 * sigma)) + 1;
  double total = 0.0;
  for (long k = k0 - reach; k <= k0 + reach; ++k) {
    const double lo = (double(k) - 0.5 - mu) / sigma;
    const double hi = (double(k) + 0.5 - mu) / sigma;
    total += (mu - double(k)) * (standard_normal_cdf(hi) - standard_normal_cdf(lo)) +
             sigma * (standard_normal_pdf(lo) - standard_normal_pdf(hi));
  }
  return total;
}

double wrapped_gaussian_cdf(double y, double mu, double variance) {
  if (!(variance > 0.0)) return y >= wrap_turn(mu) ? 1.0 : 0.0;
  const double sigma = std::sqrt(variance);
  const long k0 = winding_level(mu);
  const long reach = static_cast<long>(std::ceil(10.0 * sigma)) + 1;
  double total = 0.0;
  for (long k = k0 - reach; k <= k0 + reach; ++k) {
    total += standard_normal_cdf((double(k) + y - mu) / sigma) -
             standard_normal_cdf((double(k) - 0.5 - mu) / sigma);
  }
  return total;
}

namespace {

struct WindowRun {
  WindingRecord record;
  Eigen::Matrix2d window = Eigen::Matrix2d::Identity();
};

WindowRun run_window(const CocycleSpec& spec, double T, const IntegrationConfig& cfg,
                     const Eigen::Vector2d& s0) {
  WindowRun run;
  const double a0 = angle_turns(s0);
  long level = 0;
  simulate(spec, T, cfg, s0, [&](const StepView& v) {
    run.window = v.step * run.window;
    const long next = winding_level(v.alpha - a0);
    if (next != level) {
      if (next > level) {
        run.record.N_plus += next - level;
      } else {
        run.record.N_minus += level - next;
      }
      if (run.record.first_crossing < 0.0) run.record.first_crossing = v.t;
      level = next;
    }
    run.record.increment = v.alpha - a0;
  });
  return run;
}

}  // namespace

WindingSummary winding_counts(const CocycleSpec& spec, double T, std::size_t n_samples,
                              double fine_dt, std::uint64_t seed, const Eigen::Vector2d& s0,
                              unsigned workers) {
  if (n_samples == 0) throw std::invalid_argument("winding_counts: n_samples must be >= 1");
  if (!(fine_dt > 0.0) || fine_dt > T) {
    throw std::invalid_argument("winding_counts: fine_dt must lie in (0, T]");
  }
  IntegrationConfig base;
  base.dt = fine_dt;
  base = aligned_config(base, T);
  WindingSummary out;
  out.records = parallel_map(n_samples, workers, [&](std::size_t r) {
    IntegrationConfig c = base;
    c.seed = replica_seed(seed, r);
    return run_window(spec, T, c, s0).record;
  });
  std::vector<double> plus, minus;
  for (const auto& w : out.records) {
    plus.push_back(double(w.N_plus));
    minus.push_back(double(w.N_minus));
  }
  const SampleStats sp = sample_stats(plus), sm = sample_stats(minus);
  out.E_Nplus_over_T = sp.mean / T;
  out.E_Nminus_over_T = sm.mean / T;
  out.Nplus_std_error = sp.std_error / T;
  out.Nminus_std_error = sm.std_error / T;
  return out;
}

IdentityDefect erratum_identity_check(const CocycleSpec& spec, double T, std::size_t n_samples,
                                      std::uint64_t seed, double fine_dt, unsigned workers) {
  if (n_samples == 0) throw std::invalid_argument("erratum_identity_check: n_samples must be >= 1");
  IntegrationConfig base;
  base.dt = fine_dt > 0.0 ? fine_dt : T / 256.0;
  base = aligned_config(base, T);
  struct Defect {
    long integer = 0;
    double angle = 0.0;
  };
  const auto defects = parallel_map(n_samples, workers, [&](std::size_t r) {
    IntegrationConfig c = base;
    c.seed = replica_seed(seed, r);
    const WindowRun run = run_window(spec, T, c, Eigen::Vector2d::UnitX());
    const double inc = run.record.increment;
    const double beta = wrap_turn(inc);
    const long k = std::lround(inc - beta);
    const double beta_lift = matrix_lift(Mat2(run.window))(0.0);
    return Defect{std::labs(k - run.record.net()), circular_distance(beta, beta_lift)};
  });
  IdentityDefect out;
  out.samples = n_samples;
  for (const Defect& d : defects) {
    out.integer_defect = std::max(out.integer_defect, d.integer);
    out.angle_defect = std::max(out.angle_defect, d.angle);
  }
  return out;
}

}  // namespace rotnum
