#include "rotnum/random_composition.hpp"

#include <algorithm>
#include <array>

#include "rotnum/parallel.hpp"
#include "rotnum/random.hpp"

namespace rotnum {

IidHomeoSampler IidHomeoSampler::from_list(std::vector<Lift> lifts, std::vector<double> weights,
                                           std::uint64_t seed) {
  if (lifts.empty() || lifts.size() != weights.size()) {
    throw std::invalid_argument("IidHomeoSampler::from_list: need one weight per lift");
  }
  auto pool = std::make_shared<const std::vector<Lift>>(std::move(lifts));
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  return IidHomeoSampler(
      [pool, pick](std::mt19937_64& rng) mutable { return (*pool)[pick(rng)]; }, seed);
}

CyclicHomeoSampler::CyclicHomeoSampler(std::vector<Lift> cycle, std::size_t phase)
    : cycle_(std::move(cycle)), phase_(phase), index_(0) {
  if (cycle_.empty()) throw std::invalid_argument("CyclicHomeoSampler: empty cycle");
  phase_ %= cycle_.size();
  index_ = phase_;
}

void IrrationalRotationDriver::reset(std::uint64_t seed) {
  omega_ = uniform_open(splitmix64(seed ^ 0x1f2e3d4c5b6a7988ULL));
}

double beta_displacement(const Lift& f, double s) { return f.displacement(s); }

std::uint64_t replica_seed(std::uint64_t seed, std::size_t replica) {
  return hash_key({seed, 0x5eedULL, replica});
}

namespace {

double composed_travel(HomeoSampler& s, std::size_t n, double x0) {
  LiftComposer comp(x0);
  for (std::size_t i = 0; i < n; ++i) comp.push(s.next());
  return comp.travelled();
}

}  // namespace

RotationEstimate compose_rotation_number(const HomeoSampler& sampler, std::size_t n, double x0,
                                         std::size_t replicas, std::uint64_t seed,
                                         unsigned workers) {
  if (n == 0) throw std::invalid_argument("compose_rotation_number: n must be >= 1");
  if (replicas == 0) throw std::invalid_argument("compose_rotation_number: replicas must be >= 1");
  RotationEstimate est;
  est.n = n;
  est.truncation_bound = 1.0 / double(n);
  if (replicas == 1) {
    auto s = sampler.clone();
    s->reset(seed);
    est.value = wrap_turn(composed_travel(*s, n, x0) / double(n));
    return est;
  }
  const auto rates = parallel_map(replicas, workers, [&](std::size_t r) {
    auto s = sampler.clone();
    s->reset(replica_seed(seed, r));
    return composed_travel(*s, n, x0) / double(n);
  });
  const SampleStats st = sample_stats(rates);
  est.value = wrap_turn(st.mean);
  est.std_error = st.std_error;
  return est;
}

RotationEstimate pointwise_rotation(const HomeoSampler& sampler, std::size_t n, double p,
                                    std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("pointwise_rotation: n must be >= 1");
  auto s = sampler.clone();
  s->reset(seed);
  std::vector<double> images(n);
  double q = wrap_turn(p);
  for (std::size_t i = 0; i < n; ++i) {
    q = wrap_turn(s->next()(q));
    images[i] = q;
  }
  return orbit_rotation_number(ordered_lifted_orbit(images, p));
}

OccupationResult ergodic_rotation_via_occupation(const HomeoSampler& sampler, std::size_t n,
                                                 std::size_t replicas, std::uint64_t seed,
                                                 std::size_t bins, double p0, unsigned workers) {
  if (n == 0 || replicas == 0) {
    throw std::invalid_argument("ergodic_rotation_via_occupation: n and replicas must be >= 1");
  }
  struct Run {
    double rate = 0.0;
    EmpiricalMeasure measure{1};
  };
  const auto runs = parallel_map(replicas, workers, [&](std::size_t r) {
    auto s = sampler.clone();
    s->reset(replicas == 1 ? seed : replica_seed(seed, r));
    Run run{0.0, EmpiricalMeasure(bins)};
    LiftComposer comp(p0);
    for (std::size_t i = 0; i < n; ++i) {
      run.measure.add(comp.position());
      comp.push(s->next());
    }
    run.rate = comp.travelled() / double(n);
    return run;
  });
  OccupationResult out{RotationEstimate{}, EmpiricalMeasure(bins)};
  std::vector<double> rates;
  rates.reserve(runs.size());
  for (const Run& run : runs) {
    rates.push_back(run.rate);
    out.measure.merge(run.measure);
  }
  const SampleStats st = sample_stats(rates);
  out.estimate.value = wrap_turn(st.mean);
  out.estimate.n = n;
  out.estimate.std_error = st.std_error;
  out.estimate.truncation_bound = 1.0 / double(n);
  return out;
}

double iid_integral_formula(const HomeoSampler& sampler, const EmpiricalMeasure& nu,
                            std::size_t draws, std::uint64_t seed) {
  if (draws == 0) throw std::invalid_argument("iid_integral_formula: draws must be >= 1");
  auto s = sampler.clone();
  s->reset(seed);
  std::vector<Lift> fs;
  fs.reserve(draws);
  for (std::size_t j = 0; j < draws; ++j) fs.push_back(s->next());
  return nu.integrate([&](double c) {
    double acc = 0.0;
    for (const Lift& f : fs) acc += f.displacement(c);
    return acc / double(draws);
  });
}

InvariantAverage invariant_average_check(const CircleHomeo& f, const EmpiricalMeasure& nu) {
  InvariantAverage out;
  out.value = wrap_turn(nu.integrate([&](double c) { return f.lift.displacement(c); }));
  EmpiricalMeasure pushed(nu.bins());
  for (std::size_t b = 0; b < nu.bins(); ++b) {
    const double m = nu.mass(b);
    if (m != 0.0) pushed.add(f.lift(nu.bin_center(b)), m);
  }
  double cdf_nu = 0.0, cdf_push = 0.0;
  for (std::size_t b = 0; b < nu.bins(); ++b) {
    cdf_nu += nu.mass(b);
    cdf_push += pushed.mass(b);
    out.pushforward_defect = std::max(out.pushforward_defect, std::abs(cdf_nu - cdf_push));
  }
  return out;
}

std::vector<Lift> four_cycle_maps() {
  const std::array<double, 4> from{1.0 / 8, 3.0 / 8, 5.0 / 8, 7.0 / 8};
  const std::array<double, 4> to{3.0 / 8, 5.0 / 8, 7.0 / 8, 1.0 / 8};
  std::vector<Lift> maps;
  for (std::size_t i = 0; i < 4; ++i) {
    const std::array<double, 2> kx{0.0, from[i]};
    const std::array<double, 2> ky{0.0, to[i]};
    maps.push_back(Lift::piecewise_linear(kx, ky));
  }
  return maps;
}

}  // namespace rotnum
