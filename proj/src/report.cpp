#include "rotnum/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "rotnum/circle.hpp"
#include "rotnum/linear.hpp"
#include "rotnum/random_composition.hpp"
#include "rotnum/sampling.hpp"

namespace rotnum {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CocycleConfig, kind, A, B, modulation, frequency,
                                                scale)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(StudyConfig, command, example, cocycle, T, T_grid,
                                                n, replicas, samples, seed, workers, dt,
                                                fine_steps, bins, scheme, omega, coupling, matrix,
                                                sampler, lo, hi, p_negative, out, format)

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void reject_unknown_keys(const json& given, const json& reference, const std::string& where) {
  for (const auto& [key, value] : given.items()) {
    if (!reference.contains(key)) {
      throw std::invalid_argument("config: unknown key '" + where + key + "'");
    }
    if (value.is_object() && reference[key].is_object()) {
      reject_unknown_keys(value, reference[key], where + key + ".");
    }
  }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

json check_json(const Check& c) {
  return {{"name", c.name},         {"value", c.value},         {"std_error", c.std_error},
          {"expected", c.expected}, {"tolerance", c.tolerance}, {"pass", c.pass}};
}

Check bound_check(std::string name, double value, double bound) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.expected = bound;
  c.pass = value < bound;
  return c;
}

// Statistical tolerance: three standard errors, or the truncation bound for
// a single deterministic run.
double three_sigma(double std_error, double fallback) {
  return std_error > 0.0 ? 3.0 * std_error : fallback;
}

SdeScheme parse_scheme(const std::string& s) {
  if (s == "exponential") return SdeScheme::exponential;
  if (s == "heun") return SdeScheme::heun;
  throw std::invalid_argument("unknown scheme '" + s + "' (expected exponential or heun)");
}

IntegrationConfig integration_of(const StudyConfig& cfg) {
  IntegrationConfig ic;
  ic.dt = cfg.dt;
  ic.seed = cfg.seed;
  ic.scheme = parse_scheme(cfg.scheme);
  return ic;
}

// Rotation rate in turns per unit time when M is a multiple of the
// rotation generator.
std::optional<double> rotation_rate(const Eigen::Matrix2d& M) {
  if (M(0, 0) != 0.0 || M(1, 1) != 0.0 || M(0, 1) != -M(1, 0)) return std::nullopt;
  return M(1, 0) / (2.0 * std::numbers::pi);
}

// alpha(T) = a T + sum_i b_i W^i_T when A and every B_i rotate.
std::optional<std::pair<double, double>> gaussian_angle(const CocycleSpec& spec, double T) {
  if (const auto* d = std::get_if<DeterministicSpec>(&spec)) {
    if (auto a = rotation_rate(d->A)) return std::pair{*a * T, 0.0};
    return std::nullopt;
  }
  const auto* sde = std::get_if<SdeSpec>(&spec);
  if (!sde) return std::nullopt;
  const auto a = rotation_rate(sde->A);
  if (!a) return std::nullopt;
  double var = 0.0;
  for (const auto& B : sde->B) {
    const auto b = rotation_rate(B);
    if (!b) return std::nullopt;
    var += *b * *b * T;
  }
  return std::pair{*a * T, var};
}

ResultRecord new_record(std::string study, const StudyConfig& cfg) {
  ResultRecord r;
  r.study = std::move(study);
  r.config = cfg;
  r.created = utc_now();
  return r;
}

ResultRecord run_homeo(const StudyConfig& cfg) {
  ResultRecord rec = new_record("homeo", cfg);
  const double omega = cfg.omega, k = cfg.coupling;
  const Lift F = normalize_lift([omega, k](double x) {
    return x + omega + k * std::sin(2.0 * std::numbers::pi * x);
  });
  const RotationEstimate classical = classical_rotation_number(F, cfg.n);
  std::vector<double> images(cfg.n);
  double p = 0.0;
  const CircleHomeo f{F};
  for (auto& img : images) img = p = f(p);
  const RotationEstimate orbit = orbit_rotation_number(ordered_lifted_orbit(images, 0.0));
  rec.table.columns = {"n", "classical", "orbit"};
  rec.table.rows.push_back({double(cfg.n), classical.value, orbit.value});
  rec.checks.push_back(make_check("orbit_vs_classical", orbit.value, classical.value,
                                  2.0 / double(cfg.n)));
  return rec;
}

ResultRecord run_matrix(const StudyConfig& cfg) {
  ResultRecord rec = new_record("matrix", cfg);
  const Mat2 g(to_matrix(cfg.matrix));
  const double eig = eigen_rotation_number(g);
  const RotationEstimate it = iterated_matrix_rotation_number(g, cfg.n);
  rec.table.columns = {"n", "eigen", "iterated"};
  rec.table.rows.push_back({double(cfg.n), eig, it.value});
  Check c = make_check("iterated_vs_eigen", it.value, eig, 2.0 / double(cfg.n) + 1e-9);
  c.pass = circular_distance(it.value, eig) <= c.tolerance;
  rec.checks.push_back(c);
  return rec;
}

ResultRecord run_product(const StudyConfig& cfg) {
  ResultRecord rec = new_record("product", cfg);
  double expected = 0.0;
  std::optional<IidMatrixSampler> sampler;
  if (cfg.sampler == "rotation") {
    sampler = uniform_rotation_sampler(cfg.lo, cfg.hi);
    expected = wrap_turn(0.5 * (cfg.lo + cfg.hi));
  } else if (cfg.sampler == "triangular") {
    sampler = triangular_sampler(cfg.p_negative);
    expected = 0.5 * cfg.p_negative;
  } else {
    throw std::invalid_argument("unknown sampler '" + cfg.sampler + "' (rotation or triangular)");
  }
  const RotationEstimate est =
      product_rotation_number(*sampler, cfg.n, cfg.replicas, cfg.seed, cfg.workers);
  rec.table.columns = {"n", "replicas", "rho", "std_error"};
  rec.table.rows.push_back({double(cfg.n), double(cfg.replicas), est.value, est.std_error});
  rec.checks.push_back(make_check("rho", est.value, expected,
                                  three_sigma(est.std_error, 1.0 / double(cfg.n)),
                                  est.std_error));
  return rec;
}

ResultRecord run_cocycle(const StudyConfig& cfg) {
  ResultRecord rec = new_record("cocycle", cfg);
  const CocycleSpec spec = make_spec(cfg.cocycle);
  std::vector<double> rates;
  rec.table.columns = {"replica", "rho"};
  for (std::size_t r = 0; r < cfg.replicas; ++r) {
    IntegrationConfig ic = integration_of(cfg);
    ic.seed = replica_seed(cfg.seed, r);
    const double rho = continuous_rotation_number(integrate(spec, cfg.T, ic)).value;
    rates.push_back(rho);
    rec.table.rows.push_back({double(r), rho});
  }
  const SampleStats st = sample_stats(rates);
  if (const auto* d = std::get_if<DeterministicSpec>(&spec)) {
    rec.checks.push_back(make_check("rho_vs_eigenvalues", st.mean, flow_rotation_rate(d->A),
                                    1.0 / cfg.T));
  } else if (const auto g = gaussian_angle(spec, 1.0)) {
    rec.checks.push_back(make_check("rho", st.mean, g->first,
                                    three_sigma(st.std_error, 1e-9), st.std_error));
  }
  return rec;
}

ResultRecord run_sample_study(const StudyConfig& cfg, std::string name = "sample-study") {
  ResultRecord rec = new_record(std::move(name), cfg);
  SamplingStudy study;
  study.spec = make_spec(cfg.cocycle);
  study.T_grid = cfg.T_grid;
  study.steps_per_T = cfg.n;
  study.replicas = cfg.replicas;
  study.seed = cfg.seed;
  study.integration = integration_of(cfg);
  study.workers = cfg.workers;
  const StudyTable table = convergence_study(study);
  rec.table.columns = {"T", "rho_T", "rho_over_T", "std_error", "windows"};
  for (const StudyRow& row : table.rows) {
    rec.table.rows.push_back({row.T, row.rho_T, row.rho_over_T, row.std_error, double(row.windows)});
  }
  Check mono;
  mono.name = "monotone_approach";
  mono.value = table.monotone ? 1.0 : 0.0;
  mono.expected = 1.0;
  mono.pass = table.monotone;
  rec.checks.push_back(mono);
  Check cont;
  cont.name = "rho_cont";
  cont.value = table.rho_cont.value;
  cont.std_error = table.rho_cont.std_error;
  cont.expected = table.rho_cont.value;
  rec.checks.push_back(cont);
  return rec;
}

ResultRecord run_nyquist(const StudyConfig& cfg) {
  ResultRecord rec = new_record("nyquist", cfg);
  const Eigen::Matrix2d A = to_matrix(cfg.matrix);
  rec.table.columns = {"T", "rho_T", "rho_T_over_T", "rho_cont", "exact"};
  std::vector<double> grid = cfg.T_grid;
  if (grid.empty()) grid = {cfg.T};
  for (double T : grid) {
    const NyquistResult r = nyquist_check(A, T);
    rec.table.rows.push_back({T, r.rho_T, r.rho_T_over_T, r.rho_cont, r.exact ? 1.0 : 0.0});
    const bool below = r.rho_cont == 0.0 || T < 1.0 / (2.0 * std::abs(r.rho_cont));
    if (below) {
      rec.checks.push_back(make_check("exact_at_T=" + fmt17(T), r.rho_T_over_T, r.rho_cont, 1e-12));
    }
  }
  return rec;
}

ResultRecord run_beta_dist(const StudyConfig& cfg) {
  ResultRecord rec = new_record("beta-dist", cfg);
  const CocycleSpec spec = make_spec(cfg.cocycle);
  const BetaSamples bs = beta_T_samples(spec, cfg.T, cfg.samples, integration_of(cfg),
                                        Eigen::Vector2d::UnitX(), cfg.bins, cfg.workers);
  rec.histogram = bs.histogram;
  rec.table.columns = {"T", "mean", "std_error", "samples"};
  rec.table.rows.push_back({cfg.T, bs.stats.mean, bs.stats.std_error, double(cfg.samples)});
  if (const auto g = gaussian_angle(spec, cfg.T)) {
    const double oracle = wrapped_gaussian_mean(g->first, g->second);
    rec.checks.push_back(make_check("mean_vs_wrapped_gaussian", bs.stats.mean, oracle,
                                    three_sigma(bs.stats.std_error, 1e-9), bs.stats.std_error));
    if (g->second > 0.0) {
      const double ks = sup_cdf_distance(bs.histogram, [&](double y) {
        return wrapped_gaussian_cdf(y, g->first, g->second);
      });
      rec.checks.push_back(bound_check("sup_cdf_distance", ks, 0.01));
    }
  }
  return rec;
}

ResultRecord run_winding(const StudyConfig& cfg) {
  ResultRecord rec = new_record("winding", cfg);
  const CocycleSpec spec = make_spec(cfg.cocycle);
  rec.table.columns = {"T", "E_Nplus_over_T", "Nplus_std_error", "E_Nminus_over_T",
                       "Nminus_std_error"};
  std::vector<double> grid = cfg.T_grid;
  if (grid.empty()) grid = {cfg.T};
  for (double T : grid) {
    const WindingSummary w = winding_counts(spec, T, cfg.samples, T / double(cfg.fine_steps),
                                            cfg.seed, Eigen::Vector2d::UnitX(), cfg.workers);
    rec.table.rows.push_back(
        {T, w.E_Nplus_over_T, w.Nplus_std_error, w.E_Nminus_over_T, w.Nminus_std_error});
  }
  const IdentityDefect d = erratum_identity_check(spec, cfg.T, std::min<std::size_t>(cfg.samples, 10000),
                                                  cfg.seed, cfg.T / double(cfg.fine_steps),
                                                  cfg.workers);
  rec.checks.push_back(make_check("integer_defect", double(d.integer_defect), 0.0, 0.0));
  return rec;
}

}  // namespace

Eigen::Matrix2d to_matrix(const MatrixEntries& e) {
  return (Eigen::Matrix2d() << e[0], e[1], e[2], e[3]).finished();
}

CocycleSpec make_spec(const CocycleConfig& c) {
  const Eigen::Matrix2d A = c.scale * to_matrix(c.A);
  if (c.kind == "deterministic") return DeterministicSpec{A};
  if (c.kind == "sde") {
    SdeSpec s{A, {}};
    for (const auto& b : c.B) s.B.push_back(c.scale * to_matrix(b));
    return s;
  }
  if (c.kind == "real_noise") {
    return quasi_periodic_noise(A, c.scale * to_matrix(c.modulation), c.frequency);
  }
  throw std::invalid_argument("unknown cocycle kind '" + c.kind +
                              "' (deterministic, real_noise or sde)");
}

std::string config_to_json(const StudyConfig& cfg) { return json(cfg).dump(2); }

StudyConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  reject_unknown_keys(j, json(StudyConfig{}), "");
  try {
    return j.get<StudyConfig>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

StudyConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot read config '" + path.string() + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return config_from_json(ss.str());
}

bool ResultRecord::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Check make_check(std::string name, double value, double expected, double tolerance,
                 double std_error) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.expected = expected;
  c.tolerance = tolerance;
  c.std_error = std_error;
  c.pass = std::abs(value - expected) <= tolerance;
  return c;
}

std::string table_csv(const Table& table) {
  std::vector<std::vector<double>> rows = table.rows;
  if (!table.columns.empty() && table.columns.front() == "T") {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.front() > b.front(); });
  }
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out += (i ? "," : "") + table.columns[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + fmt17(row[i]);
    out += '\n';
  }
  return out;
}

std::string histogram_csv(const EmpiricalMeasure& hist) {
  std::string out = "bin_left,bin_right,mass\n";
  for (std::size_t b = 0; b < hist.bins(); ++b) {
    out += fmt17(hist.bin_left(b)) + ',' + fmt17(hist.bin_right(b)) + ',' + fmt17(hist.mass(b)) +
           '\n';
  }
  return out;
}

std::string record_json(const ResultRecord& record) {
  json j;
  j["study"] = record.study;
  j["config"] = record.config;
  j["checks"] = json::array();
  for (const Check& c : record.checks) j["checks"].push_back(check_json(c));
  j["pass"] = record.pass();
  j["table"] = {{"columns", record.table.columns}, {"rows", record.table.rows}};
  j["provenance"] = {{"seed", record.config.seed}, {"version", kVersion}, {"created", record.created}};
  return j.dump(2) + '\n';
}

void emit_table(const ResultRecord& record, const std::filesystem::path& path) {
  write_file(path, table_csv(record.table));
  write_file(path.string() + ".json", record_json(record));
}

void emit_json(const ResultRecord& record, const std::filesystem::path& path) {
  write_file(path, record_json(record));
}

void emit_histogram(const EmpiricalMeasure& hist, const std::filesystem::path& path) {
  write_file(path, histogram_csv(hist));
}

ResultRecord run_example(int id, const StudyConfig& overrides) {
  StudyConfig cfg = overrides;
  cfg.example = id;
  switch (id) {
    case 1: {
      ResultRecord rec = new_record("example-1", cfg);
      const CyclicHomeoSampler cycle(four_cycle_maps());
      const RotationEstimate first = compose_rotation_number(cycle, cfg.n, 0.0);
      const RotationEstimate second = pointwise_rotation(cycle, cfg.n, 0.125);
      const RotationEstimate at_zero = pointwise_rotation(cycle, cfg.n, 0.0);
      rec.table.columns = {"n", "rho_first", "rot_second_at_1_8", "rot_second_at_0"};
      rec.table.rows.push_back({double(cfg.n), first.value, second.value, at_zero.value});
      rec.checks.push_back(make_check("rho_first", first.value, 0.0, 0.0));
      rec.checks.push_back(make_check("rot_second_at_1_8", second.value, 0.25, 1e-12));
      rec.checks.push_back(make_check("rot_second_at_0", at_zero.value, 0.0, 0.0));
      return rec;
    }
    case 2: {
      ResultRecord rec = new_record("example-2", cfg);
      const IidMatrixSampler sampler = uniform_rotation_sampler(cfg.lo, cfg.hi);
      const RotationEstimate est =
          product_rotation_number(sampler, cfg.n, cfg.replicas, cfg.seed, cfg.workers);
      const EmpiricalMeasure nu = stationary_measure_estimate(sampler, cfg.n, cfg.seed, cfg.bins);
      rec.table.columns = {"n", "rho", "std_error", "max_bin_deviation"};
      rec.table.rows.push_back({double(cfg.n), est.value, est.std_error,
                                nu.max_deviation_from_uniform()});
      rec.checks.push_back(make_check("rho", est.value, wrap_turn(0.5 * (cfg.lo + cfg.hi)),
                                      three_sigma(est.std_error, 1.0 / double(cfg.n)),
                                      est.std_error));
      rec.checks.push_back(bound_check("max_bin_deviation", nu.max_deviation_from_uniform(), 0.005));
      return rec;
    }
    case 3: {
      ResultRecord rec = new_record("example-3", cfg);
      const RotationEstimate est = product_rotation_number(
          triangular_sampler(cfg.p_negative), cfg.n, cfg.replicas, cfg.seed, cfg.workers);
      rec.table.columns = {"p_negative", "rho", "std_error"};
      rec.table.rows.push_back({cfg.p_negative, est.value, est.std_error});
      rec.checks.push_back(make_check("rho", est.value, 0.5 * cfg.p_negative,
                                      three_sigma(est.std_error, 1.0 / double(cfg.n)),
                                      est.std_error));
      return rec;
    }
    case 4: {
      cfg.cocycle = CocycleConfig{};
      ResultRecord rec = run_sample_study(cfg, "example-4");
      double worst = -1e300;
      for (const auto& row : rec.table.rows) worst = std::max(worst, row[2]);
      rec.checks.push_back(bound_check("rho_over_T_below_1", worst, 1.0));
      const auto smallest = std::min_element(rec.table.rows.begin(), rec.table.rows.end(),
                                             [](const auto& a, const auto& b) { return a[0] < b[0]; });
      rec.checks.push_back(make_check("rho_over_T_at_smallest_T", (*smallest)[2], 1.0, 0.02,
                                      (*smallest)[3]));
      for (Check& c : rec.checks) {
        if (c.name == "rho_cont") {
          c.expected = 1.0;
          c.tolerance = three_sigma(c.std_error, 1e-9);
          c.pass = std::abs(c.value - 1.0) <= c.tolerance;
        }
      }
      return rec;
    }
    default:
      throw std::invalid_argument("unknown example id " + std::to_string(id) + " (1..4)");
  }
}

ResultRecord run_command(const StudyConfig& cfg) {
  const std::string& c = cfg.command;
  if (c == "homeo") return run_homeo(cfg);
  if (c == "matrix") return run_matrix(cfg);
  if (c == "product") return run_product(cfg);
  if (c == "cocycle") return run_cocycle(cfg);
  if (c == "sample-study") return run_sample_study(cfg);
  if (c == "nyquist") return run_nyquist(cfg);
  if (c == "beta-dist") return run_beta_dist(cfg);
  if (c == "winding") return run_winding(cfg);
  if (c == "example") return run_example(cfg.example, cfg);
  throw std::invalid_argument("unknown command '" + c + "'");
}

}  // namespace rotnum
