// rotnum: rotation numbers of circle maps, random matrix products and
// sampled linear cocycles.
//
// Exit status: 0 all checks pass, 1 a check is outside tolerance, 2 usage
// error, 3 numeric failure (step-halving floor).

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "rotnum/cocycle.hpp"
#include "rotnum/report.hpp"

namespace {

using rotnum::StudyConfig;

// Parses "a11,a12,a21,a22".
rotnum::MatrixEntries parse_entries(const std::string& text) {
  rotnum::MatrixEntries e{};
  std::stringstream ss(text);
  std::string item;
  std::size_t i = 0;
  while (std::getline(ss, item, ',')) {
    if (i == 4) throw CLI::ValidationError("--matrix", "expects four comma-separated entries");
    try {
      e[i++] = std::stod(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--matrix", "not a number: '" + item + "'");
    }
  }
  if (i != 4) throw CLI::ValidationError("--matrix", "expects four comma-separated entries");
  return e;
}

void print_record(const rotnum::ResultRecord& rec, const std::string& format) {
  if (format == "json") {
    std::cout << rotnum::record_json(rec);
    return;
  }
  std::cout << rotnum::table_csv(rec.table);
  for (const auto& c : rec.checks) {
    std::fprintf(stderr, "%s %s value=%.17g expected=%.17g tol=%.3g stderr=%.3g\n",
                 c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value, c.expected, c.tolerance,
                 c.std_error);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotation numbers of circle maps, random matrix products and linear cocycles"};
  app.require_subcommand(1);
  // Global flags may also follow the subcommand name.
  app.fallthrough();

  std::string config_path, matrix_text;
  StudyConfig flags;
  double T = 0.0;
  std::vector<double> T_grid;
  std::string kind;

  app.add_option("--config", config_path, "JSON study configuration; flags override it")
      ->check(CLI::ExistingFile);
  auto* o_seed = app.add_option("--seed", flags.seed, "base seed");
  auto* o_workers = app.add_option("--workers", flags.workers, "worker threads (0 = all cores)");
  auto* o_out = app.add_option("--out", flags.out, "output file (default: stdout)");
  auto* o_format = app.add_option("--format", flags.format, "csv or json")
                       ->check(CLI::IsMember({"csv", "json"}));
  auto* o_T = app.add_option("--T", T, "sampling period or horizon")->check(CLI::PositiveNumber);
  auto* o_grid = app.add_option("--T-grid", T_grid, "list of sampling periods")->delimiter(',');
  auto* o_n = app.add_option("--n", flags.n, "iterations or windows")->check(CLI::PositiveNumber);
  auto* o_rep = app.add_option("--replicas", flags.replicas, "independent replicas")
                    ->check(CLI::PositiveNumber);
  auto* o_dt = app.add_option("--dt", flags.dt, "integration step")->check(CLI::PositiveNumber);
  auto* o_bins = app.add_option("--bins", flags.bins, "histogram bins")->check(CLI::PositiveNumber);
  auto* o_samples = app.add_option("--samples", flags.samples, "independent windows")
                        ->check(CLI::PositiveNumber);
  auto* o_scheme = app.add_option("--scheme", flags.scheme, "exponential or heun")
                       ->check(CLI::IsMember({"exponential", "heun"}));
  auto* o_kind = app.add_option("--cocycle", kind, "deterministic, real_noise or sde")
                     ->check(CLI::IsMember({"deterministic", "real_noise", "sde"}));
  auto* o_matrix = app.add_option("--matrix", matrix_text, "a11,a12,a21,a22");

  auto* homeo = app.add_subcommand("homeo", "rotation number of x + omega + K sin(2 pi x)");
  auto* o_omega = homeo->add_option("--omega", flags.omega);
  auto* o_coupling = homeo->add_option("--coupling", flags.coupling);
  app.add_subcommand("matrix", "eigenvalue vs iterated rotation number of --matrix");
  auto* product = app.add_subcommand("product", "rotation number of an i.i.d. matrix product");
  auto* o_sampler = product->add_option("--sampler", flags.sampler)
                        ->check(CLI::IsMember({"rotation", "triangular"}));
  auto* o_lo = product->add_option("--lo", flags.lo);
  auto* o_hi = product->add_option("--hi", flags.hi);
  auto* o_p = product->add_option("--p-negative", flags.p_negative)->check(CLI::Range(0.0, 1.0));
  app.add_subcommand("cocycle", "continuous rotation number over [0, T]");
  app.add_subcommand("sample-study", "sampled rotation number / T along a T grid");
  app.add_subcommand("nyquist", "exact recovery below the Nyquist rate for --matrix as generator");
  app.add_subcommand("beta-dist", "distribution of the sampled displacement at period T");
  auto* winding = app.add_subcommand("winding", "antipode crossing counts per window");
  auto* o_fine = winding->add_option("--fine-steps", flags.fine_steps, "grid steps per window")
                     ->check(CLI::PositiveNumber);
  auto* example = app.add_subcommand("example", "run worked example 1..4");
  auto* o_id = example->add_option("--id", flags.example)->required()->check(CLI::Range(1, 4));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    StudyConfig cfg = config_path.empty() ? StudyConfig{} : rotnum::load_config(config_path);
    cfg.command = app.get_subcommands().front()->get_name();
    // Flags win over the file.
    auto take = [](CLI::Option* opt, auto& dst, const auto& src) {
      if (opt->count() > 0) dst = src;
    };
    take(o_seed, cfg.seed, flags.seed);
    take(o_workers, cfg.workers, flags.workers);
    take(o_out, cfg.out, flags.out);
    take(o_format, cfg.format, flags.format);
    take(o_T, cfg.T, T);
    take(o_grid, cfg.T_grid, T_grid);
    take(o_n, cfg.n, flags.n);
    take(o_rep, cfg.replicas, flags.replicas);
    take(o_dt, cfg.dt, flags.dt);
    take(o_bins, cfg.bins, flags.bins);
    take(o_samples, cfg.samples, flags.samples);
    take(o_scheme, cfg.scheme, flags.scheme);
    take(o_kind, cfg.cocycle.kind, kind);
    take(o_omega, cfg.omega, flags.omega);
    take(o_coupling, cfg.coupling, flags.coupling);
    take(o_sampler, cfg.sampler, flags.sampler);
    take(o_lo, cfg.lo, flags.lo);
    take(o_hi, cfg.hi, flags.hi);
    take(o_p, cfg.p_negative, flags.p_negative);
    take(o_fine, cfg.fine_steps, flags.fine_steps);
    take(o_id, cfg.example, flags.example);
    if (o_matrix->count() > 0) cfg.matrix = parse_entries(matrix_text);
    // A single --T replaces the grid for the per-T commands.
    if (o_T->count() > 0 && o_grid->count() == 0) cfg.T_grid = {cfg.T};

    const rotnum::ResultRecord rec = rotnum::run_command(cfg);
    if (cfg.out.empty()) {
      print_record(rec, cfg.format);
    } else if (cfg.format == "json") {
      rotnum::emit_json(rec, cfg.out);
    } else if (rec.histogram) {
      rotnum::emit_histogram(*rec.histogram, cfg.out);
      rotnum::emit_json(rec, cfg.out + ".json");
    } else {
      rotnum::emit_table(rec, cfg.out);
    }
    if (!cfg.out.empty()) {
      for (const auto& c : rec.checks) {
        std::fprintf(stderr, "%s %s value=%.17g expected=%.17g\n", c.pass ? "PASS" : "FAIL",
                     c.name.c_str(), c.value, c.expected);
      }
    }
    return rec.pass() ? 0 : 1;
  } catch (const rotnum::NumericFailure& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
