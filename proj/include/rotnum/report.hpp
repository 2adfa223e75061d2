#pragma once

// Study configuration, result records and their CSV / JSON emission.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rotnum/cocycle.hpp"
#include "rotnum/measure.hpp"

namespace rotnum {

inline constexpr const char* kVersion = "0.1.0";

/// A 2x2 matrix as row-major entries {a11, a12, a21, a22}.
using MatrixEntries = std::array<double, 4>;

Eigen::Matrix2d to_matrix(const MatrixEntries& e);

struct CocycleConfig {
  /// "deterministic", "real_noise" or "sde".
  std::string kind = "sde";
  MatrixEntries A{0.0, -1.0, 1.0, 0.0};
  std::vector<MatrixEntries> B{{0.0, -1.0, 1.0, 0.0}};
  /// For real_noise: A(t) = A + sin(2 pi (frequency t + phase)) modulation.
  MatrixEntries modulation{0.0, 0.0, 0.0, 0.0};
  double frequency = 1.0;
  /// Multiplies A, B and the modulation; the default 2 pi turns the
  /// generators above into one turn per unit time.
  double scale = 6.283185307179586;

  bool operator==(const CocycleConfig&) const = default;
};

CocycleSpec make_spec(const CocycleConfig& c);

struct StudyConfig {
  std::string command;
  int example = 4;
  CocycleConfig cocycle{};

  double T = 0.25;
  std::vector<double> T_grid{0.5, 0.25, 0.1, 0.05, 0.02};
  std::size_t n = 10000;
  std::size_t replicas = 32;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  double dt = 1e-3;
  /// Grid steps per window for crossing counts.
  std::size_t fine_steps = 256;
  std::size_t bins = 1024;
  std::string scheme = "exponential";

  /// Homeomorphism / matrix inputs.
  double omega = 0.3;
  double coupling = 0.05;
  MatrixEntries matrix{0.0, -1.0, 1.0, 0.0};
  std::string sampler = "rotation";
  double lo = 0.05;
  double hi = 0.35;
  double p_negative = 0.4;

  std::string out;
  std::string format = "csv";

  bool operator==(const StudyConfig&) const = default;
};

std::string config_to_json(const StudyConfig& cfg);
/// Keys absent from `text` keep their defaults; unknown keys are rejected.
StudyConfig config_from_json(const std::string& text);
StudyConfig load_config(const std::filesystem::path& path);

/// One compared quantity.
struct Check {
  std::string name;
  double value = 0.0;
  double std_error = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ResultRecord {
  std::string study;
  StudyConfig config;
  std::vector<Check> checks;
  Table table;
  std::optional<EmpiricalMeasure> histogram;
  std::string created;

  bool pass() const;
};

/// |value - expected| <= tolerance.
Check make_check(std::string name, double value, double expected, double tolerance,
                 double std_error = 0.0);

/// CSV of record.table (rows sorted by descending first column when it is
/// "T") plus a JSON sidecar `<path>.json` with configuration, checks and
/// provenance. Numbers are written with 17 significant digits.
void emit_table(const ResultRecord& record, const std::filesystem::path& path);
/// The whole record as one JSON document.
void emit_json(const ResultRecord& record, const std::filesystem::path& path);
/// Columns bin_left, bin_right, mass.
void emit_histogram(const EmpiricalMeasure& hist, const std::filesystem::path& path);

std::string table_csv(const Table& table);
std::string histogram_csv(const EmpiricalMeasure& hist);
std::string record_json(const ResultRecord& record);

/// Canonical run of one of the four worked examples, compared against the
/// expected values. Throws std::invalid_argument for an unknown id.
ResultRecord run_example(int id, const StudyConfig& overrides);

/// Runs cfg.command: homeo, matrix, product, cocycle, sample-study,
/// nyquist, beta-dist, winding or example.
ResultRecord run_command(const StudyConfig& cfg);

}  // namespace rotnum
