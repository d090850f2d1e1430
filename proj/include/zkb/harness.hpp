#pragma once

// Configuration, persistence and experiment drivers behind the zkb command
// line tool. Every command returns its process exit code and writes its
// human-readable report to the given stream.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "zkb/diagnostics.hpp"
#include "zkb/solver.hpp"
#include "zkb/theory.hpp"

namespace zkb::harness {

namespace exit_code {
inline constexpr int kClean = 0;
inline constexpr int kUsage = 1;
inline constexpr int kContaminated = 2;
inline constexpr int kBlowUp = 3;
/// The command ran but its verdict (inequality, decay or dependence check) failed.
inline constexpr int kVerdictFailed = 4;
}  // namespace exit_code

struct ExperimentConfig {
  NormId norm = NormId::WeightedL2;
  /// Fit window; unset means the last half of the series.
  std::optional<double> t0;
  std::optional<double> t1;
  Regime regime = Regime::Weak;
  /// Relative tolerance of the decay verdict: fitted >= chi (1 - tolerance).
  double tolerance = 0.05;
};

struct RunConfig {
  std::string preset;
  StripGeometry geometry{1.0, 1.0, 4, 1};
  /// The weight rate was given as "auto" and resolved to b*(B).
  bool b_auto = false;
  SolverConfig solver;
  InitialData initial;
  ExperimentConfig experiment;
  std::uint64_t seed = 0;
};

/// Parses and validates a schema-1 JSON document. Throws ConfigError naming
/// the offending key or path.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
/// The JSON document of the named preset ("paper-ref").
std::string preset_document(std::string_view name);
/// Resolved configuration as a JSON document (b recorded as a number).
std::string dump_config(const RunConfig& cfg);

/// Parses "pi", "pi/2", "2pi", "2*pi", "3pi/4" or a plain decimal.
double parse_length(std::string_view text);

/// Decimal scientific notation with 17 significant digits, locale independent.
std::string format_number(double v);

void write_series_csv(const std::filesystem::path& path, const std::vector<NormSample>& samples);
std::vector<NormSample> read_series_csv(const std::filesystem::path& path);

std::string sha256_file(const std::filesystem::path& path);

/// Rewrites nothing; checks that every file listed in dir/manifest.json exists
/// and matches its recorded checksum.
bool verify_manifest(const std::filesystem::path& dir, std::ostream& report);

/// Runs one configuration and writes manifest.json, series.csv and optional snapshots into out_dir.
struct SimulationOutcome {
  TimeSeries series;
  int exit_code = exit_code::kClean;
};
SimulationOutcome simulate(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

int cmd_constants(double B, std::ostream& out);
int cmd_simulate(const std::filesystem::path& config, const std::filesystem::path& out_dir, std::ostream& out);
int cmd_verify(std::string_view suite, int samples, std::uint64_t seed, const std::optional<std::filesystem::path>& config,
               std::ostream& out);
int cmd_fit_decay(const std::filesystem::path& run_dir, std::string_view norm, std::optional<double> t0,
                  std::optional<double> t1, std::ostream& out);
int cmd_sweep(const std::filesystem::path& config, const std::vector<double>& widths,
              const std::vector<double>& amplitudes, int workers, const std::filesystem::path& out_dir,
              std::ostream& out);
int cmd_cdep(const std::filesystem::path& config, double eps, const std::optional<std::filesystem::path>& out_dir,
             std::ostream& out);

/// Default grid of the inequality suites.
StripGeometry verify_geometry();

struct SuiteReport {
  std::string suite;
  int cases = 0;
  int failures = 0;
  double worst_margin = 0.0;
  int worst_case = -1;
};
/// Runs the steklov, gn or sup corpus on `geom` (b taken from geom).
SuiteReport run_inequality_suite(std::string_view suite, int samples, std::uint64_t seed, const StripGeometry& geom);

struct DependenceReport {
  double eps = 0.0;
  double growth_full = 0.0;  // (e, z^2)(t_end) / (e, z0^2) for eps
  double growth_half = 0.0;  // same for eps / 2
  double ratio = 0.0;        // growth_full / growth_half
  double peak_full = 0.0;    // max_t (e, z^2)(t) / (e, z0^2) for eps
  double peak_half = 0.0;    // same for eps / 2
  bool identical = false;    // eps = 0
  bool passes = false;       // |ratio - 1| <= 0.1 and the same for the peaks
  std::vector<double> t;
  std::vector<double> z_full;
  std::vector<double> z_half;
};
/// Steps u0, u0 + eps bump and u0 + (eps/2) bump in lockstep. The bump is the
/// unit-norm Gaussian exp(-(x - x0)^2) w_1(y). Throws BlowUpError.
DependenceReport continuous_dependence(const RunConfig& cfg, double eps);

}  // namespace zkb::harness
