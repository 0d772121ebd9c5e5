#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jumpmc/diagnostics.hpp"
#include "jumpmc/samplers.hpp"

namespace jumpmc {

/// One experiment. `model` is the raw model object ({"kind": ..., params});
/// relative data paths resolve against `base_dir`.
struct ExperimentConfig {
  nlohmann::json model;
  std::filesystem::path base_dir = ".";
  SamplerKind sampler = SamplerKind::Zanella;
  std::string balancing = "barker";
  std::vector<double> weights;
  std::vector<double> psi;
  std::optional<State> initial_state;
  double horizon = 1000.0;
  /// Empty means: trial run, then the mean post-burn-in event time rounded
  /// so that horizon / thinning is an integer.
  std::optional<double> thinning;
  double burn_in = 0.2;
  std::uint64_t seed = 1;
  int chains = 1;
  std::optional<std::uint64_t> max_events;
  std::size_t max_lag = 3000;
  bool verify_rates = false;
  std::filesystem::path output = "out";
  /// verify
  std::uint64_t size_cap = 100'000;
  double tolerance = 1e-10;
  /// compare
  int repetitions = 5;
};

/// Parses and validates a config object. Throws ConfigError with the
/// offending field named.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Builds the target named by a model object.
std::unique_ptr<Target> make_model(const nlohmann::json& spec, const std::filesystem::path& base_dir = ".");

/// Sampler options from a config; checks sampler/model compatibility.
SamplerOptions sampler_options(const ExperimentConfig& config, const Target& target);

// Artifacts ---------------------------------------------------------------

/// Events as CSV (time, kind, generator, log_density, statistic) plus a JSON
/// sidecar with the initial/final state, sampler and horizon.
void write_trace(const std::filesystem::path& csv, const std::filesystem::path& meta, const EventTrace& trace);
EventTrace read_trace(const std::filesystem::path& csv, const std::filesystem::path& meta);

struct SampleTable {
  std::vector<std::string> state_columns;
  std::vector<double> times;
  std::vector<State> states;
  std::vector<double> statistic;
};
/// Thinned samples: time, one column per state coordinate, statistic.
void write_samples(const std::filesystem::path& path, const Target& target, const RunResult& run);
SampleTable read_samples(const std::filesystem::path& path, std::size_t state_width);

void write_acf(const std::filesystem::path& path, const std::vector<double>& acf);

/// Time, cos and sin of the first edge angle at the thinning times (gauge).
void write_circle_series(const std::filesystem::path& path, const Target& target, const RunResult& run);

// Commands ----------------------------------------------------------------

/// Exit codes shared by the commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;

struct RunReport {
  std::vector<RunResult> chains;
  std::vector<RunStatistics> statistics;
  double thinning = 0.0;
};

/// Runs every chain and writes trace, sample, ACF and statistics artifacts
/// into config.output.
RunReport cmd_run(const ExperimentConfig& config, std::ostream& log);

/// Full enumeration checks for the configured sampler, plus the jump
/// measure of the configured g. Writes verify.csv and jump_measure.csv.
/// Returns true when every check passed.
bool cmd_verify(const ExperimentConfig& config, std::ostream& log);

struct CompareRow {
  std::string label;
  SamplerKind sampler = SamplerKind::Zanella;
  std::string balancing;
  MeanEstimate ess;
  MeanEstimate ess_per_second;
  std::optional<MeanEstimate> mean_excursion;
  MeanEstimate events;
  MeanEstimate jumps;
  /// Events until the log density first comes within 1% of the gap between
  /// the start and the mode; runs that never get there count their total
  /// event number. Only for models with a known mode.
  std::optional<MeanEstimate> events_to_mode;
  std::size_t runs_reaching_mode = 0;
  /// ESS/s relative to the Zanella row (or the first row).
  double ess_per_second_ratio = 1.0;
};

/// Repeated seeded runs (config.repetitions each, chain r uses stream r) of
/// configs sharing one model. Writes compare.csv into the first config's
/// output directory.
std::vector<CompareRow> cmd_compare(const std::vector<ExperimentConfig>& configs, std::ostream& log);

/// log pi threshold "within 1% of the mode" for a start with log density
/// `start`: mode - 0.01 (mode - start).
double mode_threshold(double mode, double start);

}  // namespace jumpmc
