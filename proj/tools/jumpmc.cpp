#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "jumpmc/errors.hpp"
#include "jumpmc/experiment.hpp"

namespace {

using namespace jumpmc;

// Command-line values that replace config fields when given.
struct Overrides {
  std::optional<std::string> sampler;
  std::optional<std::string> balancing;
  std::optional<double> horizon;
  std::optional<double> thinning;
  std::optional<double> burn_in;
  std::optional<std::uint64_t> seed;
  std::optional<int> chains;
  std::optional<std::uint64_t> max_events;
  std::optional<std::string> output;
  std::optional<std::uint64_t> size_cap;
  std::optional<double> tolerance;
  std::optional<int> repetitions;
  bool verify_rates = false;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--sampler", o.sampler, "zanella, tabu, dzz or dcs");
  cmd->add_option("--balancing", o.balancing, "sqrt, barker, metropolis or global");
  cmd->add_option("--horizon", o.horizon, "process time T");
  cmd->add_option("--thinning", o.thinning, "thinning interval (T / thinning must be an integer)");
  cmd->add_option("--burn-in", o.burn_in, "fraction of process time discarded in statistics");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--chains", o.chains, "number of chains");
  cmd->add_option("--max-events", o.max_events, "stop each chain after this many events");
  cmd->add_option("--output", o.output, "output directory");
  cmd->add_option("--size-cap", o.size_cap, "largest augmented space the verifier enumerates");
  cmd->add_option("--tolerance", o.tolerance, "verifier tolerance");
  cmd->add_option("--repetitions", o.repetitions, "seeded runs per config in compare");
  cmd->add_flag("--verify-rates", o.verify_rates, "recompute every cached ratio after each event");
}

ExperimentConfig load(const std::string& path, const Overrides& o) {
  ExperimentConfig c = load_config(path);
  if (o.sampler) c.sampler = sampler_kind_from_key(*o.sampler);
  if (o.balancing) c.balancing = *o.balancing;
  if (o.horizon) c.horizon = *o.horizon;
  if (o.thinning) c.thinning = *o.thinning;
  if (o.burn_in) c.burn_in = *o.burn_in;
  if (o.seed) c.seed = *o.seed;
  if (o.chains) c.chains = *o.chains;
  if (o.max_events) c.max_events = *o.max_events;
  if (o.output) c.output = *o.output;
  if (o.size_cap) c.size_cap = *o.size_cap;
  if (o.tolerance) c.tolerance = *o.tolerance;
  if (o.repetitions) c.repetitions = *o.repetitions;
  if (o.verify_rates) c.verify_rates = true;
  if (c.thinning) thinning_intervals(c.horizon, *c.thinning);
  if (!(c.burn_in >= 0 && c.burn_in < 1)) throw ConfigError("--burn-in must lie in [0, 1)");
  if (c.chains < 1 || c.repetitions < 1) throw ConfigError("--chains and --repetitions must be at least 1");
  BalancingFunction::from_key(c.balancing);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-time jump-process samplers on discrete spaces"};
  app.require_subcommand(1);

  Overrides run_o, verify_o, compare_o;
  std::string run_config, verify_config;
  std::vector<std::string> compare_configs;

  auto* run_cmd = app.add_subcommand("run", "run chains and write trace, sample and statistics files");
  run_cmd->add_option("config", run_config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  add_overrides(run_cmd, run_o);

  auto* verify_cmd = app.add_subcommand("verify", "check stationarity and balance by full enumeration");
  verify_cmd->add_option("config", verify_config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  add_overrides(verify_cmd, verify_o);

  auto* compare_cmd = app.add_subcommand("compare", "repeated runs of several samplers on one model");
  compare_cmd->add_option("configs", compare_configs, "experiment configs (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  add_overrides(compare_cmd, compare_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (*run_cmd) {
      cmd_run(load(run_config, run_o), std::cout);
      return kExitOk;
    }
    if (*verify_cmd) {
      return cmd_verify(load(verify_config, verify_o), std::cout) ? kExitOk : kExitCheckFailed;
    }
    std::vector<ExperimentConfig> configs;
    for (const auto& p : compare_configs) configs.push_back(load(p, compare_o));
    cmd_compare(configs, std::cout);
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const SizeOverflowError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const AbsorbingStateError& e) {
    std::cerr << "absorbing state: " << e.what() << '\n';
    return kExitCheckFailed;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
}
