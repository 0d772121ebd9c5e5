#include <catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "jumpmc/errors.hpp"
#include "jumpmc/experiment.hpp"

using namespace jumpmc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "jumpmc_cli_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

json ising_config(const fs::path& out) {
  return json{{"model", {{"kind", "ising"}, {"rows", 2}, {"cols", 2}, {"coupling", 0.8}, {"field", 0.1}}},
              {"sampler", "tabu"},
              {"horizon", 200},
              {"thinning", 0.5},
              {"seed", 3},
              {"output", out.string()}};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(JUMPMC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_json(const fs::path& dir, const std::string& name, const json& j) {
  const fs::path p = dir / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

}  // namespace

TEST_CASE("config parsing rejects bad fields", "[cli]") {
  const auto dir = scratch("parse");
  auto good = ising_config(dir);
  const auto c = parse_config(good);
  CHECK(c.sampler == SamplerKind::Tabu);
  CHECK(c.balancing == "barker");
  CHECK(c.thinning == 0.5);
  CHECK(c.burn_in == 0.2);

  auto typo = good;
  typo["horizn"] = 5;
  CHECK_THROWS_AS(parse_config(typo), ConfigError);
  auto bad_sampler = good;
  bad_sampler["sampler"] = "gibbs";
  CHECK_THROWS_AS(parse_config(bad_sampler), ConfigError);
  auto bad_horizon = good;
  bad_horizon["horizon"] = -1;
  CHECK_THROWS_AS(parse_config(bad_horizon), ConfigError);
  auto no_model = good;
  no_model.erase("model");
  CHECK_THROWS_AS(parse_config(no_model), ConfigError);
  CHECK_THROWS_AS(make_model(json{{"kind", "hopfield"}}), ConfigError);
  CHECK_THROWS_AS(make_model(json{{"kind", "ising"}, {"rows", 2}}), ConfigError);
}

TEST_CASE("incompatible sampler and model are rejected", "[cli]") {
  auto j = ising_config(scratch("compat"));
  j["model"] = {{"kind", "lattice_gaussian"}, {"d", 2}, {"s", 3.0}};
  const auto c = parse_config(j);
  const auto target = make_model(c.model);
  CHECK_THROWS_AS(sampler_options(c, *target), ConfigError);
  j["sampler"] = "dzz";
  CHECK_NOTHROW(sampler_options(parse_config(j), *target));
}

TEST_CASE("run writes artifacts and is deterministic", "[cli]") {
  const auto a = scratch("run_a"), b = scratch("run_b");
  std::ostringstream log;
  const auto ra = cmd_run(parse_config(ising_config(a)), log);
  cmd_run(parse_config(ising_config(b)), log);
  REQUIRE(ra.statistics.size() == 1);
  CHECK(ra.statistics[0].ess > 0.0);
  for (const char* f : {"trace_chain0.csv", "trace_chain0.json", "samples_chain0.csv", "acf_chain0.csv",
                        "statistics.csv", "statistics.json"}) {
    CHECK(fs::exists(a / f));
  }
  CHECK(slurp(a / "samples_chain0.csv") == slurp(b / "samples_chain0.csv"));
  CHECK(slurp(a / "trace_chain0.csv") == slurp(b / "trace_chain0.csv"));
}

TEST_CASE("trace and samples round-trip through their files", "[cli]") {
  const auto dir = scratch("roundtrip");
  std::ostringstream log;
  const auto c = parse_config(ising_config(dir));
  const auto report = cmd_run(c, log);
  const auto& run = report.chains[0];

  const auto trace = read_trace(dir / "trace_chain0.csv", dir / "trace_chain0.json");
  CHECK(trace.sampler == run.trace.sampler);
  CHECK(trace.initial_state == run.trace.initial_state);
  CHECK(trace.final_state == run.trace.final_state);
  CHECK(trace.horizon == run.trace.horizon);
  REQUIRE(trace.events.size() == run.trace.events.size());
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    CHECK(trace.events[i].time == run.trace.events[i].time);
    CHECK(trace.events[i].kind == run.trace.events[i].kind);
    CHECK(trace.events[i].generator == run.trace.events[i].generator);
    CHECK(trace.events[i].log_density == run.trace.events[i].log_density);
  }

  const auto table = read_samples(dir / "samples_chain0.csv", 4);
  CHECK(table.states == run.thinned);
  CHECK(table.times == run.thin_times);
  CHECK(table.statistic == run.thinned_statistic);
}

TEST_CASE("verify reports pass and fail", "[cli]") {
  const auto dir = scratch("verify");
  std::ostringstream log;
  auto j = ising_config(dir);
  CHECK(cmd_verify(parse_config(j), log));
  CHECK(fs::exists(dir / "verify.csv"));
  CHECK(fs::exists(dir / "jump_measure.csv"));
  j["tolerance"] = 1e-300;
  CHECK_FALSE(cmd_verify(parse_config(j), log));
  j["model"] = {{"kind", "sk"}, {"n", 14}, {"beta", 1.0}, {"field", 0.0}, {"seed", 1}};
  CHECK_THROWS_AS(cmd_verify(parse_config(j), log), SizeOverflowError);
}

TEST_CASE("compare builds one row per config", "[cli]") {
  const auto dir = scratch("compare");
  auto base = ising_config(dir);
  base["model"] = {{"kind", "sk"}, {"n", 10}, {"beta", 1.0}, {"field", 0.1}, {"seed", 4}};
  base["repetitions"] = 2;
  auto zan = base;
  zan["sampler"] = "zanella";
  std::ostringstream log;
  const auto rows = cmd_compare({parse_config(base), parse_config(zan)}, log);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].sampler == SamplerKind::Tabu);
  CHECK(rows[0].mean_excursion.has_value());
  CHECK_FALSE(rows[1].mean_excursion.has_value());
  CHECK(rows[1].ess_per_second_ratio == 1.0);
  CHECK(rows[0].ess.mean > 0.0);
  CHECK(fs::exists(dir / "compare.csv"));

  auto other = zan;
  other["model"]["seed"] = 5;
  CHECK_THROWS_AS(cmd_compare({parse_config(base), parse_config(other)}, log), ConfigError);
}

TEST_CASE("mode threshold", "[cli]") {
  CHECK(mode_threshold(0.0, -200.0) == Catch::Approx(-2.0));
  CHECK(mode_threshold(10.0, 0.0) == Catch::Approx(9.9));
}

TEST_CASE("command-line exit codes", "[cli]") {
  const auto dir = scratch("exe");
  const auto cfg = write_json(dir, "ok.json", ising_config(dir / "out"));
  CHECK(run_cli("verify " + cfg.string()) == kExitOk);
  CHECK(run_cli("run " + cfg.string() + " --horizon 20 --thinning 1") == kExitOk);
  CHECK(run_cli("verify " + cfg.string() + " --tolerance 1e-300") == kExitCheckFailed);

  auto bad = ising_config(dir / "out");
  bad["model"] = {{"kind", "lattice_gaussian"}, {"d", 2}, {"s", 3.0}};
  const auto bad_cfg = write_json(dir, "bad.json", bad);
  CHECK(run_cli("run " + bad_cfg.string()) == kExitConfigError);
  CHECK(run_cli("run " + (dir / "missing.json").string()) == kExitConfigError);
  CHECK(run_cli("frobnicate") != kExitOk);

  // A one-state path has no moves: the run fails at its first event.
  auto stuck = ising_config(dir / "out");
  stuck["model"] = {{"kind", "path"}, {"weights", {1.0}}};
  stuck["sampler"] = "zanella";
  const auto stuck_cfg = write_json(dir, "stuck.json", stuck);
  CHECK(run_cli("run " + stuck_cfg.string()) == kExitCheckFailed);
}
