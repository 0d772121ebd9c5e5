#include "jumpmc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "jumpmc/errors.hpp"
#include "jumpmc/io.hpp"
#include "jumpmc/models/bvs.hpp"
#include "jumpmc/models/dpp.hpp"
#include "jumpmc/models/facility.hpp"
#include "jumpmc/models/lattice.hpp"
#include "jumpmc/models/permutation.hpp"
#include "jumpmc/models/spin.hpp"
#include "jumpmc/oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace jumpmc {

namespace {

void expect_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ConfigError("unknown field '" + key + "' in " + where + " (expected one of: " + list + ")");
    }
  }
}

template <class T>
T field(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing field '" + key + "' in " + where);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("field '" + key + "' in " + where + " has the wrong type: " + e.what());
  }
}

template <class T>
T field_or(const json& j, const std::string& key, T fallback, const std::string& where) {
  return j.contains(key) ? field<T>(j, key, where) : fallback;
}

fs::path data_path(const json& j, const std::string& key, const fs::path& base, const std::string& where) {
  fs::path p = field<std::string>(j, key, where);
  if (p.is_relative()) p = base / p;
  if (!fs::exists(p)) throw ConfigError(where + "." + key + ": file " + p.string() + " does not exist");
  return p;
}

MeanEstimate summarize_values(const std::vector<double>& v) {
  MeanEstimate out;
  const double n = static_cast<double>(v.size());
  if (v.empty()) return out;
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - out.mean) * (x - out.mean);
  out.ess = n;
  out.se = v.size() > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  return out;
}

State parse_state(const json& j, const std::string& where) {
  try {
    return j.get<State>();
  } catch (const json::exception& e) {
    throw ConfigError(where + " must be an integer array: " + e.what());
  }
}

// Trial run for the thinning default: mean post-burn-in event time, then
// rounded so that horizon / thinning is an integer.
double auto_thinning(const ExperimentConfig& c, const Target& target, const SamplerOptions& opts, const State& x0) {
  auto sampler = make_sampler(c.sampler, target, opts);
  Philox4x32 rng(c.seed, 0xFFFFFFFFull);
  auto init = sampler->initial_state(x0, rng);
  RunOptions ro;
  ro.horizon = c.horizon / 10;
  ro.thinning = ro.horizon;
  ro.max_events = 20'000;
  const auto trial = run(*sampler, init, ro, rng);
  const auto st = summarize(trial, c.burn_in, 1);
  double mean_wait = st.mean_event_time;
  if (!(mean_wait > 0)) mean_wait = trial.trace.events.empty() ? c.horizon : trial.trace.horizon / trial.trace.events.size();
  const double intervals = std::clamp(std::round(c.horizon / mean_wait), 1.0, 200'000.0);
  return c.horizon / intervals;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write " + p.string());
  return out;
}

}  // namespace

// Config ------------------------------------------------------------------

ExperimentConfig parse_config(const json& j, const fs::path& base_dir) {
  const std::string where = "config";
  expect_keys(j,
              {"model", "sampler", "balancing", "weights", "psi", "initial_state", "horizon", "thinning", "burn_in",
               "seed", "chains", "max_events", "max_lag", "verify_rates", "output", "size_cap", "tolerance",
               "repetitions"},
              where);
  ExperimentConfig c;
  c.base_dir = base_dir;
  if (!j.contains("model")) throw ConfigError("missing field 'model' in config");
  c.model = j.at("model");
  if (!c.model.is_object() || !c.model.contains("kind")) throw ConfigError("config.model needs a 'kind' field");
  try {
    c.sampler = sampler_kind_from_key(field_or<std::string>(j, "sampler", "zanella", where));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config.sampler: ") + e.what());
  }
  c.balancing = field_or<std::string>(j, "balancing", c.balancing, where);
  c.weights = field_or<std::vector<double>>(j, "weights", {}, where);
  c.psi = field_or<std::vector<double>>(j, "psi", {}, where);
  if (j.contains("initial_state")) c.initial_state = parse_state(j.at("initial_state"), "config.initial_state");
  c.horizon = field_or<double>(j, "horizon", c.horizon, where);
  if (j.contains("thinning")) c.thinning = field<double>(j, "thinning", where);
  c.burn_in = field_or<double>(j, "burn_in", c.burn_in, where);
  c.seed = field_or<std::uint64_t>(j, "seed", c.seed, where);
  c.chains = field_or<int>(j, "chains", c.chains, where);
  if (j.contains("max_events")) c.max_events = field<std::uint64_t>(j, "max_events", where);
  c.max_lag = field_or<std::size_t>(j, "max_lag", c.max_lag, where);
  c.verify_rates = field_or<bool>(j, "verify_rates", c.verify_rates, where);
  c.output = field_or<std::string>(j, "output", c.output.string(), where);
  c.size_cap = field_or<std::uint64_t>(j, "size_cap", c.size_cap, where);
  c.tolerance = field_or<double>(j, "tolerance", c.tolerance, where);
  c.repetitions = field_or<int>(j, "repetitions", c.repetitions, where);

  if (!(c.horizon > 0) || !std::isfinite(c.horizon)) throw ConfigError("config.horizon must be positive");
  if (c.thinning) thinning_intervals(c.horizon, *c.thinning);
  if (!(c.burn_in >= 0 && c.burn_in < 1)) throw ConfigError("config.burn_in must lie in [0, 1)");
  if (c.chains < 1) throw ConfigError("config.chains must be at least 1");
  if (c.repetitions < 1) throw ConfigError("config.repetitions must be at least 1");
  if (c.max_lag < 1) throw ConfigError("config.max_lag must be at least 1");
  if (!(c.tolerance > 0)) throw ConfigError("config.tolerance must be positive");
  try {
    BalancingFunction::from_key(c.balancing);
  } catch (const Error& e) {
    throw ConfigError(std::string("config.balancing: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

std::unique_ptr<Target> make_model(const json& spec, const fs::path& base) {
  const std::string kind = field<std::string>(spec, "kind", "model");
  const std::string where = "model(" + kind + ")";
  try {
    if (kind == "ising") {
      expect_keys(spec, {"kind", "rows", "cols", "coupling", "field"}, where);
      return std::make_unique<SpinSystem>(SpinSystem::ising_lattice(
          field<int>(spec, "rows", where), field<int>(spec, "cols", where),
          field_or<double>(spec, "coupling", 1.0, where), field_or<double>(spec, "field", 0.0, where)));
    }
    if (kind == "sk") {
      expect_keys(spec, {"kind", "n", "beta", "field", "seed", "couplings"}, where);
      const double h = field_or<double>(spec, "field", 0.0, where);
      if (spec.contains("couplings")) {
        return std::make_unique<SpinSystem>(read_matrix_csv(data_path(spec, "couplings", base, where)), h);
      }
      return std::make_unique<SpinSystem>(SpinSystem::sherrington_kirkpatrick(
          field<int>(spec, "n", where), field_or<double>(spec, "beta", 1.0, where), h,
          field_or<std::uint64_t>(spec, "seed", 1, where)));
    }
    if (kind == "bvs") {
      expect_keys(spec, {"kind", "data", "synthetic", "w", "v", "lambda"}, where);
      BvsHyper hyper;
      hyper.w = field_or<double>(spec, "w", hyper.w, where);
      hyper.v = field_or<double>(spec, "v", hyper.v, where);
      hyper.lambda = field_or<double>(spec, "lambda", hyper.lambda, where);
      if (spec.contains("data")) {
        const json& d = spec.at("data");
        const std::string dw = where + ".data";
        expect_keys(d, {"path", "response", "log_columns", "interactions", "intercept"}, dw);
        BvsDataSpec ds;
        ds.path = data_path(d, "path", base, dw);
        ds.response = field<std::string>(d, "response", dw);
        ds.log_columns = field_or<std::vector<std::string>>(d, "log_columns", {}, dw);
        ds.interactions = field_or<bool>(d, "interactions", false, dw);
        ds.intercept = field_or<bool>(d, "intercept", true, dw);
        return std::make_unique<BvsModel>(BvsModel::from_csv(ds, hyper));
      }
      const json s = spec.value("synthetic", json::object());
      const std::string sw = where + ".synthetic";
      expect_keys(s, {"m", "n", "active", "noise_sd", "seed"}, sw);
      return std::make_unique<BvsModel>(BvsModel::synthetic(
          field_or<int>(s, "m", 100, sw), field_or<int>(s, "n", 20, sw), field_or<int>(s, "active", 5, sw),
          field_or<double>(s, "noise_sd", 1.0, sw), field_or<std::uint64_t>(s, "seed", 1, sw), hyper));
    }
    if (kind == "permutation") {
      expect_keys(spec, {"kind", "n", "sigma2", "seed", "weights"}, where);
      if (spec.contains("weights")) {
        return std::make_unique<PermutationModel>(read_matrix_csv(data_path(spec, "weights", base, where)));
      }
      return std::make_unique<PermutationModel>(PermutationModel::lognormal(
          field<int>(spec, "n", where), field_or<double>(spec, "sigma2", 5.0, where),
          field_or<std::uint64_t>(spec, "seed", 1, where)));
    }
    if (kind == "facility") {
      expect_keys(spec, {"kind", "kappa", "cost_install", "cost_capacity", "capacity", "utilities", "venue", "seed"},
                  where);
      FacilityParams p;
      p.cost_install = field_or<double>(spec, "cost_install", p.cost_install, where);
      p.cost_capacity = field_or<double>(spec, "cost_capacity", p.cost_capacity, where);
      p.capacity = field_or<int>(spec, "capacity", p.capacity, where);
      if (spec.contains("utilities")) {
        return std::make_unique<FacilityModel>(read_matrix_csv(data_path(spec, "utilities", base, where)), p);
      }
      VenueSpec v;
      const json vj = spec.value("venue", json::object());
      const std::string vw = where + ".venue";
      expect_keys(vj, {"spacing", "notch_x", "notch_y", "users", "user_sd"}, vw);
      v.spacing = field_or<double>(vj, "spacing", v.spacing, vw);
      v.notch_x = field_or<double>(vj, "notch_x", v.notch_x, vw);
      v.notch_y = field_or<double>(vj, "notch_y", v.notch_y, vw);
      v.users = field_or<int>(vj, "users", v.users, vw);
      v.user_sd = field_or<double>(vj, "user_sd", v.user_sd, vw);
      p.kappa = field_or<double>(spec, "kappa", static_cast<double>(v.users), where);
      return std::make_unique<FacilityModel>(
          FacilityModel::venue(v, p, field_or<std::uint64_t>(spec, "seed", 1, where)));
    }
    if (kind == "dpp") {
      expect_keys(spec, {"kind", "m", "seed", "kernel", "pivot_tol"}, where);
      const double tol = field_or<double>(spec, "pivot_tol", 1e-12, where);
      if (spec.contains("kernel")) {
        return std::make_unique<DppModel>(read_matrix_csv(data_path(spec, "kernel", base, where)), tol);
      }
      auto m = DppModel::uniform_points(field<int>(spec, "m", where), field_or<std::uint64_t>(spec, "seed", 1, where));
      return std::make_unique<DppModel>(m.kernel(), tol);
    }
    if (kind == "lattice_gaussian") {
      expect_keys(spec, {"kind", "d", "s", "basis", "window"}, where);
      std::optional<Window> window;
      if (spec.contains("window")) {
        const auto w = field<std::vector<int>>(spec, "window", where);
        if (w.size() != 2 || w[0] > w[1]) throw ConfigError(where + ".window must be [lo, hi] with lo <= hi");
        window = Window{w[0], w[1]};
      }
      const double s = field<double>(spec, "s", where);
      if (spec.contains("basis")) {
        return std::make_unique<LatticeGaussianModel>(read_matrix_csv(data_path(spec, "basis", base, where)), s,
                                                      window);
      }
      return std::make_unique<LatticeGaussianModel>(
          LatticeGaussianModel::identity(field<int>(spec, "d", where), s, window));
    }
    if (kind == "gauge") {
      expect_keys(spec, {"kind", "nx", "ny", "p", "beta"}, where);
      return std::make_unique<GaugeModel>(field_or<int>(spec, "nx", 4, where), field_or<int>(spec, "ny", 4, where),
                                          field_or<int>(spec, "p", 53, where),
                                          field_or<double>(spec, "beta", 1.0, where));
    }
    if (kind == "path") {
      expect_keys(spec, {"kind", "weights", "beta_binomial"}, where);
      if (spec.contains("weights")) {
        return std::make_unique<PathModel>(field<std::vector<double>>(spec, "weights", where));
      }
      const json bb = spec.value("beta_binomial", json::object());
      const std::string bw = where + ".beta_binomial";
      expect_keys(bb, {"states", "a", "b"}, bw);
      return std::make_unique<PathModel>(PathModel::beta_binomial(
          field_or<int>(bb, "states", 50, bw), field_or<double>(bb, "a", 10.0, bw), field_or<double>(bb, "b", 20.0, bw)));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError("unknown model kind '" + kind +
                    "' (expected ising, sk, bvs, permutation, facility, dpp, lattice_gaussian, gauge or path)");
}

SamplerOptions sampler_options(const ExperimentConfig& c, const Target& target) {
  SamplerOptions o;
  o.g = BalancingFunction::from_key(c.balancing);
  o.weights = c.weights;
  o.psi = c.psi;
  o.verify_rates = c.verify_rates;
  // Constructing the sampler runs its compatibility checks.
  make_sampler(c.sampler, target, o);
  return o;
}

// Artifacts ---------------------------------------------------------------

void write_trace(const fs::path& csv, const fs::path& meta, const EventTrace& trace) {
  auto out = open_out(csv);
  out << "time,kind,generator,log_density,statistic\n";
  for (const auto& e : trace.events) {
    out << format_double(e.time) << ',' << to_string(e.kind) << ','
        << (e.generator ? std::to_string(*e.generator) : std::string()) << ',' << format_double(e.log_density) << ','
        << format_double(e.statistic) << '\n';
  }
  json m;
  m["sampler"] = to_string(trace.sampler);
  m["initial_state"] = trace.initial_state;
  m["initial_log_density"] = format_double(trace.initial_log_density);
  m["initial_statistic"] = format_double(trace.initial_statistic);
  m["final_state"] = trace.final_state;
  m["horizon"] = format_double(trace.horizon);
  m["events"] = trace.events.size();
  open_out(meta) << m.dump(2) << '\n';
}

EventTrace read_trace(const fs::path& csv, const fs::path& meta) {
  std::ifstream mi(meta);
  if (!mi) throw ConfigError("cannot open " + meta.string());
  json m;
  mi >> m;
  EventTrace t;
  t.sampler = sampler_kind_from_key(m.at("sampler").get<std::string>());
  t.initial_state = m.at("initial_state").get<State>();
  t.initial_log_density = std::stod(m.at("initial_log_density").get<std::string>());
  t.initial_statistic = std::stod(m.at("initial_statistic").get<std::string>());
  t.final_state = m.at("final_state").get<State>();
  t.horizon = std::stod(m.at("horizon").get<std::string>());

  std::ifstream in(csv);
  if (!in) throw ConfigError("cannot open " + csv.string());
  std::string line;
  std::getline(in, line);
  if (split_csv_line(line) != std::vector<std::string>{"time", "kind", "generator", "log_density", "statistic"}) {
    throw ValidationError(csv.string() + " is not a trace file");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 5) throw ValidationError("malformed trace line: " + line);
    Event e;
    e.time = std::stod(f[0]);
    e.kind = event_kind_from_key(f[1]);
    if (!f[2].empty()) e.generator = static_cast<GeneratorId>(std::stoul(f[2]));
    e.log_density = std::stod(f[3]);
    e.statistic = std::stod(f[4]);
    t.events.push_back(e);
  }
  return t;
}

void write_samples(const fs::path& path, const Target& target, const RunResult& run) {
  auto out = open_out(path);
  out << "time";
  for (const auto& c : target.state_columns()) out << ',' << c;
  out << ',' << target.statistic_name() << '\n';
  for (std::size_t i = 0; i < run.thinned.size(); ++i) {
    out << format_double(run.thin_times[i]);
    for (int v : run.thinned[i]) out << ',' << v;
    out << ',' << format_double(run.thinned_statistic[i]) << '\n';
  }
}

SampleTable read_samples(const fs::path& path, std::size_t width) {
  const Table t = read_table(path);
  if (t.columns.size() != width + 2) {
    throw ValidationError(path.string() + " has " + std::to_string(t.columns.size()) + " columns, expected " +
                          std::to_string(width + 2));
  }
  SampleTable out;
  out.state_columns.assign(t.columns.begin() + 1, t.columns.end() - 1);
  for (const auto& row : t.rows) {
    out.times.push_back(row.front());
    State x;
    for (std::size_t k = 1; k <= width; ++k) x.push_back(static_cast<int>(std::lround(row[k])));
    out.states.push_back(std::move(x));
    out.statistic.push_back(row.back());
  }
  return out;
}

void write_acf(const fs::path& path, const std::vector<double>& acf) {
  auto out = open_out(path);
  out << "lag,acf\n";
  for (std::size_t k = 0; k < acf.size(); ++k) out << k << ',' << format_double(acf[k]) << '\n';
}

void write_circle_series(const fs::path& path, const Target& target, const RunResult& run) {
  const auto* gauge = dynamic_cast<const GaugeModel*>(&target);
  if (!gauge) throw DomainError("circle series needs a gauge model");
  auto out = open_out(path);
  out << "time,cos,sin\n";
  for (std::size_t i = 0; i < run.thinned.size(); ++i) {
    const double a = gauge->angle(run.thinned[i], 0);
    out << format_double(run.thin_times[i]) << ',' << format_double(std::cos(a)) << ','
        << format_double(std::sin(a)) << '\n';
  }
}

// Commands ----------------------------------------------------------------

RunReport cmd_run(const ExperimentConfig& c, std::ostream& log) {
  const auto target = make_model(c.model, c.base_dir);
  const SamplerOptions opts = sampler_options(c, *target);
  const State x0 = c.initial_state.value_or(target->default_initial_state());
  target->validate(x0);

  RunReport report;
  report.thinning = c.thinning ? *c.thinning : auto_thinning(c, *target, opts, x0);
  RunOptions ro;
  ro.horizon = c.horizon;
  ro.thinning = report.thinning;
  ro.max_events = c.max_events;
  report.chains = run_chains(c.sampler, *target, opts, x0, ro, c.seed, c.chains);

  fs::create_directories(c.output);
  Table stats;
  stats.columns = {"chain",      "events",       "jumps",          "ess",           "ess_per_second",
                   "mean_excursion", "mean_event_time", "statistic_mean", "statistic_se", "wall_seconds"};
  json summary;
  summary["model"] = c.model;
  summary["sampler"] = to_string(c.sampler);
  summary["balancing"] = c.balancing;
  summary["horizon"] = c.horizon;
  summary["thinning"] = report.thinning;
  summary["burn_in"] = c.burn_in;
  summary["seed"] = c.seed;
  summary["statistic"] = target->statistic_name();
  summary["chains"] = json::array();
  for (int i = 0; i < c.chains; ++i) {
    const RunResult& r = report.chains[i];
    const std::string tag = "chain" + std::to_string(i);
    write_trace(c.output / ("trace_" + tag + ".csv"), c.output / ("trace_" + tag + ".json"), r.trace);
    write_samples(c.output / ("samples_" + tag + ".csv"), *target, r);
    if (target->kind() == "gauge") write_circle_series(c.output / ("circle_" + tag + ".csv"), *target, r);
    const RunStatistics s = summarize(r, c.burn_in, c.max_lag);
    write_acf(c.output / ("acf_" + tag + ".csv"), s.acf);
    report.statistics.push_back(s);

    const auto count = [&](EventKind k) {
      auto it = s.event_counts.find(k);
      return it == s.event_counts.end() ? 0.0 : static_cast<double>(it->second);
    };
    const double excursion = s.mean_excursion.value_or(std::nan(""));
    stats.rows.push_back({static_cast<double>(i), static_cast<double>(r.trace.events.size()), count(EventKind::JumpX),
                          s.ess, s.ess_per_second, excursion, s.mean_event_time, s.statistic_mean, s.statistic_se,
                          r.wall_seconds});
    json cj;
    cj["chain"] = i;
    cj["events"] = r.trace.events.size();
    json counts = json::object();
    for (const auto& [k, n] : s.event_counts) counts[to_string(k)] = n;
    cj["event_counts"] = counts;
    cj["ess"] = s.ess;
    cj["ess_per_second"] = s.ess_per_second;
    cj["mean_excursion"] = s.mean_excursion ? json(*s.mean_excursion) : json(nullptr);
    cj["mean_event_time"] = s.mean_event_time;
    cj["statistic_mean"] = s.statistic_mean;
    cj["statistic_se"] = s.statistic_se;
    cj["samples"] = s.samples;
    cj["degenerate_acf"] = s.degenerate;
    cj["stopped_early"] = r.stopped_early;
    cj["wall_seconds"] = r.wall_seconds;
    cj["final_state"] = r.trace.final_state;
    cj["warnings"] = r.warnings;
    summary["chains"].push_back(cj);

    log << tag << ": " << r.trace.events.size() << " events, ess " << std::setprecision(4) << s.ess << ", "
        << target->statistic_name() << " " << s.statistic_mean << " +- " << s.statistic_se << '\n';
    for (const auto& w : r.warnings) log << tag << " warning: " << w << '\n';
  }
  write_table(c.output / "statistics.csv", stats);
  open_out(c.output / "statistics.json") << summary.dump(2) << '\n';
  log << "artifacts written to " << c.output.string() << '\n';
  return report;
}

bool cmd_verify(const ExperimentConfig& c, std::ostream& log) {
  const auto target = make_model(c.model, c.base_dir);
  const SamplerOptions opts = sampler_options(c, *target);

  // Warnings the sampler raises at the configured start (dCS symmetric traps).
  const State x0 = c.initial_state.value_or(target->default_initial_state());
  std::vector<std::string> warnings;
  {
    auto sampler = make_sampler(c.sampler, *target, opts);
    Philox4x32 rng(c.seed, 0);
    try {
      sampler->reset(sampler->initial_state(x0, rng));
      warnings = sampler->warnings();
    } catch (const AbsorbingStateError& e) {
      warnings.push_back(e.what());
    }
  }

  const auto rows = verify_sampler(*target, c.sampler, opts, c.size_cap, c.tolerance, c.seed);
  fs::create_directories(c.output);
  write_checks_csv(c.output / "verify.csv", rows);

  log << "verify " << to_string(c.sampler) << " on " << target->kind() << " (g = " << c.balancing << ")\n";
  bool ok = true;
  for (const auto& r : rows) {
    ok = ok && r.pass;
    log << "  " << (r.pass ? "pass" : "FAIL") << "  " << std::left << std::setw(40) << r.name << std::right
        << " states " << std::setw(8) << r.space_size << "  max violation " << std::scientific << std::setprecision(3)
        << r.max_violation << std::defaultfloat;
    if (!r.note.empty()) log << "  (" << r.note << ")";
    log << '\n';
  }
  for (const auto& w : warnings) log << "  warning: " << w << '\n';

  // Jump-chain law of the Zanella process under the configured g.
  const auto jm = jump_measure(*target, BalancingFunction::from_key(c.balancing));
  Table t;
  t.columns = {"state", "pi", "jump_measure", "ratio", "exit_rate"};
  const auto states = target->enumerate_states();
  std::vector<double> logp(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) logp[i] = target->log_density(states[i]);
  const double mx = *std::max_element(logp.begin(), logp.end());
  double z = 0.0;
  for (double l : logp) z += std::exp(l - mx);
  for (std::size_t i = 0; i < states.size(); ++i) {
    t.rows.push_back({static_cast<double>(i), std::exp(logp[i] - mx) / z, jm.measure[i], jm.ratio[i], jm.exit_rate[i]});
  }
  write_table(c.output / "jump_measure.csv", t);
  log << (ok ? "all checks passed" : "some checks FAILED") << "; report in " << (c.output / "verify.csv").string()
      << '\n';
  return ok;
}

double mode_threshold(double mode, double start) { return mode - 0.01 * (mode - start); }

std::vector<CompareRow> cmd_compare(const std::vector<ExperimentConfig>& configs, std::ostream& log) {
  if (configs.empty()) throw ConfigError("compare needs at least one config");
  for (const auto& c : configs) {
    if (c.model != configs.front().model) throw ConfigError("compare configs must share one model");
  }
  const auto target = make_model(configs.front().model, configs.front().base_dir);
  const auto mode = target->mode_log_density();

  std::vector<CompareRow> rows;
  for (const auto& c : configs) {
    const SamplerOptions opts = sampler_options(c, *target);
    const State x0 = c.initial_state.value_or(target->default_initial_state());
    target->validate(x0);
    const double thinning = c.thinning ? *c.thinning : auto_thinning(c, *target, opts, x0);
    RunOptions ro;
    ro.horizon = c.horizon;
    ro.thinning = thinning;
    ro.max_events = c.max_events;
    const auto runs = run_chains(c.sampler, *target, opts, x0, ro, c.seed, c.repetitions);

    CompareRow row;
    row.sampler = c.sampler;
    row.balancing = c.balancing;
    row.label = to_string(c.sampler) + "/" + c.balancing;
    std::vector<double> ess, eps, exc, events, jumps, to_mode;
    for (const auto& r : runs) {
      const auto s = summarize(r, c.burn_in, c.max_lag);
      ess.push_back(s.ess);
      eps.push_back(s.ess_per_second);
      if (s.mean_excursion) exc.push_back(*s.mean_excursion);
      events.push_back(static_cast<double>(r.trace.events.size()));
      const auto j = s.event_counts.find(EventKind::JumpX);
      jumps.push_back(j == s.event_counts.end() ? 0.0 : static_cast<double>(j->second));
      if (mode) {
        const auto hit = events_to_threshold(r.trace, mode_threshold(*mode, r.trace.initial_log_density));
        if (hit) ++row.runs_reaching_mode;
        to_mode.push_back(static_cast<double>(hit.value_or(r.trace.events.size())));
      }
    }
    row.ess = summarize_values(ess);
    row.ess_per_second = summarize_values(eps);
    if (!exc.empty()) row.mean_excursion = summarize_values(exc);
    row.events = summarize_values(events);
    row.jumps = summarize_values(jumps);
    if (mode) row.events_to_mode = summarize_values(to_mode);
    rows.push_back(row);
  }

  std::size_t base = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].sampler == SamplerKind::Zanella) {
      base = i;
      break;
    }
  }
  for (auto& r : rows) {
    r.ess_per_second_ratio = rows[base].ess_per_second.mean > 0 ? r.ess_per_second.mean / rows[base].ess_per_second.mean
                                                                 : std::nan("");
  }

  const fs::path out_dir = configs.front().output;
  fs::create_directories(out_dir);
  auto out = open_out(out_dir / "compare.csv");
  out << "row,sampler,balancing,ess_mean,ess_se,ess_per_second_mean,ess_per_second_se,ess_per_second_ratio,"
         "mean_excursion_mean,mean_excursion_se,events_mean,jumps_mean,events_to_mode_mean,events_to_mode_se,"
         "runs_reaching_mode\n";
  const auto opt = [](const std::optional<MeanEstimate>& m, bool se) {
    return m ? format_double(se ? m->se : m->mean) : std::string();
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << i << ',' << to_string(r.sampler) << ',' << r.balancing << ',' << format_double(r.ess.mean) << ','
        << format_double(r.ess.se) << ',' << format_double(r.ess_per_second.mean) << ','
        << format_double(r.ess_per_second.se) << ',' << format_double(r.ess_per_second_ratio) << ','
        << opt(r.mean_excursion, false) << ',' << opt(r.mean_excursion, true) << ',' << format_double(r.events.mean)
        << ',' << format_double(r.jumps.mean) << ',' << opt(r.events_to_mode, false) << ','
        << opt(r.events_to_mode, true) << ',' << (mode ? std::to_string(r.runs_reaching_mode) : std::string())
        << '\n';
  }

  log << std::left << std::setw(22) << "sampler" << std::right << std::setw(12) << "ESS" << std::setw(12) << "ESS/s"
      << std::setw(10) << "ratio" << std::setw(12) << "excursion" << std::setw(12) << "events";
  if (mode) log << std::setw(14) << "to_mode";
  log << '\n' << std::setprecision(4);
  for (const auto& r : rows) {
    log << std::left << std::setw(22) << r.label << std::right << std::setw(12) << r.ess.mean << std::setw(12)
        << r.ess_per_second.mean << std::setw(10) << r.ess_per_second_ratio << std::setw(12)
        << (r.mean_excursion ? std::to_string(r.mean_excursion->mean) : std::string("-")) << std::setw(12)
        << r.events.mean;
    if (mode) log << std::setw(14) << r.events_to_mode->mean;
    log << '\n';
  }
  log << "table written to " << (out_dir / "compare.csv").string() << '\n';
  return rows;
}

}  // namespace jumpmc
