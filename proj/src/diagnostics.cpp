#include "jumpmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jumpmc/errors.hpp"

namespace jumpmc {

namespace {

void check_horizon(const EventTrace& trace, double T) {
  if (!(T > 0)) throw DomainError("averaging horizon must be positive");
  if (T > trace.horizon * (1 + 1e-12)) {
    throw DomainError("averaging horizon " + std::to_string(T) + " exceeds the trace horizon " +
                      std::to_string(trace.horizon));
  }
}

// Calls visit(value_index, start, end) for each holding interval within [0, T],
// where value_index -1 is the initial state and k the state after event k.
template <class F>
void for_each_interval(const EventTrace& trace, double T, F&& visit) {
  double start = 0.0;
  long current = -1;
  for (std::size_t k = 0; k < trace.events.size(); ++k) {
    const double t = std::min(trace.events[k].time, T);
    if (t > start) visit(current, start, t);
    start = std::max(start, t);
    if (trace.events[k].time > T) return;
    current = static_cast<long>(k);
  }
  if (T > start) visit(current, start, T);
}

std::vector<double> thin_times(double horizon, double thinning) {
  const std::uint64_t n = thinning_intervals(horizon, thinning);
  std::vector<double> out;
  for (std::uint64_t i = 0; i <= n; ++i) out.push_back(i == n ? horizon : static_cast<double>(i) * thinning);
  return out;
}

// Index of the last event with time <= t, or -1.
long value_at(const EventTrace& trace, double t) {
  auto it = std::upper_bound(trace.events.begin(), trace.events.end(), t,
                             [](double v, const Event& e) { return v < e.time; });
  return static_cast<long>(it - trace.events.begin()) - 1;
}

std::map<State, std::size_t> index_of(const std::vector<State>& states) {
  std::map<State, std::size_t> out;
  for (std::size_t i = 0; i < states.size(); ++i) out.emplace(states[i], i);
  return out;
}

}  // namespace

std::vector<State> replay(const EventTrace& trace, const Target& target) {
  std::vector<State> out;
  out.reserve(trace.events.size());
  State x = trace.initial_state;
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::JumpX) target.apply_in_place(*e.generator, x);
    out.push_back(x);
  }
  return out;
}

double time_average(const EventTrace& trace, const Target& target, const std::function<double(const State&)>& f,
                    double T) {
  check_horizon(trace, T);
  const auto states = replay(trace, target);
  const double f0 = f(trace.initial_state);
  double acc = 0.0;
  for_each_interval(trace, T, [&](long k, double a, double b) { acc += (b - a) * (k < 0 ? f0 : f(states[k])); });
  return acc / T;
}

double time_average_statistic(const EventTrace& trace, double T) {
  check_horizon(trace, T);
  double acc = 0.0;
  for_each_interval(trace, T, [&](long k, double a, double b) {
    acc += (b - a) * (k < 0 ? trace.initial_statistic : trace.events[k].statistic);
  });
  return acc / T;
}

std::vector<State> thin(const EventTrace& trace, const Target& target, double thinning) {
  const auto states = replay(trace, target);
  std::vector<State> out;
  for (double t : thin_times(trace.horizon, thinning)) {
    const long k = value_at(trace, t);
    out.push_back(k < 0 ? trace.initial_state : states[k]);
  }
  return out;
}

std::vector<double> thin_statistic(const EventTrace& trace, double thinning) {
  std::vector<double> out;
  for (double t : thin_times(trace.horizon, thinning)) {
    const long k = value_at(trace, t);
    out.push_back(k < 0 ? trace.initial_statistic : trace.events[k].statistic);
  }
  return out;
}

Acf acf(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  if (n < 2) throw DomainError("autocorrelation needs at least two samples");
  const std::size_t lags = std::min(max_lag, n - 1);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = x[i] - mean;
  double var = 0.0;
  for (double v : c) var += v * v;
  Acf out;
  out.values.assign(lags + 1, 0.0);
  out.values[0] = 1.0;
  if (!(var > 1e-300 * static_cast<double>(n)) || var <= 1e-24 * std::max(1.0, mean * mean) * static_cast<double>(n)) {
    out.degenerate = true;
    return out;
  }
  for (std::size_t k = 1; k <= lags; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) s += c[i] * c[i + k];
    out.values[k] = s / var;
  }
  return out;
}

double ess(std::span<const double> x, std::size_t max_lag) {
  const auto a = acf(x, max_lag);
  const double n = static_cast<double>(x.size());
  if (a.degenerate) return 1.0;
  double sum = 0.0;
  const std::size_t lags = a.values.size() - 1;
  // Paired sums G_m = acf[2m] + acf[2m+1]; accumulate while positive.
  for (std::size_t m = 0; 2 * m + 1 <= lags; ++m) {
    const double pair = a.values[2 * m] + a.values[2 * m + 1];
    if (pair <= 0) break;
    sum += pair;
  }
  // sum = 1 + 2 sum_{k>=1} acf[k] written as -1 + 2 sum_m G_m.
  const double tau = std::max(2.0 * sum - 1.0, 1.0 / n);
  return std::clamp(n / tau, 1.0, n);
}

std::optional<double> mean_excursion(const EventTrace& trace) {
  EventKind reversal;
  if (trace.sampler == SamplerKind::Tabu) {
    reversal = EventKind::FlipTau;
  } else if (trace.sampler == SamplerKind::Dcs) {
    reversal = EventKind::VelocityJump;
  } else {
    throw DomainError("mean excursion is defined for Tabu and dCS traces only");
  }
  std::size_t jumps = 0, flips = 0;
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::JumpX) ++jumps;
    if (e.kind == reversal) ++flips;
  }
  if (flips == 0) return std::nullopt;
  return static_cast<double>(jumps) / static_cast<double>(flips);
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DomainError("total variation needs laws on the same support");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

MeanEstimate mean_with_se(std::span<const double> x, std::size_t max_lag) {
  MeanEstimate out;
  const double n = static_cast<double>(x.size());
  out.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - out.mean) * (v - out.mean);
  out.ess = ess(x, max_lag);
  out.se = std::sqrt(ss / std::max(1.0, n - 1.0) / out.ess);
  return out;
}

std::vector<double> occupation(const EventTrace& trace, const Target& target, const std::vector<State>& states,
                               double* outside) {
  const auto idx = index_of(states);
  const auto visited = replay(trace, target);
  std::vector<double> out(states.size(), 0.0);
  double lost = 0.0;
  for_each_interval(trace, trace.horizon, [&](long k, double a, double b) {
    const State& x = k < 0 ? trace.initial_state : visited[k];
    auto it = idx.find(x);
    if (it == idx.end()) {
      lost += b - a;
    } else {
      out[it->second] += b - a;
    }
  });
  for (double& v : out) v /= trace.horizon;
  if (outside) *outside = lost / trace.horizon;
  return out;
}

std::vector<double> jump_chain_occupancy(const EventTrace& trace, const Target& target,
                                         const std::vector<State>& states) {
  const auto idx = index_of(states);
  std::vector<double> out(states.size(), 0.0);
  double total = 0.0;
  auto count = [&](const State& x) {
    auto it = idx.find(x);
    if (it != idx.end()) {
      out[it->second] += 1.0;
      total += 1.0;
    }
  };
  State x = trace.initial_state;
  count(x);
  for (const auto& e : trace.events) {
    if (e.kind != EventKind::JumpX) continue;
    target.apply_in_place(*e.generator, x);
    count(x);
  }
  for (double& v : out) v /= total;
  return out;
}

std::optional<std::size_t> events_to_threshold(const EventTrace& trace, double threshold) {
  if (trace.initial_log_density >= threshold) return 0;
  for (std::size_t k = 0; k < trace.events.size(); ++k) {
    if (trace.events[k].log_density >= threshold) return k + 1;
  }
  return std::nullopt;
}

RunStatistics summarize(const RunResult& run, double burn_in, std::size_t max_lag) {
  if (!(burn_in >= 0 && burn_in < 1)) throw ConfigError("burn-in fraction must lie in [0, 1)");
  RunStatistics out;
  const double cut = burn_in * run.trace.horizon;
  std::vector<double> kept;
  for (std::size_t i = 0; i < run.thinned_statistic.size(); ++i) {
    if (run.thin_times[i] >= cut) kept.push_back(run.thinned_statistic[i]);
  }
  out.samples = kept.size();
  if (kept.size() >= 2) {
    const auto a = acf(kept, max_lag);
    out.acf = a.values;
    out.degenerate = a.degenerate;
    const auto est = mean_with_se(kept, max_lag);
    out.ess = est.ess;
    out.statistic_mean = est.mean;
    out.statistic_se = est.se;
  }
  out.ess_per_second = run.wall_seconds > 0 ? out.ess / run.wall_seconds : 0.0;
  for (const auto& e : run.trace.events) ++out.event_counts[e.kind];
  if (run.trace.sampler == SamplerKind::Tabu || run.trace.sampler == SamplerKind::Dcs) {
    out.mean_excursion = mean_excursion(run.trace);
  }
  double prev = 0.0, waits = 0.0;
  std::size_t counted = 0;
  for (const auto& e : run.trace.events) {
    if (e.time >= cut && prev >= cut) {
      waits += e.time - prev;
      ++counted;
    }
    prev = e.time;
  }
  out.mean_event_time = counted ? waits / static_cast<double>(counted) : 0.0;
  return out;
}

}  // namespace jumpmc
