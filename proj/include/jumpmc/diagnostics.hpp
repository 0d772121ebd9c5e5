#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "jumpmc/samplers.hpp"

namespace jumpmc {

/// State after each event (index k = after event k), replayed from the
/// initial state through the JumpX generators.
std::vector<State> replay(const EventTrace& trace, const Target& target);

/// (1/T) int_0^T f(X_s) ds with each holding interval weighted by the state
/// occupied during it.
double time_average(const EventTrace& trace, const Target& target, const std::function<double(const State&)>& f,
                    double T);
/// Same for the recorded target statistic.
double time_average_statistic(const EventTrace& trace, double T);

/// States at times 0, thinning, ..., horizon (post-event at ties).
std::vector<State> thin(const EventTrace& trace, const Target& target, double thinning);
/// Recorded statistic at the thinning times.
std::vector<double> thin_statistic(const EventTrace& trace, double thinning);

struct Acf {
  std::vector<double> values;  // values[0] = 1
  bool degenerate = false;     // zero variance
};

/// Biased-normalized autocorrelation up to min(max_lag, N - 1).
Acf acf(std::span<const double> samples, std::size_t max_lag);

/// N / (1 + 2 sum_{k=1}^K acf[k]) with K from the initial positive sequence
/// of paired sums, capped at max_lag; clamped to [1, N].
double ess(std::span<const double> samples, std::size_t max_lag = 3000);

/// Jumps per time reversal: FlipTau for Tabu, VelocityJump for dCS. Empty
/// when no reversal occurred; DomainError for other samplers.
std::optional<double> mean_excursion(const EventTrace& trace);

/// Half the L1 distance between two laws on the same support.
double tv_distance(std::span<const double> p, std::span<const double> q);

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
  double ess = 0.0;
};
/// Sample mean and its standard error sd / sqrt(ess).
MeanEstimate mean_with_se(std::span<const double> samples, std::size_t max_lag = 3000);

/// Time-weighted occupation of `states` (positions in the list); mass spent
/// outside the list is dropped and reported through `outside`.
std::vector<double> occupation(const EventTrace& trace, const Target& target, const std::vector<State>& states,
                               double* outside = nullptr);
/// Visit frequencies of the embedded jump chain X_0, X_1, ... (one count per
/// x-move plus the initial state).
std::vector<double> jump_chain_occupancy(const EventTrace& trace, const Target& target,
                                         const std::vector<State>& states);

/// Number of events until the log density first reaches `threshold` (0 if
/// already there); empty if never.
std::optional<std::size_t> events_to_threshold(const EventTrace& trace, double threshold);

struct RunStatistics {
  double ess = 0.0;
  double ess_per_second = 0.0;
  std::vector<double> acf;
  bool degenerate = false;
  std::optional<double> mean_excursion;
  std::map<EventKind, std::uint64_t> event_counts;
  /// Mean waiting time between events after burn-in.
  double mean_event_time = 0.0;
  double statistic_mean = 0.0;
  double statistic_se = 0.0;
  std::size_t samples = 0;
};

/// Statistics of the thinned target statistic after discarding the first
/// `burn_in` fraction of process time.
RunStatistics summarize(const RunResult& run, double burn_in = 0.2, std::size_t max_lag = 3000);

}  // namespace jumpmc
