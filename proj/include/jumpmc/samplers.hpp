#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jumpmc/balancing.hpp"
#include "jumpmc/rng.hpp"
#include "jumpmc/statespace.hpp"

namespace jumpmc {

enum class SamplerKind { Zanella, Tabu, Dzz, Dcs };
enum class EventKind { JumpX, FlipTau, FlipTheta, VelocityJump };

std::string to_string(SamplerKind k);
std::string to_string(EventKind k);
SamplerKind sampler_kind_from_key(std::string_view key);
EventKind event_kind_from_key(std::string_view key);

/// x together with the auxiliaries of the owning sampler. Unused fields stay
/// empty: alpha (Tabu, one entry per generator position), theta (dZZ, one per
/// reduced-set position), velocity (dCS), tau (Tabu and dCS).
struct SamplerState {
  State x;
  std::vector<int> alpha;
  std::vector<int> theta;
  GeneratorId velocity = 0;
  int tau = 1;

  bool operator==(const SamplerState&) const = default;
};

/// One event of the piecewise-constant path. `generator` is the generator
/// actually applied for JumpX, the reduced-set generator whose direction
/// flipped for FlipTheta, the new velocity for VelocityJump, and empty for
/// FlipTau. `log_density` and `statistic` describe the post-event state.
struct Event {
  double time = 0.0;
  EventKind kind = EventKind::JumpX;
  std::optional<GeneratorId> generator;
  double log_density = 0.0;
  double statistic = 0.0;
};

struct SamplerOptions {
  BalancingFunction g;
  /// dZZ generator weights indexed by reduced-set position (default all 1).
  std::vector<double> weights;
  /// dCS velocity law indexed by generator position (default uniform).
  std::vector<double> psi;
  /// Compare every cached log ratio and the running log density against
  /// from-scratch evaluation after each event.
  bool verify_rates = false;
  double verify_tol = 1e-10;
};

/// What the next event would be; produced by draw() and applied by commit().
struct Proposal {
  double wait = 0.0;
  EventKind kind = EventKind::JumpX;
  GeneratorId generator = 0;
  /// Generator position (Tabu), reduced-set position (dZZ) or unused.
  std::size_t index = 0;
  double log_ratio = 0.0;
};

/// Continuous-time event loop over an augmented state.
class Sampler {
 public:
  virtual ~Sampler() = default;

  virtual SamplerKind kind() const = 0;
  const Target& target() const { return target_; }
  const SamplerOptions& options() const { return options_; }

  /// Validates and installs `init`; resets process time to 0.
  void reset(SamplerState init);
  /// Initial auxiliaries for `x`: alpha and tau +1, theta +1, velocity drawn from psi.
  virtual SamplerState initial_state(const State& x, Philox4x32& rng) const = 0;

  const SamplerState& state() const { return state_; }
  double time() const { return time_; }
  double log_density() const { return log_density_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Total event rate of the current augmented state.
  virtual double total_rate() const = 0;
  /// Samples the waiting time and the event without changing the state.
  virtual Proposal draw(Philox4x32& rng) const = 0;
  /// Applies a proposal drawn at the current state.
  Event commit(const Proposal& p);
  Event step(Philox4x32& rng) { return commit(draw(rng)); }

 protected:
  Sampler(const Target& target, SamplerOptions options);

  /// Per-generator log rates log g(pi(gx)/pi(x)), indexed by generator position.
  std::vector<double> log_rates() const;
  virtual void validate_aux(const SamplerState& s) const = 0;
  virtual void on_reset() {}
  /// Auxiliary updates for a proposal; x moves are handled by commit().
  virtual void apply_aux(const Proposal& p) = 0;

  const Target& target_;
  SamplerOptions options_;
  SamplerState state_;
  std::vector<std::string> warnings_;

 private:
  void verify() const;

  std::unique_ptr<RatioCache> cache_;
  double time_ = 0.0;
  double log_density_ = 0.0;
};

/// Reversible process with neighbour rates g(pi(y)/pi(x)).
class ZanellaSampler : public Sampler {
 public:
  ZanellaSampler(const Target& target, SamplerOptions options);
  SamplerKind kind() const override { return SamplerKind::Zanella; }
  SamplerState initial_state(const State& x, Philox4x32& rng) const override;
  double total_rate() const override;
  Proposal draw(Philox4x32& rng) const override;

 protected:
  void validate_aux(const SamplerState& s) const override;
  void apply_aux(const Proposal&) override {}
};

/// Non-reversible sampler with per-generator availability alpha and a global
/// direction tau; order-2 generators only.
class TabuSampler : public Sampler {
 public:
  TabuSampler(const Target& target, SamplerOptions options);
  SamplerKind kind() const override { return SamplerKind::Tabu; }
  SamplerState initial_state(const State& x, Philox4x32& rng) const override;
  /// max(Lambda(x; alpha, tau), Lambda(x; alpha, -tau)).
  double total_rate() const override;
  /// Lambda(x; alpha, tau) / total_rate().
  double jump_probability() const;
  Proposal draw(Philox4x32& rng) const override;

 protected:
  void validate_aux(const SamplerState& s) const override;
  void apply_aux(const Proposal& p) override;
};

/// Discrete Zig-Zag: direction theta per reduced-set generator, optionally
/// weighted.
class DzzSampler : public Sampler {
 public:
  DzzSampler(const Target& target, SamplerOptions options);
  SamplerKind kind() const override { return SamplerKind::Dzz; }
  SamplerState initial_state(const State& x, Philox4x32& rng) const override;
  double total_rate() const override;
  Proposal draw(Philox4x32& rng) const override;
  const GeneratorSet& reduced() const { return reduced_; }

 protected:
  void validate_aux(const SamplerState& s) const override;
  void apply_aux(const Proposal& p) override;

 private:
  /// Log of w(g) max(lambda(x,g;theta), lambda(x,g;-theta)) and the forward
  /// log rate, per reduced position.
  void per_generator(const std::vector<double>& lr, std::vector<double>& log_total,
                     std::vector<double>& log_forward) const;

  GeneratorSet reduced_;
  std::vector<double> log_weights_;
};

/// Discrete Coordinate Sampler: one velocity v in the generating set and a
/// time direction tau.
class DcsSampler : public Sampler {
 public:
  DcsSampler(const Target& target, SamplerOptions options);
  SamplerKind kind() const override { return SamplerKind::Dcs; }
  SamplerState initial_state(const State& x, Philox4x32& rng) const override;
  /// Delta(x, v) = max(delta(x, v, tau), delta(x, v, -tau)).
  double total_rate() const override;
  Proposal draw(Philox4x32& rng) const override;
  const std::vector<double>& psi() const { return psi_; }

 protected:
  void validate_aux(const SamplerState& s) const override;
  void on_reset() override;
  void apply_aux(const Proposal& p) override;

 private:
  std::vector<double> psi_;
};

std::unique_ptr<Sampler> make_sampler(SamplerKind kind, const Target& target, SamplerOptions options);

struct RunOptions {
  double horizon = 1.0;
  double thinning = 1.0;
  /// Stop early after this many events (the trace horizon is then the time
  /// of the last event).
  std::optional<std::uint64_t> max_events;
};

struct EventTrace {
  SamplerKind sampler = SamplerKind::Zanella;
  State initial_state;
  double initial_log_density = 0.0;
  double initial_statistic = 0.0;
  std::vector<Event> events;
  State final_state;
  double horizon = 0.0;
};

struct RunResult {
  EventTrace trace;
  std::vector<double> thin_times;
  std::vector<State> thinned;
  std::vector<double> thinned_statistic;
  double wall_seconds = 0.0;
  bool stopped_early = false;
  std::vector<std::string> warnings;
};

/// Number of thinning intervals T / thinning; ConfigError unless integral.
std::uint64_t thinning_intervals(double horizon, double thinning);

/// Runs `sampler` from `init` to process time T, recording every event and
/// the state at times 0, thinning, ..., T. An event landing exactly on a
/// thinning time is recorded post-event.
RunResult run(Sampler& sampler, const SamplerState& init, const RunOptions& options, Philox4x32& rng);

/// Chain i uses Philox4x32(seed, i); chains run concurrently.
std::vector<RunResult> run_chains(SamplerKind kind, const Target& target, const SamplerOptions& options,
                                  const State& x0, const RunOptions& run_options, std::uint64_t seed,
                                  int chains);

}  // namespace jumpmc
