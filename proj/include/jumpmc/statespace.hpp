#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace jumpmc {

/// Model-specific state encoding: spins (+1/-1), inclusion bits (0/1),
/// permutation images, lattice coordinates, or edge values mod p.
using State = std::vector<int>;

/// Small-integer handle of a generator; the owning model interprets it.
using GeneratorId = std::uint32_t;

struct Generator {
  GeneratorId id = 0;
  GeneratorId inverse_id = 0;
  /// Smallest k with g^k = id; nullopt means infinite order.
  std::optional<int> order;

  bool involution() const { return inverse_id == id; }
};

/// Finite set of generators. Handles need not be contiguous (a reduced set
/// keeps the handles of the full set it was drawn from).
class GeneratorSet {
 public:
  GeneratorSet() = default;
  explicit GeneratorSet(std::vector<Generator> generators);

  std::size_t size() const { return generators_.size(); }
  bool empty() const { return generators_.empty(); }
  const Generator& operator[](std::size_t i) const { return generators_[i]; }
  auto begin() const { return generators_.begin(); }
  auto end() const { return generators_.end(); }

  bool contains(GeneratorId id) const;
  /// Position of `id` in this set; throws if absent.
  std::size_t position(GeneratorId id) const;
  const Generator& by_id(GeneratorId id) const { return generators_[position(id)]; }

  /// Every member's inverse is also a member.
  bool symmetric() const { return symmetric_; }
  /// No member has its (distinct) inverse in the set.
  bool reduced() const;
  /// Every member has order exactly two.
  bool all_order_two() const;

 private:
  std::vector<Generator> generators_;
  std::vector<std::int64_t> position_;
  bool symmetric_ = true;
};

/// n self-inverse generators with handles 0..n-1 (spin flips, bit toggles).
GeneratorSet involution_generators(std::size_t n);
/// 2d generators of order `order` (nullopt = infinite): handle 2i steps
/// coordinate i up, 2i+1 steps it down.
GeneratorSet signed_step_generators(std::size_t d, std::optional<int> order);

/// All vectors in {off, on}^n in binary-counter order (bit i of the index
/// selects `on` at position i). Throws SizeOverflowError when n > max_bits.
std::vector<State> binary_states(std::size_t n, int off, int on, std::size_t max_bits = 24);

/// The generator g^-1 as described by the full set.
Generator inverse(const GeneratorSet& full, const Generator& g);

/// One representative per {g, g^-1} pair, keeping the lower handle.
GeneratorSet reduced_set(const GeneratorSet& full);

/// Log ratios log pi(g x) - log pi(x) for every generator of a target,
/// maintained incrementally while a chain moves.
class RatioCache {
 public:
  virtual ~RatioCache() = default;
  virtual double log_ratio(GeneratorId g) const = 0;
  /// Called after the chain jumped with `g`; `x_after` is the new state.
  virtual void jumped(GeneratorId g, const State& x_after) = 0;
};

/// Unnormalized discrete target acted on by a generator set.
///
/// log_density may return -inf for states outside the support (truncation
/// windows, singular DPP restrictions); moves into such states get rate zero.
class Target {
 public:
  virtual ~Target() = default;

  virtual std::string kind() const = 0;
  const GeneratorSet& generators() const { return generators_; }

  virtual void apply_in_place(GeneratorId g, State& x) const = 0;
  State apply(GeneratorId g, const State& x) const;

  virtual double log_density(const State& x) const = 0;
  /// log pi(g x) - log pi(x); models override with O(local) updates.
  virtual double log_ratio(const State& x, GeneratorId g) const;

  /// Throws ValidationError for malformed states.
  virtual void validate(const State& x) const = 0;

  /// Target statistic reported in traces; `log_density` is the current value.
  virtual double statistic(const State& x, double log_density) const = 0;
  virtual std::string statistic_name() const = 0;
  /// Column names for thinned-sample CSVs.
  virtual std::vector<std::string> state_columns() const;
  virtual State default_initial_state() const = 0;

  /// Number of states with positive mass, if finite and representable.
  virtual std::optional<std::uint64_t> state_space_size() const { return std::nullopt; }
  /// Every state of the (possibly truncated) support, in a fixed order.
  virtual std::vector<State> enumerate_states() const;
  /// True when the enumerable support is a truncation of an infinite space.
  virtual bool truncated() const { return false; }
  /// Log-density of the mode when known in closed form.
  virtual std::optional<double> mode_log_density() const { return std::nullopt; }

  /// Generators whose log ratio can change after a jump with `g`.
  /// nullopt means all of them.
  virtual std::optional<std::vector<GeneratorId>> affected_by(GeneratorId g) const;
  virtual std::unique_ptr<RatioCache> make_cache(const State& x) const;

 protected:
  explicit Target(GeneratorSet generators) : generators_(std::move(generators)) {}

 private:
  GeneratorSet generators_;
};

/// Recomputes the ratios named by Target::affected_by after each jump.
class DependencyRatioCache : public RatioCache {
 public:
  DependencyRatioCache(const Target& target, const State& x);
  double log_ratio(GeneratorId g) const override;
  void jumped(GeneratorId g, const State& x_after) override;

 private:
  const Target& target_;
  std::vector<double> ratios_;  // indexed by generator position
};

/// (generator, neighbour) for every generator; size equals |generators|.
std::vector<std::pair<GeneratorId, State>> neighbourhood(const Target& target, const State& x);

}  // namespace jumpmc
