#include "jumpmc/statespace.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "jumpmc/errors.hpp"

namespace jumpmc {

GeneratorSet::GeneratorSet(std::vector<Generator> generators) : generators_(std::move(generators)) {
  GeneratorId max_id = 0;
  for (const auto& g : generators_) {
    max_id = std::max({max_id, g.id, g.inverse_id});
    if (g.order && *g.order < 1) throw ConfigError("generator order must be positive");
    if (g.order == 2 && !g.involution()) {
      throw ConfigError("generator " + std::to_string(g.id) + " has order 2 but a distinct inverse");
    }
  }
  position_.assign(generators_.empty() ? 0 : max_id + 1, -1);
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    auto& slot = position_[generators_[i].id];
    if (slot != -1) throw ConfigError("duplicate generator id " + std::to_string(generators_[i].id));
    slot = static_cast<std::int64_t>(i);
  }
  for (const auto& g : generators_) {
    if (!contains(g.inverse_id)) {
      symmetric_ = false;
      continue;
    }
    const Generator& inv = by_id(g.inverse_id);
    if (inv.inverse_id != g.id) {
      throw ConfigError("inverse of inverse of generator " + std::to_string(g.id) + " is not itself");
    }
  }
}

bool GeneratorSet::contains(GeneratorId id) const {
  return id < position_.size() && position_[id] >= 0;
}

std::size_t GeneratorSet::position(GeneratorId id) const {
  if (!contains(id)) throw ConfigError("generator id " + std::to_string(id) + " is not in the set");
  return static_cast<std::size_t>(position_[id]);
}

bool GeneratorSet::reduced() const {
  return std::all_of(generators_.begin(), generators_.end(), [&](const Generator& g) {
    return g.involution() || !contains(g.inverse_id);
  });
}

bool GeneratorSet::all_order_two() const {
  return std::all_of(generators_.begin(), generators_.end(),
                     [](const Generator& g) { return g.order == 2; });
}

GeneratorSet involution_generators(std::size_t n) {
  std::vector<Generator> gens;
  gens.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = static_cast<GeneratorId>(i);
    gens.push_back({id, id, 2});
  }
  return GeneratorSet(std::move(gens));
}

GeneratorSet signed_step_generators(std::size_t d, std::optional<int> order) {
  std::vector<Generator> gens;
  gens.reserve(2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    const auto up = static_cast<GeneratorId>(2 * i);
    gens.push_back({up, up + 1, order});
    gens.push_back({up + 1, up, order});
  }
  return GeneratorSet(std::move(gens));
}

std::vector<State> binary_states(std::size_t n, int off, int on, std::size_t max_bits) {
  if (n > max_bits) {
    throw SizeOverflowError("2^" + std::to_string(n) + " states exceed the enumeration cap of 2^" +
                            std::to_string(max_bits));
  }
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<State> out;
  out.reserve(count);
  for (std::uint64_t code = 0; code < count; ++code) {
    State x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (code >> i) & 1 ? on : off;
    out.push_back(std::move(x));
  }
  return out;
}

Generator inverse(const GeneratorSet& full, const Generator& g) { return full.by_id(g.inverse_id); }

GeneratorSet reduced_set(const GeneratorSet& full) {
  if (!full.symmetric()) throw ConfigError("reduced set requires a symmetric generating set");
  std::vector<Generator> kept;
  for (const auto& g : full) {
    if (g.id <= g.inverse_id) kept.push_back(g);
  }
  return GeneratorSet(std::move(kept));
}

State Target::apply(GeneratorId g, const State& x) const {
  State y = x;
  apply_in_place(g, y);
  return y;
}

double Target::log_ratio(const State& x, GeneratorId g) const {
  const double here = log_density(x);
  const double there = log_density(apply(g, x));
  if (there == -std::numeric_limits<double>::infinity()) return there;
  return there - here;
}

std::vector<std::string> Target::state_columns() const {
  const State x = default_initial_state();
  std::vector<std::string> cols;
  cols.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) cols.push_back("x" + std::to_string(i));
  return cols;
}

std::vector<State> Target::enumerate_states() const {
  throw SizeOverflowError(kind() + " state space is not enumerable");
}

std::optional<std::vector<GeneratorId>> Target::affected_by(GeneratorId) const {
  return std::nullopt;
}

std::unique_ptr<RatioCache> Target::make_cache(const State& x) const {
  return std::make_unique<DependencyRatioCache>(*this, x);
}

DependencyRatioCache::DependencyRatioCache(const Target& target, const State& x)
    : target_(target), ratios_(target.generators().size()) {
  const auto& gens = target_.generators();
  for (std::size_t i = 0; i < gens.size(); ++i) ratios_[i] = target_.log_ratio(x, gens[i].id);
}

double DependencyRatioCache::log_ratio(GeneratorId g) const {
  return ratios_[target_.generators().position(g)];
}

void DependencyRatioCache::jumped(GeneratorId g, const State& x_after) {
  const auto& gens = target_.generators();
  if (auto affected = target_.affected_by(g)) {
    for (GeneratorId h : *affected) ratios_[gens.position(h)] = target_.log_ratio(x_after, h);
  } else {
    for (std::size_t i = 0; i < gens.size(); ++i) ratios_[i] = target_.log_ratio(x_after, gens[i].id);
  }
}

std::vector<std::pair<GeneratorId, State>> neighbourhood(const Target& target, const State& x) {
  std::vector<std::pair<GeneratorId, State>> out;
  out.reserve(target.generators().size());
  for (const auto& g : target.generators()) out.emplace_back(g.id, target.apply(g.id, x));
  return out;
}

}  // namespace jumpmc
