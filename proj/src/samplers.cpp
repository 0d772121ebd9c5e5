#include "jumpmc/samplers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "jumpmc/errors.hpp"

namespace jumpmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string describe(const State& x) {
  std::ostringstream os;
  os << '(';
  const std::size_t shown = std::min<std::size_t>(x.size(), 16);
  for (std::size_t i = 0; i < shown; ++i) os << (i ? ", " : "") << x[i];
  if (shown < x.size()) os << ", ... [" << x.size() << " entries]";
  os << ')';
  return os.str();
}

double max_of(const std::vector<double>& v) {
  return v.empty() ? kNegInf : *std::max_element(v.begin(), v.end());
}

// exp(v - shift) elementwise, with exp(-inf) = 0.
std::vector<double> shifted_exp(const std::vector<double>& v, double shift) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::exp(v[i] - shift);
  return out;
}

bool close(double a, double b, double tol) {
  if (a == kNegInf || b == kNegInf) return a == b;
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

void check_pm1(const std::vector<int>& v, std::size_t expected, const char* what) {
  if (v.size() != expected) {
    throw ValidationError(std::string(what) + " has " + std::to_string(v.size()) + " entries, expected " +
                          std::to_string(expected));
  }
  for (int s : v) {
    if (s != 1 && s != -1) throw ValidationError(std::string(what) + " entries must be +1 or -1");
  }
}

void check_tau(int tau) {
  if (tau != 1 && tau != -1) throw ValidationError("tau must be +1 or -1");
}

}  // namespace

std::string to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::Zanella: return "zanella";
    case SamplerKind::Tabu: return "tabu";
    case SamplerKind::Dzz: return "dzz";
    case SamplerKind::Dcs: return "dcs";
  }
  return "?";
}

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::JumpX: return "jump_x";
    case EventKind::FlipTau: return "flip_tau";
    case EventKind::FlipTheta: return "flip_theta";
    case EventKind::VelocityJump: return "velocity_jump";
  }
  return "?";
}

SamplerKind sampler_kind_from_key(std::string_view key) {
  if (key == "zanella") return SamplerKind::Zanella;
  if (key == "tabu") return SamplerKind::Tabu;
  if (key == "dzz") return SamplerKind::Dzz;
  if (key == "dcs") return SamplerKind::Dcs;
  throw ConfigError("unknown sampler '" + std::string(key) + "' (expected zanella, tabu, dzz or dcs)");
}

EventKind event_kind_from_key(std::string_view key) {
  if (key == "jump_x") return EventKind::JumpX;
  if (key == "flip_tau") return EventKind::FlipTau;
  if (key == "flip_theta") return EventKind::FlipTheta;
  if (key == "velocity_jump") return EventKind::VelocityJump;
  throw ConfigError("unknown event kind '" + std::string(key) + "'");
}

// ---------------------------------------------------------------- Sampler

Sampler::Sampler(const Target& target, SamplerOptions options)
    : target_(target), options_(std::move(options)) {
  require_sampler_admissible(options_.g);
  if (target_.generators().empty()) throw ConfigError("target has no generators");
}

void Sampler::reset(SamplerState init) {
  target_.validate(init.x);
  validate_aux(init);
  const double ld = target_.log_density(init.x);
  if (!std::isfinite(ld)) {
    throw ValidationError("initial state " + describe(init.x) + " has zero target mass");
  }
  state_ = std::move(init);
  time_ = 0.0;
  log_density_ = ld;
  cache_ = target_.make_cache(state_.x);
  warnings_.clear();
  on_reset();
}

std::vector<double> Sampler::log_rates() const {
  const auto& gens = target_.generators();
  std::vector<double> out(gens.size());
  for (std::size_t k = 0; k < gens.size(); ++k) out[k] = log_rate(options_.g, cache_->log_ratio(gens[k].id));
  return out;
}

Event Sampler::commit(const Proposal& p) {
  if (p.kind == EventKind::JumpX) {
    const double ratio = cache_->log_ratio(p.generator);
    target_.apply_in_place(p.generator, state_.x);
    cache_->jumped(p.generator, state_.x);
    log_density_ += ratio;
  }
  apply_aux(p);
  time_ += p.wait;
  if (options_.verify_rates) verify();
  Event e;
  e.time = time_;
  e.kind = p.kind;
  if (p.kind != EventKind::FlipTau) e.generator = p.generator;
  e.log_density = log_density_;
  e.statistic = target_.statistic(state_.x, log_density_);
  return e;
}

void Sampler::verify() const {
  const double tol = options_.verify_tol;
  const double fresh = target_.log_density(state_.x);
  if (!close(log_density_, fresh, tol)) {
    throw ConsistencyError("running log density " + std::to_string(log_density_) + " differs from " +
                           std::to_string(fresh) + " at " + describe(state_.x));
  }
  for (const auto& g : target_.generators()) {
    const double there = target_.log_density(target_.apply(g.id, state_.x));
    const double direct = there == kNegInf ? kNegInf : there - fresh;
    const double cached = cache_->log_ratio(g.id);
    if (!close(cached, direct, tol)) {
      throw ConsistencyError("cached log ratio for generator " + std::to_string(g.id) + " is " +
                             std::to_string(cached) + ", from scratch " + std::to_string(direct) + " at " +
                             describe(state_.x));
    }
  }
}

// ---------------------------------------------------------------- Zanella

ZanellaSampler::ZanellaSampler(const Target& target, SamplerOptions options)
    : Sampler(target, std::move(options)) {}

SamplerState ZanellaSampler::initial_state(const State& x, Philox4x32&) const {
  SamplerState s;
  s.x = x;
  return s;
}

void ZanellaSampler::validate_aux(const SamplerState&) const {}

double ZanellaSampler::total_rate() const {
  const auto lr = log_rates();
  const double m = max_of(lr);
  if (m == kNegInf) return 0.0;
  const auto w = shifted_exp(lr, m);
  double s = 0.0;
  for (double v : w) s += v;
  return s * std::exp(m);
}

Proposal ZanellaSampler::draw(Philox4x32& rng) const {
  const auto lr = log_rates();
  const double m = max_of(lr);
  if (m == kNegInf) throw AbsorbingStateError("Zanella process has zero total rate at " + describe(state_.x));
  const auto w = shifted_exp(lr, m);
  double s = 0.0;
  for (double v : w) s += v;
  Proposal p;
  p.wait = rng.exponential() * std::exp(-(m + std::log(s)));
  p.index = rng.categorical(w, s);
  p.generator = target_.generators()[p.index].id;
  p.kind = EventKind::JumpX;
  return p;
}

// ---------------------------------------------------------------- Tabu

TabuSampler::TabuSampler(const Target& target, SamplerOptions options) : Sampler(target, std::move(options)) {
  for (const auto& g : target.generators()) {
    if (g.order != 2) {
      throw ConfigError("Tabu sampler requires order-2 generators; generator " + std::to_string(g.id) + " has " +
                        (g.order ? "order " + std::to_string(*g.order) : std::string("infinite order")));
    }
  }
}

SamplerState TabuSampler::initial_state(const State& x, Philox4x32&) const {
  SamplerState s;
  s.x = x;
  s.alpha.assign(target_.generators().size(), 1);
  s.tau = 1;
  return s;
}

void TabuSampler::validate_aux(const SamplerState& s) const {
  check_pm1(s.alpha, target_.generators().size(), "alpha");
  check_tau(s.tau);
}

namespace {

struct TabuSplit {
  std::vector<double> w;  // shifted rates, zeroed where unavailable
  double available = 0.0;
  double other = 0.0;
  double shift = kNegInf;
};

TabuSplit split_rates(const std::vector<double>& lr, const SamplerState& s) {
  TabuSplit out;
  out.shift = max_of(lr);
  if (out.shift == kNegInf) return out;
  out.w = shifted_exp(lr, out.shift);
  for (std::size_t k = 0; k < lr.size(); ++k) {
    if (s.alpha[k] == s.tau) {
      out.available += out.w[k];
    } else {
      out.other += out.w[k];
      out.w[k] = 0.0;
    }
  }
  return out;
}

}  // namespace

double TabuSampler::total_rate() const {
  const auto sp = split_rates(log_rates(), state_);
  if (sp.shift == kNegInf) return 0.0;
  return std::max(sp.available, sp.other) * std::exp(sp.shift);
}

double TabuSampler::jump_probability() const {
  const auto sp = split_rates(log_rates(), state_);
  const double big = std::max(sp.available, sp.other);
  if (!(big > 0)) throw AbsorbingStateError("Tabu sampler has zero total rate at " + describe(state_.x));
  return sp.available / big;
}

Proposal TabuSampler::draw(Philox4x32& rng) const {
  const auto sp = split_rates(log_rates(), state_);
  const double big = std::max(sp.available, sp.other);
  if (sp.shift == kNegInf || !(big > 0)) {
    throw AbsorbingStateError("Tabu sampler has zero total rate at " + describe(state_.x));
  }
  Proposal p;
  p.wait = rng.exponential() * std::exp(-(sp.shift + std::log(big)));
  if (rng.uniform() * big < sp.available) {
    p.kind = EventKind::JumpX;
    p.index = rng.categorical(sp.w, sp.available);
    p.generator = target_.generators()[p.index].id;
  } else {
    p.kind = EventKind::FlipTau;
  }
  return p;
}

void TabuSampler::apply_aux(const Proposal& p) {
  if (p.kind == EventKind::JumpX) {
    state_.alpha[p.index] = -state_.alpha[p.index];
  } else {
    state_.tau = -state_.tau;
  }
}

// ---------------------------------------------------------------- dZZ

DzzSampler::DzzSampler(const Target& target, SamplerOptions options) : Sampler(target, std::move(options)) {
  if (!target.generators().symmetric()) throw ConfigError("discrete Zig-Zag requires a symmetric generating set");
  reduced_ = reduced_set(target.generators());
  if (options_.weights.empty()) options_.weights.assign(reduced_.size(), 1.0);
  if (options_.weights.size() != reduced_.size()) {
    throw ConfigError("dZZ weights need one entry per reduced generator (" + std::to_string(reduced_.size()) + ")");
  }
  for (double w : options_.weights) {
    if (!(w > 0) || !std::isfinite(w)) throw ConfigError("dZZ weights must be positive and finite");
    log_weights_.push_back(std::log(w));
  }
}

SamplerState DzzSampler::initial_state(const State& x, Philox4x32&) const {
  SamplerState s;
  s.x = x;
  s.theta.assign(reduced_.size(), 1);
  return s;
}

void DzzSampler::validate_aux(const SamplerState& s) const { check_pm1(s.theta, reduced_.size(), "theta"); }

void DzzSampler::per_generator(const std::vector<double>& lr, std::vector<double>& log_total,
                               std::vector<double>& log_forward) const {
  const auto& gens = target_.generators();
  log_total.resize(reduced_.size());
  log_forward.resize(reduced_.size());
  for (std::size_t r = 0; r < reduced_.size(); ++r) {
    const Generator& g = reduced_[r];
    const bool up = state_.theta[r] > 0;
    const double fwd = lr[gens.position(up ? g.id : g.inverse_id)];
    const double bwd = lr[gens.position(up ? g.inverse_id : g.id)];
    log_forward[r] = fwd;
    const double m = std::max(fwd, bwd);
    log_total[r] = m == kNegInf ? kNegInf : log_weights_[r] + m;
  }
}

double DzzSampler::total_rate() const {
  std::vector<double> total, forward;
  per_generator(log_rates(), total, forward);
  const double m = max_of(total);
  if (m == kNegInf) return 0.0;
  double s = 0.0;
  for (double v : shifted_exp(total, m)) s += v;
  return s * std::exp(m);
}

Proposal DzzSampler::draw(Philox4x32& rng) const {
  std::vector<double> total, forward;
  per_generator(log_rates(), total, forward);
  const double m = max_of(total);
  if (m == kNegInf) throw AbsorbingStateError("discrete Zig-Zag has zero total rate at " + describe(state_.x));
  const auto w = shifted_exp(total, m);
  double s = 0.0;
  for (double v : w) s += v;
  Proposal p;
  p.wait = rng.exponential() * std::exp(-(m + std::log(s)));
  p.index = rng.categorical(w, s);
  const Generator& g = reduced_[p.index];
  // Jump with probability lambda(theta) / max(lambda(theta), lambda(-theta)).
  const double jump_log_prob = forward[p.index] - (total[p.index] - log_weights_[p.index]);
  if (std::log(rng.uniform()) < jump_log_prob) {
    p.kind = EventKind::JumpX;
    p.generator = state_.theta[p.index] > 0 ? g.id : g.inverse_id;
  } else {
    p.kind = EventKind::FlipTheta;
    p.generator = g.id;
  }
  return p;
}

void DzzSampler::apply_aux(const Proposal& p) {
  if (p.kind == EventKind::FlipTheta) state_.theta[p.index] = -state_.theta[p.index];
}

// ---------------------------------------------------------------- dCS

DcsSampler::DcsSampler(const Target& target, SamplerOptions options) : Sampler(target, std::move(options)) {
  const auto& gens = target.generators();
  if (!gens.symmetric()) throw ConfigError("discrete Coordinate Sampler requires a symmetric generating set");
  psi_ = options_.psi.empty() ? std::vector<double>(gens.size(), 1.0) : options_.psi;
  if (psi_.size() != gens.size()) {
    throw ConfigError("dCS psi needs one entry per generator (" + std::to_string(gens.size()) + ")");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < gens.size(); ++k) {
    if (!(psi_[k] >= 0) || !std::isfinite(psi_[k])) throw ConfigError("dCS psi entries must be non-negative");
    const double inv = psi_[gens.position(gens[k].inverse_id)];
    if (std::abs(psi_[k] - inv) > 1e-12 * std::max(psi_[k], inv)) {
      throw ConfigError("dCS psi must satisfy psi(v) = psi(v^-1); generator " + std::to_string(gens[k].id) +
                        " violates it");
    }
    total += psi_[k];
  }
  if (!(total > 0)) throw ConfigError("dCS psi has zero total mass");
  for (double& v : psi_) v /= total;
}

SamplerState DcsSampler::initial_state(const State& x, Philox4x32& rng) const {
  SamplerState s;
  s.x = x;
  s.velocity = target_.generators()[rng.categorical(psi_)].id;
  s.tau = 1;
  return s;
}

void DcsSampler::validate_aux(const SamplerState& s) const {
  check_tau(s.tau);
  if (!target_.generators().contains(s.velocity)) {
    throw ValidationError("velocity " + std::to_string(s.velocity) + " is not a generator");
  }
}

void DcsSampler::on_reset() {
  const auto lr = log_rates();
  const auto& gens = target_.generators();
  for (std::size_t k = 0; k < gens.size(); ++k) {
    if (!close(lr[k], lr[gens.position(gens[k].inverse_id)], 1e-12)) return;
  }
  warnings_.push_back("dCS initial state " + describe(state_.x) +
                      " is a symmetric point: delta(x, v, tau) = delta(x, v, -tau) for every v, so the velocity "
                      "never changes there");
}

double DcsSampler::total_rate() const {
  const auto lr = log_rates();
  const auto& gens = target_.generators();
  const Generator& v = gens.by_id(state_.velocity);
  const double a = lr[gens.position(v.id)];
  const double b = lr[gens.position(v.inverse_id)];
  const double m = std::max(a, b);
  return m == kNegInf ? 0.0 : std::exp(m);
}

Proposal DcsSampler::draw(Philox4x32& rng) const {
  const auto lr = log_rates();
  const auto& gens = target_.generators();
  const Generator& v = gens.by_id(state_.velocity);
  const bool up = state_.tau > 0;
  const GeneratorId fwd_id = up ? v.id : v.inverse_id;
  const double fwd = lr[gens.position(fwd_id)];
  const double bwd = lr[gens.position(up ? v.inverse_id : v.id)];
  const double m = std::max(fwd, bwd);
  if (m == kNegInf) {
    throw DegenerateVelocityError("dCS velocity " + std::to_string(v.id) + " has Delta(x, v) = 0 at " +
                                  describe(state_.x));
  }
  Proposal p;
  p.wait = rng.exponential() * std::exp(-m);
  if (fwd == m || std::log(rng.uniform()) < fwd - m) {
    p.kind = EventKind::JumpX;
    p.generator = fwd_id;
    return p;
  }
  // New velocity w with probability proportional to psi(w) rho(x, w, tau),
  // rho = [delta(x, w, -tau) - delta(x, w, tau)]_+, in the log domain.
  std::vector<double> logw(gens.size(), kNegInf);
  for (std::size_t k = 0; k < gens.size(); ++k) {
    if (psi_[k] == 0) continue;
    const Generator& w = gens[k];
    const double lo = lr[gens.position(up ? w.id : w.inverse_id)];
    const double hi = lr[gens.position(up ? w.inverse_id : w.id)];
    if (!(hi > lo)) continue;
    const double log_rho = lo == kNegInf ? hi : hi + std::log1p(-std::exp(lo - hi));
    logw[k] = std::log(psi_[k]) + log_rho;
  }
  const double top = max_of(logw);
  if (top == kNegInf) {
    throw ConsistencyError("dCS velocity refresh has zero normalizer at " + describe(state_.x));
  }
  const auto w = shifted_exp(logw, top);
  p.kind = EventKind::VelocityJump;
  p.index = rng.categorical(w);
  p.generator = gens[p.index].id;
  return p;
}

void DcsSampler::apply_aux(const Proposal& p) {
  if (p.kind == EventKind::VelocityJump) {
    state_.velocity = p.generator;
    state_.tau = -state_.tau;
  }
}

std::unique_ptr<Sampler> make_sampler(SamplerKind kind, const Target& target, SamplerOptions options) {
  switch (kind) {
    case SamplerKind::Zanella: return std::make_unique<ZanellaSampler>(target, std::move(options));
    case SamplerKind::Tabu: return std::make_unique<TabuSampler>(target, std::move(options));
    case SamplerKind::Dzz: return std::make_unique<DzzSampler>(target, std::move(options));
    case SamplerKind::Dcs: return std::make_unique<DcsSampler>(target, std::move(options));
  }
  throw ConfigError("unknown sampler kind");
}

// ---------------------------------------------------------------- run

std::uint64_t thinning_intervals(double horizon, double thinning) {
  if (!(horizon > 0) || !(thinning > 0) || !std::isfinite(horizon) || !std::isfinite(thinning)) {
    throw ConfigError("horizon and thinning interval must be positive and finite");
  }
  const double ratio = horizon / thinning;
  const double k = std::round(ratio);
  if (k < 1 || std::abs(ratio - k) > 1e-9 * std::max(1.0, ratio)) {
    throw ConfigError("horizon / thinning = " + std::to_string(ratio) + " is not a positive integer");
  }
  return static_cast<std::uint64_t>(k);
}

RunResult run(Sampler& sampler, const SamplerState& init, const RunOptions& options, Philox4x32& rng) {
  const std::uint64_t intervals = thinning_intervals(options.horizon, options.thinning);
  const auto start = std::chrono::steady_clock::now();
  sampler.reset(init);
  const Target& target = sampler.target();

  RunResult out;
  out.trace.sampler = sampler.kind();
  out.trace.initial_state = init.x;
  out.trace.initial_log_density = sampler.log_density();
  out.trace.initial_statistic = target.statistic(init.x, sampler.log_density());

  std::uint64_t next = 0;
  auto thin_time = [&](std::uint64_t i) {
    return i == intervals ? options.horizon : static_cast<double>(i) * options.thinning;
  };
  auto record = [&] {
    out.thin_times.push_back(thin_time(next));
    out.thinned.push_back(sampler.state().x);
    out.thinned_statistic.push_back(target.statistic(sampler.state().x, sampler.log_density()));
    ++next;
  };

  while (true) {
    if (options.max_events && out.trace.events.size() >= *options.max_events) {
      out.stopped_early = true;
      break;
    }
    const Proposal p = sampler.draw(rng);
    const double t_next = sampler.time() + p.wait;
    while (next <= intervals && thin_time(next) < t_next) record();
    if (t_next > options.horizon) break;
    out.trace.events.push_back(sampler.commit(p));
  }
  if (!out.stopped_early) {
    while (next <= intervals) record();
  }
  out.trace.final_state = sampler.state().x;
  out.trace.horizon = out.stopped_early ? sampler.time() : options.horizon;
  out.warnings = sampler.warnings();
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<RunResult> run_chains(SamplerKind kind, const Target& target, const SamplerOptions& options,
                                  const State& x0, const RunOptions& run_options, std::uint64_t seed,
                                  int chains) {
  if (chains < 1) throw ConfigError("chain count must be positive");
  std::vector<std::future<RunResult>> futures;
  for (int c = 0; c < chains; ++c) {
    futures.push_back(std::async(std::launch::async, [&, c] {
      auto sampler = make_sampler(kind, target, options);
      Philox4x32 rng(seed, static_cast<std::uint64_t>(c));
      const SamplerState init = sampler->initial_state(x0, rng);
      return run(*sampler, init, run_options, rng);
    }));
  }
  std::vector<RunResult> out;
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

}  // namespace jumpmc
