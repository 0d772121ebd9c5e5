#include "jumpmc/models/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "jumpmc/errors.hpp"

namespace jumpmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Eigen::VectorXd as_vector(const State& z) {
  Eigen::VectorXd v(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) v[i] = z[i];
  return v;
}

std::size_t gauge_edge_count(int nx, int ny) {
  if (nx < 2 || ny < 2) throw ConfigError("gauge lattice needs at least 2x2 vertices");
  return static_cast<std::size_t>((nx - 1) * ny + nx * (ny - 1));
}

}  // namespace

LatticeGaussianModel::LatticeGaussianModel(Eigen::MatrixXd basis, double s, std::optional<Window> window)
    : Target(signed_step_generators(static_cast<std::size_t>(basis.rows()), std::nullopt)),
      basis_(std::move(basis)),
      s_(s),
      window_(window) {
  if (basis_.rows() < 1 || basis_.rows() != basis_.cols()) throw ConfigError("lattice basis must be square");
  if (!(s_ > 0)) throw ConfigError("lattice Gaussian parameter s must be positive");
  if (std::abs(basis_.determinant()) < 1e-12) throw ConfigError("lattice basis is singular");
  if (window_ && window_->lo > window_->hi) throw ConfigError("empty truncation window");
  gram_ = basis_.transpose() * basis_;
}

LatticeGaussianModel LatticeGaussianModel::identity(int d, double s, std::optional<Window> window) {
  if (d < 1) throw ConfigError("lattice dimension must be positive");
  return LatticeGaussianModel(Eigen::MatrixXd::Identity(d, d), s, window);
}

void LatticeGaussianModel::apply_in_place(GeneratorId g, State& x) const { x[g / 2] += g % 2 ? -1 : 1; }

bool LatticeGaussianModel::inside(const State& z) const {
  if (!window_) return true;
  return std::all_of(z.begin(), z.end(), [&](int v) { return v >= window_->lo && v <= window_->hi; });
}

double LatticeGaussianModel::log_density(const State& x) const {
  if (!inside(x)) return kNegInf;
  return -std::numbers::pi * (basis_ * as_vector(x)).squaredNorm() / (s_ * s_);
}

double LatticeGaussianModel::log_ratio(const State& x, GeneratorId g) const {
  const int i = static_cast<int>(g / 2);
  const double step = g % 2 ? -1.0 : 1.0;
  if (window_) {
    const int next = x[i] + static_cast<int>(step);
    if (next < window_->lo || next > window_->hi) return kNegInf;
  }
  // |B(z + d e_i)|^2 - |Bz|^2 = 2 d (B'B z)_i + (B'B)_ii.
  const double gz = gram_.row(i).dot(as_vector(x));
  return -std::numbers::pi * (2.0 * step * gz + gram_(i, i)) / (s_ * s_);
}

void LatticeGaussianModel::validate(const State& x) const {
  if (static_cast<int>(x.size()) != dimension()) throw ValidationError("lattice state has the wrong dimension");
  if (!inside(x)) throw ValidationError("lattice state lies outside the truncation window");
}

double LatticeGaussianModel::statistic(const State& x, double) const {
  return (basis_ * as_vector(x)).norm();
}

std::vector<std::string> LatticeGaussianModel::state_columns() const {
  std::vector<std::string> out;
  for (int i = 0; i < dimension(); ++i) out.push_back("z" + std::to_string(i));
  return out;
}

std::optional<std::uint64_t> LatticeGaussianModel::state_space_size() const {
  if (!window_) return std::nullopt;
  const auto side = static_cast<std::uint64_t>(window_->hi - window_->lo + 1);
  std::uint64_t n = 1;
  for (int i = 0; i < dimension(); ++i) {
    if (n > std::numeric_limits<std::uint64_t>::max() / side) return std::nullopt;
    n *= side;
  }
  return n;
}

std::vector<State> LatticeGaussianModel::enumerate_states() const {
  if (!window_) throw SizeOverflowError("lattice Gaussian without a truncation window is not enumerable");
  const auto count = state_space_size();
  if (!count || *count > 10'000'000) throw SizeOverflowError("lattice window too large to enumerate");
  std::vector<State> out;
  State z(dimension(), window_->lo);
  for (std::uint64_t k = 0; k < *count; ++k) {
    out.push_back(z);
    for (int i = 0; i < dimension(); ++i) {
      if (++z[i] <= window_->hi) break;
      z[i] = window_->lo;
    }
  }
  return out;
}

GaugeModel::GaugeModel(int nx, int ny, int p, double beta)
    : Target(signed_step_generators(gauge_edge_count(nx, ny), p)),
      nx_(nx),
      ny_(ny),
      p_(p),
      beta_(beta) {
  if (p < 3) throw ConfigError("gauge modulus must be at least 3");
  if (!(beta > 0)) throw ConfigError("gauge beta must be positive");
  edge_plaquettes_.resize((nx - 1) * ny + nx * (ny - 1));
  for (int y = 0; y + 1 < ny; ++y) {
    for (int x = 0; x + 1 < nx; ++x) {
      const int k = static_cast<int>(plaquette_edges_.size());
      plaquette_edges_.push_back({{horizontal_edge(x, y), 1},
                                  {vertical_edge(x + 1, y), 1},
                                  {horizontal_edge(x, y + 1), -1},
                                  {vertical_edge(x, y), -1}});
      for (const auto& [e, sign] : plaquette_edges_.back()) edge_plaquettes_[e].push_back(k);
    }
  }
  affected_.resize(2 * edge_plaquettes_.size());
  for (int e = 0; e < edges(); ++e) {
    std::set<GeneratorId> gens;
    for (int k : edge_plaquettes_[e]) {
      for (const auto& [f, sign] : plaquette_edges_[k]) {
        gens.insert(2 * f);
        gens.insert(2 * f + 1);
      }
    }
    gens.insert(2 * e);
    gens.insert(2 * e + 1);
    affected_[2 * e].assign(gens.begin(), gens.end());
    affected_[2 * e + 1] = affected_[2 * e];
  }
}

int GaugeModel::horizontal_edge(int x, int y) const { return y * (nx_ - 1) + x; }

int GaugeModel::vertical_edge(int x, int y) const { return (nx_ - 1) * ny_ + y * nx_ + x; }

double GaugeModel::potential(const State& x, int k) const {
  long sum = 0;
  for (const auto& [e, sign] : plaquette_edges_[k]) sum += sign * x[e];
  const long r = ((sum % p_) + p_) % p_;
  return 1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(r) / p_);
}

double GaugeModel::angle(const State& x, int e) const { return 2.0 * std::numbers::pi * x[e] / p_; }

void GaugeModel::apply_in_place(GeneratorId g, State& x) const {
  const int e = static_cast<int>(g / 2);
  x[e] = g % 2 ? (x[e] + p_ - 1) % p_ : (x[e] + 1) % p_;
}

double GaugeModel::log_density(const State& x) const {
  double action = 0.0;
  for (int k = 0; k < plaquettes(); ++k) action += potential(x, k);
  return -beta_ * action;
}

double GaugeModel::log_ratio(const State& x, GeneratorId g) const {
  const int e = static_cast<int>(g / 2);
  State y = x;
  apply_in_place(g, y);
  double delta = 0.0;
  for (int k : edge_plaquettes_[e]) delta += potential(y, k) - potential(x, k);
  return -beta_ * delta;
}

void GaugeModel::validate(const State& x) const {
  if (static_cast<int>(x.size()) != edges()) throw ValidationError("gauge state has the wrong edge count");
  for (int v : x) {
    if (v < 0 || v >= p_) throw ValidationError("gauge edge values must lie in [0, p)");
  }
}

double GaugeModel::statistic(const State&, double log_density) const { return 0.0 - log_density / beta_; }

std::optional<std::uint64_t> GaugeModel::state_space_size() const {
  std::uint64_t n = 1;
  for (int e = 0; e < edges(); ++e) {
    if (n > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(p_)) return std::nullopt;
    n *= static_cast<std::uint64_t>(p_);
  }
  return n;
}

std::vector<State> GaugeModel::enumerate_states() const {
  const auto count = state_space_size();
  if (!count || *count > 10'000'000) throw SizeOverflowError("gauge configuration space too large to enumerate");
  std::vector<State> out;
  State x(edges(), 0);
  for (std::uint64_t k = 0; k < *count; ++k) {
    out.push_back(x);
    for (int e = 0; e < edges(); ++e) {
      if (++x[e] < p_) break;
      x[e] = 0;
    }
  }
  return out;
}

std::optional<std::vector<GeneratorId>> GaugeModel::affected_by(GeneratorId g) const { return affected_[g]; }

PathModel::PathModel(std::vector<double> weights) : Target(signed_step_generators(1, std::nullopt)) {
  if (weights.empty()) throw ConfigError("path model needs at least one state");
  for (double w : weights) {
    if (!(w > 0) || !std::isfinite(w)) throw ConfigError("path weights must be positive and finite");
    log_w_.push_back(std::log(w));
  }
}

PathModel PathModel::beta_binomial(int states, double a, double b) {
  if (states < 1 || !(a > 0) || !(b > 0)) throw ConfigError("invalid beta-binomial parameters");
  const int n = states - 1;
  std::vector<double> log_p(states);
  for (int k = 0; k <= n; ++k) {
    log_p[k] = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + std::lgamma(k + a) +
               std::lgamma(n - k + b) - std::lgamma(n + a + b) - (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  }
  const double top = *std::max_element(log_p.begin(), log_p.end());
  std::vector<double> w;
  for (double lp : log_p) w.push_back(std::exp(lp - top));
  return PathModel(std::move(w));
}

std::vector<double> PathModel::probabilities() const {
  const double top = *std::max_element(log_w_.begin(), log_w_.end());
  std::vector<double> p;
  double z = 0.0;
  for (double lw : log_w_) z += p.emplace_back(std::exp(lw - top));
  for (double& v : p) v /= z;
  return p;
}

double PathModel::log_density(const State& x) const {
  if (x[0] < 0 || x[0] >= states()) return kNegInf;
  return log_w_[x[0]];
}

void PathModel::validate(const State& x) const {
  if (x.size() != 1) throw ValidationError("path state is a single position");
  if (x[0] < 0 || x[0] >= states()) throw ValidationError("path position out of range");
}

std::vector<State> PathModel::enumerate_states() const {
  std::vector<State> out;
  for (int k = 0; k < states(); ++k) out.push_back(State{k});
  return out;
}

}  // namespace jumpmc
