#include "jumpmc/models/spin.hpp"

#include <cmath>
#include <string>

#include "jumpmc/errors.hpp"
#include "jumpmc/rng.hpp"

namespace jumpmc {

namespace {

Eigen::VectorXd as_vector(const State& x) {
  Eigen::VectorXd v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = x[i];
  return v;
}

}  // namespace

SpinSystem::SpinSystem(Eigen::MatrixXd couplings, double field)
    : Target(involution_generators(static_cast<std::size_t>(couplings.rows()))),
      couplings_(std::move(couplings)),
      field_(field) {
  if (couplings_.rows() != couplings_.cols() || couplings_.rows() == 0) {
    throw ConfigError("coupling matrix must be square and non-empty");
  }
  for (Eigen::Index i = 0; i < couplings_.rows(); ++i) {
    if (couplings_(i, i) != 0.0) throw ConfigError("coupling matrix must have a zero diagonal");
    for (Eigen::Index j = 0; j < i; ++j) {
      if (couplings_(i, j) != couplings_(j, i)) throw ConfigError("coupling matrix must be symmetric");
    }
  }
}

SpinSystem SpinSystem::sherrington_kirkpatrick(int n, double beta, double field, std::uint64_t seed) {
  if (n < 1) throw ConfigError("spin count must be positive");
  Philox4x32 rng(seed);
  const double sd = beta / std::sqrt(2.0 * n);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      J(i, j) = J(j, i) = sd * rng.normal();
    }
  }
  return SpinSystem(std::move(J), field);
}

SpinSystem SpinSystem::ising_lattice(int rows, int cols, double coupling, double field) {
  if (rows < 1 || cols < 1) throw ConfigError("lattice dimensions must be positive");
  const int n = rows * cols;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int i = r * cols + c;
      if (c + 1 < cols) J(i, i + 1) = J(i + 1, i) = coupling;
      if (r + 1 < rows) J(i, i + cols) = J(i + cols, i) = coupling;
    }
  }
  return SpinSystem(std::move(J), field);
}

void SpinSystem::apply_in_place(GeneratorId g, State& x) const { x[g] = -x[g]; }

double SpinSystem::log_density(const State& x) const {
  const Eigen::VectorXd v = as_vector(x);
  return v.dot(couplings_ * v) / size() + field_ * v.sum();
}

double SpinSystem::log_ratio_from_field(int x_i, double local_field) const {
  // Flipping x_i changes (1/n) x'Jx by -(4/n) x_i f_i and h sum x by -2 h x_i.
  return -(4.0 / size()) * x_i * local_field - 2.0 * field_ * x_i;
}

double SpinSystem::log_ratio(const State& x, GeneratorId g) const {
  double f = 0.0;
  for (int j = 0; j < size(); ++j) f += couplings_(g, j) * x[j];
  return log_ratio_from_field(x[g], f);
}

void SpinSystem::validate(const State& x) const {
  if (static_cast<int>(x.size()) != size()) throw ValidationError("spin state has the wrong length");
  for (int s : x) {
    if (s != 1 && s != -1) throw ValidationError("spins must be +1 or -1");
  }
}

double SpinSystem::statistic(const State&, double log_density) const { return 0.0 - log_density; }

State SpinSystem::default_initial_state() const { return State(size(), 1); }

std::optional<std::uint64_t> SpinSystem::state_space_size() const {
  if (size() >= 63) return std::nullopt;
  return std::uint64_t{1} << size();
}

std::vector<State> SpinSystem::enumerate_states() const {
  return binary_states(static_cast<std::size_t>(size()), 1, -1);
}

std::unique_ptr<RatioCache> SpinSystem::make_cache(const State& x) const {
  return std::make_unique<SpinFieldCache>(*this, x);
}

SpinFieldCache::SpinFieldCache(const SpinSystem& model, const State& x)
    : model_(model), x_(x), fields_(model.couplings() * as_vector(x)) {}

double SpinFieldCache::log_ratio(GeneratorId g) const {
  return model_.log_ratio_from_field(x_[g], fields_[g]);
}

void SpinFieldCache::jumped(GeneratorId g, const State& x_after) {
  const int i = static_cast<int>(g);
  x_[i] = x_after[i];
  // x_i moved by 2 x_i(new); only column i of J contributes.
  fields_ += (2.0 * x_[i]) * model_.couplings().col(i);
}

double SpinFieldCache::check(const State& x, double tol) const {
  const Eigen::VectorXd fresh = model_.couplings() * as_vector(x);
  const double err = (fresh - fields_).cwiseAbs().maxCoeff();
  if (err > tol) {
    throw ConsistencyError("spin local-field cache drifted by " + std::to_string(err));
  }
  return err;
}

}  // namespace jumpmc
