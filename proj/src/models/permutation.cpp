#include "jumpmc/models/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "jumpmc/errors.hpp"
#include "jumpmc/rng.hpp"

namespace jumpmc {

namespace {

GeneratorSet transposition_generators(int n) {
  return involution_generators(static_cast<std::size_t>(n) * (n - 1) / 2);
}

}  // namespace

std::vector<int> max_weight_assignment(const Eigen::MatrixXd& score) {
  const int n = static_cast<int>(score.rows());
  if (score.cols() != n) throw ConfigError("assignment needs a square score matrix");
  const double inf = std::numeric_limits<double>::infinity();
  // Potentials u (rows) and v (columns) for the min-cost problem on -score;
  // index 0 is a virtual column/row.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> row_of(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    row_of[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = row_of[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -score(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of[j0] != 0);
    do {
      const int j1 = way[j0];
      row_of[j0] = row_of[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> col(n);
  for (int j = 1; j <= n; ++j) col[row_of[j] - 1] = j - 1;
  return col;
}

PermutationModel::PermutationModel(Eigen::MatrixXd weights)
    : Target(transposition_generators(static_cast<int>(weights.rows()))) {
  const auto n = weights.rows();
  if (n < 2 || weights.cols() != n) throw ConfigError("permutation weights must be square with n >= 2");
  if (!(weights.array() > 0).all() || !weights.allFinite()) {
    throw ConfigError("permutation weights must be positive and finite");
  }
  log_w_ = weights.array().log();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs_.emplace_back(i, j);
  }
  mode_ = max_weight_assignment(log_w_);
}

PermutationModel PermutationModel::lognormal(int n, double sigma2, std::uint64_t seed) {
  if (n < 2 || !(sigma2 > 0)) throw ConfigError("lognormal permutation model needs n >= 2 and sigma2 > 0");
  Philox4x32 rng(seed);
  const double sd = std::sqrt(sigma2);
  Eigen::MatrixXd w(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) w(i, j) = std::exp(sd * rng.normal());
  }
  return PermutationModel(std::move(w));
}

GeneratorId PermutationModel::transposition_id(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= size() || i == j) throw ConfigError("transposition indices out of range");
  const int n = size();
  return static_cast<GeneratorId>(i * n - i * (i + 1) / 2 + (j - i - 1));
}

void PermutationModel::apply_in_place(GeneratorId g, State& x) const {
  const auto [i, j] = pairs_[g];
  std::swap(x[i], x[j]);
}

double PermutationModel::log_density(const State& x) const {
  double s = 0.0;
  for (int i = 0; i < size(); ++i) s += log_w_(i, x[i]);
  return s;
}

double PermutationModel::log_ratio(const State& x, GeneratorId g) const {
  const auto [i, j] = pairs_[g];
  return log_w_(i, x[j]) + log_w_(j, x[i]) - log_w_(i, x[i]) - log_w_(j, x[j]);
}

void PermutationModel::validate(const State& x) const {
  if (static_cast<int>(x.size()) != size()) throw ValidationError("permutation has the wrong length");
  std::vector<char> seen(size(), 0);
  for (int v : x) {
    if (v < 0 || v >= size() || seen[v]) throw ValidationError("state is not a permutation");
    seen[v] = 1;
  }
}

double PermutationModel::statistic(const State& x, double) const {
  int d = 0;
  for (int i = 0; i < size(); ++i) d += x[i] != mode_[i];
  return d;
}

State PermutationModel::default_initial_state() const {
  State x(size());
  std::iota(x.begin(), x.end(), 0);
  return x;
}

std::optional<std::uint64_t> PermutationModel::state_space_size() const {
  if (size() > 20) return std::nullopt;
  std::uint64_t f = 1;
  for (int k = 2; k <= size(); ++k) f *= static_cast<std::uint64_t>(k);
  return f;
}

std::vector<State> PermutationModel::enumerate_states() const {
  if (size() > 9) throw SizeOverflowError(std::to_string(size()) + "! permutations exceed the enumeration cap");
  std::vector<State> out;
  State x = default_initial_state();
  do {
    out.push_back(x);
  } while (std::next_permutation(x.begin(), x.end()));
  return out;
}

std::optional<std::vector<GeneratorId>> PermutationModel::affected_by(GeneratorId g) const {
  const auto [a, b] = pairs_[g];
  std::vector<GeneratorId> out;
  for (int k = 0; k < size(); ++k) {
    if (k != a) out.push_back(transposition_id(a, k));
    if (k != b && k != a) out.push_back(transposition_id(b, k));
  }
  return out;
}

}  // namespace jumpmc
