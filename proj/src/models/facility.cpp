#include "jumpmc/models/facility.hpp"

#include <algorithm>
#include <cmath>

#include "jumpmc/errors.hpp"
#include "jumpmc/rng.hpp"

namespace jumpmc {

namespace {

bool in_venue(const VenueSpec& v, double x, double y) {
  if (x < 0 || x > 1 || y < 0 || y > 1) return false;
  return !(x > v.notch_x && y > v.notch_y);
}

void check_params(const FacilityParams& p) {
  if (!(p.kappa > 0) || !(p.cost_install >= 0) || !(p.cost_capacity >= 0) || p.capacity < 0) {
    throw ConfigError("facility parameters must be non-negative with kappa > 0");
  }
}

// Does candidate i beat incumbent b (utility ub) for user j?
bool beats(const Eigen::MatrixXd& U, int i, int j, int b) {
  if (b < 0) return true;
  return U(i, j) > U(b, j) || (U(i, j) == U(b, j) && i < b);
}

}  // namespace

FacilityModel::FacilityModel(Eigen::MatrixX2d access, Eigen::MatrixX2d users, FacilityParams params)
    : Target(involution_generators(static_cast<std::size_t>(access.rows()))),
      params_(params),
      access_(std::move(access)),
      user_locs_(std::move(users)) {
  check_params(params_);
  if (access_.rows() < 1 || user_locs_.rows() < 1) throw ConfigError("facility model needs points and users");
  utility_.resize(access_.rows(), user_locs_.rows());
  for (Eigen::Index i = 0; i < access_.rows(); ++i) {
    for (Eigen::Index j = 0; j < user_locs_.rows(); ++j) {
      utility_(i, j) = std::exp(-params_.kappa * (user_locs_.row(j) - access_.row(i)).squaredNorm());
    }
  }
}

FacilityModel::FacilityModel(Eigen::MatrixXd utilities, FacilityParams params)
    : Target(involution_generators(static_cast<std::size_t>(utilities.rows()))),
      utility_(std::move(utilities)),
      params_(params) {
  check_params(params_);
  if (utility_.rows() < 1 || utility_.cols() < 1) throw ConfigError("facility utilities must be non-empty");
  if (!(utility_.array() > 0).all() || !(utility_.array() <= 1).all()) {
    throw ConfigError("facility utilities must lie in (0, 1]");
  }
}

FacilityModel FacilityModel::venue(const VenueSpec& v, FacilityParams params, std::uint64_t seed) {
  if (!(v.spacing > 0) || v.users < 1 || !(v.user_sd > 0)) throw ConfigError("invalid venue layout");
  if (!(params.kappa > 0)) params.kappa = v.users;
  std::vector<Eigen::RowVector2d> pts;
  for (double x = v.spacing / 2; x < 1; x += v.spacing) {
    for (double y = v.spacing / 2; y < 1; y += v.spacing) {
      if (in_venue(v, x, y)) pts.emplace_back(x, y);
    }
  }
  Eigen::MatrixX2d access(pts.size(), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) access.row(static_cast<Eigen::Index>(i)) = pts[i];

  // Centroid of the square-minus-notch.
  const double notch_area = (1 - v.notch_x) * (1 - v.notch_y);
  const double area = 1 - notch_area;
  const double cx = (0.5 - notch_area * (1 + v.notch_x) / 2) / area;
  const double cy = (0.5 - notch_area * (1 + v.notch_y) / 2) / area;

  Philox4x32 rng(seed);
  Eigen::MatrixX2d users(v.users, 2);
  for (int j = 0; j < v.users; ++j) {
    double x = 0, y = 0;
    do {
      x = cx + v.user_sd * rng.normal();
      y = cy + v.user_sd * rng.normal();
    } while (!in_venue(v, x, y));
    users(j, 0) = x;
    users(j, 1) = y;
  }
  return FacilityModel(std::move(access), std::move(users), params);
}

std::vector<int> FacilityModel::choices(const State& x) const {
  std::vector<int> best(users(), -1);
  for (int i = 0; i < access_points(); ++i) {
    if (!x[i]) continue;
    for (int j = 0; j < users(); ++j) {
      if (beats(utility_, i, j, best[j])) best[j] = i;
    }
  }
  return best;
}

double FacilityModel::log_density(const State& x) const {
  const auto best = choices(x);
  std::vector<int> load(access_points(), 0);
  double value = 0.0;
  for (int j = 0; j < users(); ++j) {
    if (best[j] < 0) continue;
    value += utility_(best[j], j);
    ++load[best[j]];
  }
  int open = 0;
  double over = 0.0;
  for (int i = 0; i < access_points(); ++i) {
    open += x[i];
    over += std::max(0, load[i] - params_.capacity);
  }
  return value - params_.cost_install * open - params_.cost_capacity * over;
}

void FacilityModel::validate(const State& x) const {
  if (static_cast<int>(x.size()) != access_points()) throw ValidationError("facility state has the wrong length");
  for (int b : x) {
    if (b != 0 && b != 1) throw ValidationError("facility indicators must be 0 or 1");
  }
}

double FacilityModel::statistic(const State& x, double) const {
  return static_cast<double>(std::count(x.begin(), x.end(), 1));
}

std::optional<std::uint64_t> FacilityModel::state_space_size() const {
  if (access_points() >= 63) return std::nullopt;
  return std::uint64_t{1} << access_points();
}

std::vector<State> FacilityModel::enumerate_states() const {
  return binary_states(static_cast<std::size_t>(access_points()), 0, 1, 20);
}

std::unique_ptr<RatioCache> FacilityModel::make_cache(const State& x) const {
  return std::make_unique<FacilityCache>(*this, x);
}

FacilityCache::FacilityCache(const FacilityModel& model, const State& x)
    : model_(model), x_(x), delta_load_(model.access_points(), 0) {
  rebuild();
}

void FacilityCache::rebuild() {
  const auto& U = model_.utilities();
  const int n = model_.users();
  best_.assign(n, -1);
  second_.assign(n, -1);
  load_.assign(model_.access_points(), 0);
  for (int i = 0; i < model_.access_points(); ++i) {
    if (!x_[i]) continue;
    for (int j = 0; j < n; ++j) {
      if (beats(U, i, j, best_[j])) {
        second_[j] = best_[j];
        best_[j] = i;
      } else if (beats(U, i, j, second_[j])) {
        second_[j] = i;
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    if (best_[j] >= 0) ++load_[best_[j]];
  }
}

double FacilityCache::penalty(int load) const {
  return model_.params().cost_capacity * std::max(0, load - model_.params().capacity);
}

double FacilityCache::log_ratio(GeneratorId g) const {
  const auto& U = model_.utilities();
  const int i = static_cast<int>(g);
  const bool adding = !x_[i];
  double dvalue = 0.0;
  std::vector<int> touched;
  auto move = [&](int from, int to) {
    for (int k : {from, to}) {
      if (k >= 0) {
        if (delta_load_[k] == 0) touched.push_back(k);
      }
    }
    if (from >= 0) --delta_load_[from];
    if (to >= 0) ++delta_load_[to];
  };
  for (int j = 0; j < model_.users(); ++j) {
    if (adding) {
      if (beats(U, i, j, best_[j])) {
        dvalue += U(i, j) - (best_[j] >= 0 ? U(best_[j], j) : 0.0);
        move(best_[j], i);
      }
    } else if (best_[j] == i) {
      const int next = second_[j];
      dvalue += (next >= 0 ? U(next, j) : 0.0) - U(i, j);
      move(i, next);
    }
  }
  double dpenalty = 0.0;
  for (int k : touched) {
    dpenalty += penalty(load_[k] + delta_load_[k]) - penalty(load_[k]);
    delta_load_[k] = 0;
  }
  const double dcount = adding ? 1.0 : -1.0;
  return dvalue - model_.params().cost_install * dcount - dpenalty;
}

void FacilityCache::jumped(GeneratorId g, const State& x_after) {
  x_[g] = x_after[g];
  rebuild();
}

}  // namespace jumpmc
