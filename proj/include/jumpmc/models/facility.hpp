#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "jumpmc/statespace.hpp"

namespace jumpmc {

struct FacilityParams {
  double kappa = 100.0;        // signal decay in exp(-kappa |u - v|^2)
  double cost_install = 1.0;   // per open access point
  double cost_capacity = 1.0;  // per user above capacity
  int capacity = 5;
};

/// Layout of the synthetic venue: the unit square with the rectangle
/// [notch_x, 1] x [notch_y, 1] cut out. Access points sit on a grid of the
/// given spacing; users are Gaussian around the centroid, redrawn until they
/// land inside the venue.
struct VenueSpec {
  double spacing = 0.125;
  double notch_x = 0.6;
  double notch_y = 0.7;
  int users = 100;
  double user_sd = 0.25;
};

/// Capacity-constrained facility location over subsets S of access points:
///
///   log pi(S) = sum_j max_{i in S} U_ij - cost_install |S|
///               - cost_capacity sum_i max(0, B(S, i) - capacity)
///
/// where user j picks the open point with largest utility (lowest index on
/// ties) and B(S, i) counts the users picking i. An empty S scores 0.
class FacilityModel : public Target {
 public:
  /// `access` and `users` hold one 2-D point per row.
  FacilityModel(Eigen::MatrixX2d access, Eigen::MatrixX2d users, FacilityParams params);
  /// Utilities given directly (rows = access points, cols = users).
  FacilityModel(Eigen::MatrixXd utilities, FacilityParams params);

  /// Venue layout drawn from `seed`; kappa defaults to the user count when
  /// `params.kappa` is not positive.
  static FacilityModel venue(const VenueSpec& venue, FacilityParams params, std::uint64_t seed);

  int access_points() const { return static_cast<int>(utility_.rows()); }
  int users() const { return static_cast<int>(utility_.cols()); }
  const Eigen::MatrixXd& utilities() const { return utility_; }
  const FacilityParams& params() const { return params_; }
  const Eigen::MatrixX2d& access_locations() const { return access_; }
  const Eigen::MatrixX2d& user_locations() const { return user_locs_; }

  std::string kind() const override { return "facility"; }
  void apply_in_place(GeneratorId g, State& x) const override { x[g] = 1 - x[g]; }
  double log_density(const State& x) const override;
  void validate(const State& x) const override;
  /// Number of open access points.
  double statistic(const State& x, double log_density) const override;
  std::string statistic_name() const override { return "sensor_count"; }
  State default_initial_state() const override { return State(access_points(), 0); }
  std::optional<std::uint64_t> state_space_size() const override;
  std::vector<State> enumerate_states() const override;
  std::unique_ptr<RatioCache> make_cache(const State& x) const override;

  /// Per-user chosen point (-1 when S is empty) under the tie rule.
  std::vector<int> choices(const State& x) const;

 private:
  Eigen::MatrixXd utility_;
  FacilityParams params_;
  Eigen::MatrixX2d access_;
  Eigen::MatrixX2d user_locs_;
};

/// Best and runner-up open point per user; each toggle ratio costs O(users).
class FacilityCache : public RatioCache {
 public:
  FacilityCache(const FacilityModel& model, const State& x);
  double log_ratio(GeneratorId g) const override;
  void jumped(GeneratorId g, const State& x_after) override;

 private:
  void rebuild();
  double penalty(int load) const;

  const FacilityModel& model_;
  State x_;
  std::vector<int> best_, second_;
  std::vector<int> load_;
  mutable std::vector<int> delta_load_;
};

}  // namespace jumpmc
