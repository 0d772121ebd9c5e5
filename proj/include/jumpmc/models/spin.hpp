#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "jumpmc/statespace.hpp"

namespace jumpmc {

/// Binary spin system with pairwise couplings and a uniform external field:
///
///   log pi(x) = (1/n) sum_ij J_ij x_i x_j + h sum_l x_l,   x in {-1,+1}^n.
///
/// Generator i flips spin i. The Sherrington-Kirkpatrick instance draws
/// J_ij ~ N(0, beta^2 / (2n)) off the diagonal; the inverse temperature is
/// absorbed into J and h.
class SpinSystem : public Target {
 public:
  SpinSystem(Eigen::MatrixXd couplings, double field);

  static SpinSystem sherrington_kirkpatrick(int n, double beta, double field, std::uint64_t seed);
  /// Nearest-neighbour Ising couplings on a rows x cols grid (open boundary).
  static SpinSystem ising_lattice(int rows, int cols, double coupling, double field);

  int size() const { return static_cast<int>(couplings_.rows()); }
  const Eigen::MatrixXd& couplings() const { return couplings_; }
  double field() const { return field_; }

  std::string kind() const override { return "spin"; }
  void apply_in_place(GeneratorId g, State& x) const override;
  double log_density(const State& x) const override;
  double log_ratio(const State& x, GeneratorId g) const override;
  void validate(const State& x) const override;
  /// Energy -log pi(x).
  double statistic(const State& x, double log_density) const override;
  std::string statistic_name() const override { return "energy"; }
  State default_initial_state() const override;
  std::optional<std::uint64_t> state_space_size() const override;
  std::vector<State> enumerate_states() const override;
  std::unique_ptr<RatioCache> make_cache(const State& x) const override;

  /// Flip log ratio from a precomputed local field f_i = sum_j J_ij x_j.
  double log_ratio_from_field(int x_i, double local_field) const;

 private:
  Eigen::MatrixXd couplings_;
  double field_;
};

/// Local fields f = J x kept in step with the chain; a flip at i costs O(n).
class SpinFieldCache : public RatioCache {
 public:
  SpinFieldCache(const SpinSystem& model, const State& x);

  double log_ratio(GeneratorId g) const override;
  /// `x_after` already has spin g flipped.
  void jumped(GeneratorId g, const State& x_after) override;

  const Eigen::VectorXd& fields() const { return fields_; }
  /// Max |cached - recomputed| local field; throws ConsistencyError above `tol`.
  double check(const State& x, double tol) const;

 private:
  const SpinSystem& model_;
  State x_;
  Eigen::VectorXd fields_;
};

}  // namespace jumpmc
