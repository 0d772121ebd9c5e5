#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "jumpmc/statespace.hpp"

namespace jumpmc {

/// L-ensemble determinantal point process: P(X) proportional to det L_X over
/// subsets X of {0..m-1}, with det of the empty restriction equal to 1.
/// Restrictions whose Cholesky pivots fall below `pivot_tol` times the
/// diagonal are treated as singular (log density -inf).
class DppModel : public Target {
 public:
  explicit DppModel(Eigen::MatrixXd kernel, double pivot_tol = 1e-12);

  /// Squared-exponential kernel exp(-|s_i - s_j|^2 / 2) on m uniform points
  /// in the unit square.
  static DppModel uniform_points(int m, std::uint64_t seed);

  int size() const { return static_cast<int>(kernel_.rows()); }
  const Eigen::MatrixXd& kernel() const { return kernel_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  double pivot_tol() const { return pivot_tol_; }
  /// E|X| = sum_i l_i / (1 + l_i) over the kernel eigenvalues.
  double expected_cardinality() const;

  std::string kind() const override { return "dpp"; }
  void apply_in_place(GeneratorId g, State& x) const override { x[g] = 1 - x[g]; }
  double log_density(const State& x) const override;
  void validate(const State& x) const override;
  /// Number of selected points.
  double statistic(const State& x, double log_density) const override;
  std::string statistic_name() const override { return "point_count"; }
  State default_initial_state() const override { return State(size(), 0); }
  std::optional<std::uint64_t> state_space_size() const override;
  std::vector<State> enumerate_states() const override;

 private:
  Eigen::MatrixXd kernel_;
  Eigen::VectorXd eigenvalues_;
  double pivot_tol_;
};

}  // namespace jumpmc
