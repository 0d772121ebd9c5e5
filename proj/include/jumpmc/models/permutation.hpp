#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "jumpmc/statespace.hpp"

namespace jumpmc {

/// Maximum-weight assignment: returns col[i] for each row i maximizing
/// sum_i score(i, col[i]). O(n^3) shortest augmenting paths.
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& score);

/// pi(x) proportional to prod_i w(i, x_i) over permutations x of {0..n-1}.
/// Generators are the unordered transpositions (i, j), i < j, one
/// self-inverse handle each.
class PermutationModel : public Target {
 public:
  explicit PermutationModel(Eigen::MatrixXd weights);

  /// w(i, j) ~ LogNormal(0, sigma2) i.i.d.
  static PermutationModel lognormal(int n, double sigma2, std::uint64_t seed);

  int size() const { return static_cast<int>(log_w_.rows()); }
  const Eigen::MatrixXd& log_weights() const { return log_w_; }
  Eigen::MatrixXd weights() const { return log_w_.array().exp(); }
  std::pair<int, int> transposition(GeneratorId g) const { return pairs_[g]; }
  GeneratorId transposition_id(int i, int j) const;
  const State& mode() const { return mode_; }

  std::string kind() const override { return "permutation"; }
  void apply_in_place(GeneratorId g, State& x) const override;
  double log_density(const State& x) const override;
  double log_ratio(const State& x, GeneratorId g) const override;
  void validate(const State& x) const override;
  /// Hamming distance to the maximum-probability permutation.
  double statistic(const State& x, double log_density) const override;
  std::string statistic_name() const override { return "hamming_to_mode"; }
  State default_initial_state() const override;
  std::optional<std::uint64_t> state_space_size() const override;
  std::vector<State> enumerate_states() const override;
  std::optional<double> mode_log_density() const override { return log_density(mode_); }
  std::optional<std::vector<GeneratorId>> affected_by(GeneratorId g) const override;

 private:
  Eigen::MatrixXd log_w_;
  std::vector<std::pair<int, int>> pairs_;
  State mode_;
};

}  // namespace jumpmc
