#pragma once

#include <Eigen/Dense>
#include <optional>

#include "jumpmc/statespace.hpp"

namespace jumpmc {

/// Inclusive box [lo, hi]^d outside which the density is zero.
struct Window {
  int lo = -5;
  int hi = 5;
};

/// Lattice Gaussian on Z^d: log pi(z) = -pi |B z|^2 / s^2. Generator 2i adds
/// e_i, 2i+1 subtracts it (infinite order).
class LatticeGaussianModel : public Target {
 public:
  LatticeGaussianModel(Eigen::MatrixXd basis, double s, std::optional<Window> window = std::nullopt);
  static LatticeGaussianModel identity(int d, double s, std::optional<Window> window = std::nullopt);

  int dimension() const { return static_cast<int>(basis_.rows()); }
  const Eigen::MatrixXd& basis() const { return basis_; }
  double s() const { return s_; }
  const std::optional<Window>& window() const { return window_; }

  std::string kind() const override { return "lattice_gaussian"; }
  void apply_in_place(GeneratorId g, State& x) const override;
  double log_density(const State& x) const override;
  double log_ratio(const State& x, GeneratorId g) const override;
  void validate(const State& x) const override;
  /// Euclidean norm |B z|.
  double statistic(const State& x, double log_density) const override;
  std::string statistic_name() const override { return "norm"; }
  std::vector<std::string> state_columns() const override;
  State default_initial_state() const override { return State(dimension(), 0); }
  std::optional<std::uint64_t> state_space_size() const override;
  std::vector<State> enumerate_states() const override;
  bool truncated() const override { return window_.has_value(); }
  std::optional<double> mode_log_density() const override { return 0.0; }

 private:
  bool inside(const State& z) const;

  Eigen::MatrixXd basis_;
  Eigen::MatrixXd gram_;  // B'B
  double s_;
  std::optional<Window> window_;
};

/// Abelian Z_p lattice gauge field on an open grid of nx x ny vertices.
/// Edge values live in [0, p); plaquette P at (x, y) has oriented sum
/// h(x,y) + v(x+1,y) - h(x,y+1) - v(x,y) and potential 1 - cos(2 pi sum / p).
/// log pi = -beta sum_P V(P). Generator 2e increments edge e mod p, 2e+1
/// decrements it (order p).
class GaugeModel : public Target {
 public:
  GaugeModel(int nx, int ny, int p, double beta);

  int edges() const { return static_cast<int>(edge_plaquettes_.size()); }
  int plaquettes() const { return static_cast<int>(plaquette_edges_.size()); }
  int modulus() const { return p_; }
  double beta() const { return beta_; }
  /// Horizontal edge (x,y)->(x+1,y) and vertical edge (x,y)->(x,y+1) indices.
  int horizontal_edge(int x, int y) const;
  int vertical_edge(int x, int y) const;
  /// (edge, sign) for the four edges of plaquette k.
  const std::vector<std::pair<int, int>>& plaquette(int k) const { return plaquette_edges_[k]; }
  double potential(const State& x, int k) const;
  /// Angle 2 pi x_e / p of edge e on the unit circle.
  double angle(const State& x, int e) const;

  std::string kind() const override { return "gauge"; }
  void apply_in_place(GeneratorId g, State& x) const override;
  double log_density(const State& x) const override;
  double log_ratio(const State& x, GeneratorId g) const override;
  void validate(const State& x) const override;
  /// Total action sum_P V(P).
  double statistic(const State& x, double log_density) const override;
  std::string statistic_name() const override { return "action"; }
  State default_initial_state() const override { return State(edges(), 0); }
  std::optional<std::uint64_t> state_space_size() const override;
  std::vector<State> enumerate_states() const override;
  std::optional<double> mode_log_density() const override { return 0.0; }
  std::optional<std::vector<GeneratorId>> affected_by(GeneratorId g) const override;

 private:
  int nx_, ny_, p_;
  double beta_;
  std::vector<std::vector<std::pair<int, int>>> plaquette_edges_;
  std::vector<std::vector<int>> edge_plaquettes_;
  std::vector<std::vector<GeneratorId>> affected_;
};

/// Distribution on {0..K-1} with neighbours x - 1 and x + 1; moves off the
/// ends have zero rate. Generator 0 steps up, 1 steps down.
class PathModel : public Target {
 public:
  /// Unnormalized positive weights.
  explicit PathModel(std::vector<double> weights);

  /// Beta-binomial(N = states - 1, a, b) probabilities.
  static PathModel beta_binomial(int states, double a, double b);

  int states() const { return static_cast<int>(log_w_.size()); }
  /// Normalized probabilities.
  std::vector<double> probabilities() const;

  std::string kind() const override { return "path"; }
  void apply_in_place(GeneratorId g, State& x) const override { x[0] += g == 0 ? 1 : -1; }
  double log_density(const State& x) const override;
  void validate(const State& x) const override;
  /// The position itself.
  double statistic(const State& x, double) const override { return x[0]; }
  std::string statistic_name() const override { return "position"; }
  State default_initial_state() const override { return State{0}; }
  std::optional<std::uint64_t> state_space_size() const override { return log_w_.size(); }
  std::vector<State> enumerate_states() const override;

 private:
  std::vector<double> log_w_;
};

}  // namespace jumpmc
