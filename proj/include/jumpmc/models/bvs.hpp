#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "jumpmc/statespace.hpp"

namespace jumpmc {

/// Conjugate prior hyperparameters: sigma^2 ~ InvGamma(w/2, w*lambda/2),
/// beta | sigma^2, x ~ N(0, v^2 sigma^2 I).
struct BvsHyper {
  double w = 4.0;
  double v = 10.0;
  double lambda = 1.0;
};

/// Design-matrix construction from a CSV table.
struct BvsDataSpec {
  std::filesystem::path path;
  std::string response;
  /// Columns that also enter as log(column) (values must be > 0).
  std::vector<std::string> log_columns;
  /// Add products of every pair of base and log covariates.
  bool interactions = false;
  bool intercept = true;
};

/// Bayesian variable selection with the (beta, sigma^2) integrated out.
/// Bit i of the state includes design column i.
class BvsModel : public Target {
 public:
  BvsModel(Eigen::MatrixXd design, Eigen::VectorXd response, BvsHyper hyper = {},
           std::vector<std::string> names = {});

  static BvsModel from_csv(const BvsDataSpec& spec, BvsHyper hyper = {});
  /// Standard-normal design with a sparse true coefficient vector.
  static BvsModel synthetic(int m, int n, int active, double noise_sd, std::uint64_t seed,
                            BvsHyper hyper = {});

  int covariates() const { return static_cast<int>(design_.cols()); }
  int observations() const { return static_cast<int>(design_.rows()); }
  const Eigen::MatrixXd& design() const { return design_; }
  const Eigen::VectorXd& response() const { return response_; }
  const BvsHyper& hyper() const { return hyper_; }
  const std::vector<std::string>& names() const { return names_; }

  std::string kind() const override { return "bvs"; }
  void apply_in_place(GeneratorId g, State& x) const override { x[g] = 1 - x[g]; }
  /// Log marginal likelihood log p(y | x); the uniform prior on x is constant.
  double log_density(const State& x) const override;
  void validate(const State& x) const override;
  /// Number of included parameters.
  double statistic(const State& x, double log_density) const override;
  std::string statistic_name() const override { return "parameter_count"; }
  std::vector<std::string> state_columns() const override { return names_; }
  State default_initial_state() const override { return State(covariates(), 0); }
  std::optional<std::uint64_t> state_space_size() const override;
  std::vector<State> enumerate_states() const override;

 private:
  Eigen::MatrixXd design_;
  Eigen::VectorXd response_;
  BvsHyper hyper_;
  std::vector<std::string> names_;
  Eigen::MatrixXd gram_;    // Z'Z
  Eigen::VectorXd zty_;     // Z'y
  double yty_ = 0.0;
};

}  // namespace jumpmc
