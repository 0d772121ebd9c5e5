#pragma once

#include <Eigen/Sparse>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jumpmc/balancing.hpp"
#include "jumpmc/samplers.hpp"
#include "jumpmc/statespace.hpp"

namespace jumpmc {

/// Every augmented state of a sampler on an enumerable target. Index
/// u = x_index * aux_count + aux_code.
class EnumeratedSpace {
 public:
  /// Throws SizeOverflowError when |X| * |aux| exceeds `size_cap`.
  EnumeratedSpace(SamplerKind kind, const Target& target, const SamplerOptions& options,
                  std::uint64_t size_cap = 100'000);

  SamplerKind sampler() const { return kind_; }
  const Target& target() const { return target_; }
  std::size_t size() const { return base_.size() * aux_count_; }
  std::size_t base_size() const { return base_.size(); }
  std::size_t aux_count() const { return aux_count_; }
  bool truncated() const { return target_.truncated(); }

  const std::vector<State>& base_states() const { return base_; }
  /// Normalized pi over the enumerated support.
  const std::vector<double>& base_probabilities() const { return base_prob_; }
  const std::vector<double>& base_log_density() const { return base_log_; }
  std::optional<std::size_t> base_index(const State& x) const;

  SamplerState state(std::size_t u) const;
  std::size_t index(const SamplerState& s) const;
  std::size_t x_index(std::size_t u) const { return u / aux_count_; }
  std::size_t aux_code(std::size_t u) const { return u % aux_count_; }

  /// Reference measure pi(x) times the auxiliary law (uniform signs, psi for
  /// the dCS velocity).
  const std::vector<double>& reference() const { return reference_; }
  /// Sampler involution: Tabu tau -> -tau; dZZ theta -> -theta (all
  /// entries, or only entry `flip_only` when set); dCS (v, tau) -> (v, -tau).
  /// Empty for Zanella.
  std::vector<std::size_t> involution(std::optional<std::size_t> flip_only = std::nullopt) const;

  const GeneratorSet& reduced() const { return reduced_; }
  const std::vector<double>& psi() const { return psi_; }
  const SamplerOptions& options() const { return options_; }

 private:
  SamplerKind kind_;
  const Target& target_;
  SamplerOptions options_;
  std::vector<State> base_;
  std::vector<double> base_log_;
  std::vector<double> base_prob_;
  std::map<State, std::size_t> lookup_;
  std::size_t aux_count_ = 1;
  GeneratorSet reduced_;
  std::vector<double> psi_;
  std::vector<double> reference_;
};

/// Generator matrix: Q(u, v) = rate of u -> v for v != u, Q(u, u) = -Lambda(u).
struct RateMatrix {
  Eigen::SparseMatrix<double, Eigen::RowMajor> q;

  std::size_t size() const { return static_cast<std::size_t>(q.rows()); }
  /// Total exit rate -Q(u, u).
  double exit_rate(std::size_t u) const;
  double max_row_sum() const;
};

struct RateMatrixOptions {
  /// Tabu tau flips, dZZ theta flips and dCS velocity jumps.
  bool include_compensators = true;
  /// dZZ: keep only the events of this reduced-set position.
  std::optional<std::size_t> only_generator;
};

/// Reads the algorithm's event intensities off the enumerated space. Rates
/// are computed from log-density differences, independently of the
/// samplers' incremental caches.
RateMatrix build_rate_matrix(const EnumeratedSpace& space, const RateMatrixOptions& options = {});

struct StationaryResult {
  /// Closed communicating classes of the support graph of Q.
  std::vector<std::vector<std::size_t>> closed_classes;
  /// Stationary law of each closed class (same order as its indices).
  std::vector<std::vector<double>> class_distributions;
  /// States in no closed class.
  std::vector<std::size_t> transient;
  /// max over classes of |pi_C Q_C|_inf.
  double residual = 0.0;
  bool irreducible() const { return closed_classes.size() == 1 && transient.empty(); }
  /// Full-length law mixing class laws with `class_weights` (default: the
  /// single class, or equal weights).
  std::vector<double> mixture(const std::vector<double>& class_weights = {}) const;
  /// Mixture weighted by each class's mass under `reference`.
  std::vector<double> mixture_under(const std::vector<double>& reference) const;
};

/// Strongly-connected-component pass, then a sparse LU null-space solve per
/// closed class.
StationaryResult stationary_distribution(const RateMatrix& q);

struct CheckResult {
  std::string name;
  std::size_t space_size = 0;
  double max_violation = 0.0;
  bool pass = false;
  std::string note;
};

/// |pi(u) Q(u, v) - pi(v) Q(v, u)| over all pairs.
CheckResult check_detailed_balance(const RateMatrix& q, const std::vector<double>& pi, double tol);

struct SkewBalanceReport {
  CheckResult measure_invariance;  // Pi(S u) = Pi(u)
  CheckResult local_pair;          // Pi(u) Q(u,v) = Pi(S v) Q(S v, S u)
  CheckResult semi_local;          // Lambda(u) = Lambda(S u)
  bool pass() const { return measure_invariance.pass && local_pair.pass && semi_local.pass; }
};

SkewBalanceReport check_skew_detailed_balance(const RateMatrix& q, const std::vector<double>& reference,
                                              const std::vector<std::size_t>& involution, double tol);

/// sum_u Pi(u) (Q f)(u).
double generator_expectation(const RateMatrix& q, const std::vector<double>& reference,
                             const std::vector<double>& f);

struct JumpMeasure {
  /// pi(x) Lambda(x), normalized.
  std::vector<double> measure;
  /// measure / pi.
  std::vector<double> ratio;
  /// Lambda(x) of the Zanella process.
  std::vector<double> exit_rate;
};

/// Jump-chain law of the Zanella process with weighting g (any kind,
/// including the non-balanced Global).
JumpMeasure jump_measure(const Target& target, const BalancingFunction& g);

/// Marginal over x of a law on the augmented space.
std::vector<double> x_marginal(const EnumeratedSpace& space, const std::vector<double>& law);

/// P(+1) of each auxiliary sign (alpha entries then tau for Tabu, theta for
/// dZZ, tau for dCS), with names.
std::vector<std::pair<std::string, double>> sign_marginals(const EnumeratedSpace& space,
                                                           const std::vector<double>& law);
/// dCS velocity marginal indexed by generator position.
std::vector<double> velocity_marginal(const EnumeratedSpace& space, const std::vector<double>& law);

/// Checks that every closed class carries Pi restricted to it and that the
/// transient states have Pi-mass zero; `max_violation` is the worst TV gap.
CheckResult check_invariance(const EnumeratedSpace& space, const StationaryResult& st, double tol);

/// The whole enumeration pipeline for one sampler. Rows: stationarity,
/// x-marginal TV, auxiliary uniformity, and the sampler's balance checks.
std::vector<CheckResult> verify_sampler(const Target& target, SamplerKind kind, const SamplerOptions& options,
                                        std::uint64_t size_cap, double tol, std::uint64_t seed = 0);

void write_checks_csv(const std::filesystem::path& path, const std::vector<CheckResult>& rows);

}  // namespace jumpmc
