#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace jumpmc {

enum class BalancingKind { Sqrt, Barker, Metropolis, Global, Custom };

/// Weighting function g turning a probability ratio t = pi(y)/pi(x) into a
/// jump rate. Balanced kinds satisfy g(t) = t g(1/t), which is what makes
/// rates g(pi(y)/pi(x)) reversible with respect to pi. `Global` (g(t) = t)
/// is not balanced and is only admissible when comparing jump measures.
class BalancingFunction {
 public:
  /// Default is Barker.
  BalancingFunction();

  static BalancingFunction sqrt();
  static BalancingFunction barker();
  static BalancingFunction metropolis();
  static BalancingFunction global();

  /// Registers a user-supplied g. When `declared_balanced` is set the
  /// identity is checked on a log-spaced grid over [1e-6, 1e6] at 1e-10 and
  /// registration throws ConfigError if it fails.
  static BalancingFunction custom(std::string name, std::function<double(double)> g,
                                  bool declared_balanced);

  /// "sqrt", "barker", "metropolis" or "global".
  static BalancingFunction from_key(std::string_view key);

  BalancingKind kind() const { return kind_; }
  const std::string& key() const { return key_; }
  /// True for Sqrt/Barker/Metropolis and for customs that passed the check.
  bool balanced() const { return balanced_; }

  double operator()(double t) const;
  double log_eval(double log_t) const;

 private:
  BalancingFunction(BalancingKind kind, std::string key, bool balanced);

  BalancingKind kind_;
  std::string key_;
  bool balanced_;
  std::shared_ptr<const std::function<double(double)>> custom_;
};

/// g(t); throws DomainError unless t is positive and finite.
double evaluate(const BalancingFunction& g, double t);

/// log g(exp(log_t)) without forming exp(log_t).
double evaluate_log(const BalancingFunction& g, double log_t);

/// Log rate for a log ratio that may be -inf (destination has zero mass);
/// such moves get rate zero for every admissible g.
double log_rate(const BalancingFunction& g, double log_ratio);

/// True iff |g(t) - t g(1/t)| <= tol max(1, g(t)) for all t.
bool check_balance(const BalancingFunction& g, std::span<const double> ts, double tol);

/// Throws ConfigError unless g may be used as a sampler rate.
void require_sampler_admissible(const BalancingFunction& g);

}  // namespace jumpmc
