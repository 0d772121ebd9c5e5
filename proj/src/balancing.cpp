#include "jumpmc/balancing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "jumpmc/errors.hpp"

namespace jumpmc {

BalancingFunction::BalancingFunction() : BalancingFunction(BalancingKind::Barker, "barker", true) {}

BalancingFunction::BalancingFunction(BalancingKind kind, std::string key, bool balanced)
    : kind_(kind), key_(std::move(key)), balanced_(balanced) {}

BalancingFunction BalancingFunction::sqrt() { return {BalancingKind::Sqrt, "sqrt", true}; }
BalancingFunction BalancingFunction::barker() { return {BalancingKind::Barker, "barker", true}; }
BalancingFunction BalancingFunction::metropolis() {
  return {BalancingKind::Metropolis, "metropolis", true};
}
BalancingFunction BalancingFunction::global() { return {BalancingKind::Global, "global", false}; }

BalancingFunction BalancingFunction::custom(std::string name, std::function<double(double)> g,
                                            bool declared_balanced) {
  if (!g) throw ConfigError("custom balancing function '" + name + "' has no evaluator");
  BalancingFunction out(BalancingKind::Custom, std::move(name), declared_balanced);
  out.custom_ = std::make_shared<const std::function<double(double)>>(std::move(g));
  if (declared_balanced) {
    std::vector<double> grid;
    for (int i = 0; i <= 240; ++i) grid.push_back(std::pow(10.0, -6.0 + 12.0 * i / 240.0));
    if (!check_balance(out, grid, 1e-10)) {
      throw ConfigError("custom balancing function '" + out.key_ +
                        "' is declared balanced but violates g(t) = t g(1/t)");
    }
  }
  return out;
}

BalancingFunction BalancingFunction::from_key(std::string_view key) {
  if (key == "sqrt") return sqrt();
  if (key == "barker") return barker();
  if (key == "metropolis") return metropolis();
  if (key == "global") return global();
  throw ConfigError("unknown balancing function '" + std::string(key) +
                    "' (expected sqrt, barker, metropolis or global)");
}

double BalancingFunction::operator()(double t) const {
  switch (kind_) {
    case BalancingKind::Sqrt:
      return std::sqrt(t);
    case BalancingKind::Barker:
      return std::isinf(t) ? 1.0 : t / (1.0 + t);
    case BalancingKind::Metropolis:
      return std::min(1.0, t);
    case BalancingKind::Global:
      return t;
    case BalancingKind::Custom:
      return (*custom_)(t);
  }
  return 0.0;
}

double BalancingFunction::log_eval(double log_t) const {
  switch (kind_) {
    case BalancingKind::Sqrt:
      return 0.5 * log_t;
    case BalancingKind::Barker:
      // log(t / (1 + t)) = -log1p(exp(-log_t)), split by sign for stability.
      return log_t > 0.0 ? -std::log1p(std::exp(-log_t)) : log_t - std::log1p(std::exp(log_t));
    case BalancingKind::Metropolis:
      return std::min(0.0, log_t);
    case BalancingKind::Global:
      return log_t;
    case BalancingKind::Custom:
      return std::log((*custom_)(std::exp(log_t)));
  }
  return 0.0;
}

double evaluate(const BalancingFunction& g, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw DomainError("balancing function argument must be positive and finite");
  }
  return g(t);
}

double evaluate_log(const BalancingFunction& g, double log_t) {
  if (!std::isfinite(log_t)) throw DomainError("log ratio must be finite");
  return g.log_eval(log_t);
}

double log_rate(const BalancingFunction& g, double log_ratio) {
  if (log_ratio == -std::numeric_limits<double>::infinity()) return log_ratio;
  return evaluate_log(g, log_ratio);
}

bool check_balance(const BalancingFunction& g, std::span<const double> ts, double tol) {
  return std::all_of(ts.begin(), ts.end(), [&](double t) {
    const double lhs = evaluate(g, t);
    const double rhs = t * evaluate(g, 1.0 / t);
    return std::abs(lhs - rhs) <= tol * std::max(1.0, lhs);
  });
}

void require_sampler_admissible(const BalancingFunction& g) {
  if (!g.balanced()) {
    throw ConfigError("balancing function '" + g.key() +
                      "' does not satisfy g(t) = t g(1/t) and cannot drive a sampler");
  }
}

}  // namespace jumpmc
