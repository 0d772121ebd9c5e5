#include <catch_amalgamated.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "jumpmc/balancing.hpp"
#include "jumpmc/errors.hpp"

using namespace jumpmc;
using Catch::Approx;

TEST_CASE("evaluate matches the closed forms", "[balancing]") {
  CHECK(evaluate(BalancingFunction::sqrt(), 4.0) == Approx(2.0));
  CHECK(evaluate(BalancingFunction::barker(), 1.0) == Approx(0.5));
  CHECK(evaluate(BalancingFunction::metropolis(), 0.25) == Approx(0.25));
  CHECK(evaluate(BalancingFunction::metropolis(), 3.0) == Approx(1.0));
  CHECK(evaluate(BalancingFunction::global(), 3.0) == Approx(3.0));
}

TEST_CASE("evaluate rejects non-positive or non-finite ratios", "[balancing]") {
  const auto g = BalancingFunction::barker();
  CHECK_THROWS_AS(evaluate(g, 0.0), DomainError);
  CHECK_THROWS_AS(evaluate(g, -1.0), DomainError);
  CHECK_THROWS_AS(evaluate(g, INFINITY), DomainError);
  CHECK_THROWS_AS(evaluate(g, NAN), DomainError);
  CHECK_THROWS_AS(evaluate_log(g, NAN), DomainError);
}

TEST_CASE("evaluate_log stays finite far outside double range", "[balancing]") {
  CHECK(evaluate_log(BalancingFunction::sqrt(), 2000.0) == Approx(1000.0));
  CHECK(evaluate_log(BalancingFunction::barker(), 0.0) == Approx(std::log(0.5)));
  CHECK(evaluate_log(BalancingFunction::metropolis(), -3.0) == Approx(-3.0));
  CHECK(evaluate_log(BalancingFunction::barker(), 5000.0) == Approx(0.0).margin(1e-12));
  CHECK(evaluate_log(BalancingFunction::barker(), -5000.0) == Approx(-5000.0));
  CHECK(evaluate_log(BalancingFunction::global(), 1500.0) == Approx(1500.0));
}

TEST_CASE("log_rate sends zero-mass destinations to zero rate", "[balancing]") {
  for (const char* key : {"sqrt", "barker", "metropolis"}) {
    CHECK(log_rate(BalancingFunction::from_key(key), -INFINITY) == -INFINITY);
  }
}

TEST_CASE("evaluate_log agrees with evaluate where both are representable", "[balancing]") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (const char* key : {"sqrt", "barker", "metropolis", "global"}) {
    const auto g = BalancingFunction::from_key(key);
    for (int i = 0; i < 500; ++i) {
      const double lt = u(gen);
      const double direct = std::log(evaluate(g, std::exp(lt)));
      CHECK(std::abs(evaluate_log(g, lt) - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST_CASE("check_balance examples", "[balancing]") {
  const std::vector<double> ts{0.1, 1, 3, 100};
  CHECK(check_balance(BalancingFunction::sqrt(), ts, 1e-12));
  const std::vector<double> two{2.0};
  CHECK_FALSE(check_balance(BalancingFunction::global(), two, 1e-12));
  const std::vector<double> seven{7.0};
  CHECK(check_balance(BalancingFunction::barker(), seven, 1e-12));
}

TEST_CASE("balanced kinds satisfy g(t) = t g(1/t) on random t", "[balancing]") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> lu(std::log(1e-6), std::log(1e6));
  std::vector<double> ts(1000);
  for (auto& t : ts) t = std::exp(lu(gen));
  for (const char* key : {"sqrt", "barker", "metropolis"}) {
    const auto g = BalancingFunction::from_key(key);
    CHECK(g.balanced());
    CHECK(check_balance(g, ts, 1e-10));
  }
  CHECK_FALSE(BalancingFunction::global().balanced());
  CHECK_FALSE(check_balance(BalancingFunction::global(), ts, 1e-10));
}

TEST_CASE("all kinds are non-decreasing", "[balancing]") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> lu(-10, 10);
  std::vector<double> lts(400);
  for (auto& v : lts) v = lu(gen);
  std::sort(lts.begin(), lts.end());
  for (const char* key : {"sqrt", "barker", "metropolis", "global"}) {
    const auto g = BalancingFunction::from_key(key);
    for (std::size_t i = 1; i < lts.size(); ++i) CHECK(evaluate_log(g, lts[i]) >= evaluate_log(g, lts[i - 1]));
  }
}

TEST_CASE("global is refused as a sampler rate", "[balancing]") {
  CHECK_THROWS_AS(require_sampler_admissible(BalancingFunction::global()), ConfigError);
  CHECK_NOTHROW(require_sampler_admissible(BalancingFunction::barker()));
}

TEST_CASE("custom balancing functions are checked at registration", "[balancing]") {
  // t^(1/2) written by hand passes; a corrupted variant fails.
  CHECK_NOTHROW(BalancingFunction::custom("root", [](double t) { return std::sqrt(t); }, true));
  CHECK_THROWS_AS(BalancingFunction::custom("bad", [](double t) { return std::sqrt(t) + 0.01; }, true), ConfigError);
  const auto loose = BalancingFunction::custom("loose", [](double t) { return t; }, false);
  CHECK_FALSE(loose.balanced());
  CHECK_THROWS_AS(require_sampler_admissible(loose), ConfigError);
}

TEST_CASE("unknown keys are configuration errors", "[balancing]") {
  CHECK_THROWS_AS(BalancingFunction::from_key("softmax"), ConfigError);
  CHECK(BalancingFunction().key() == "barker");
}
