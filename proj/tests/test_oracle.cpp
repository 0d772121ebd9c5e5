#include <catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "jumpmc/diagnostics.hpp"
#include "jumpmc/errors.hpp"
#include "jumpmc/models/lattice.hpp"
#include "jumpmc/models/spin.hpp"
#include "jumpmc/oracle.hpp"
#include "oracles.hpp"

using namespace jumpmc;
using Catch::Approx;
namespace to = testing_oracles;

namespace {

double barker(double t) { return t / (1.0 + t); }

Eigen::MatrixXd dense(const RateMatrix& r) { return Eigen::MatrixXd(r.q); }

LatticeGaussianModel sheared_window() {
  Eigen::MatrixXd basis(2, 2);
  basis << 1.0, 0.4, 0.0, 1.0;
  return LatticeGaussianModel(basis, 3.0, Window{-3, 3});
}

}  // namespace

TEST_CASE("enumerated spaces have the product cardinalities", "[oracle]") {
  const auto ising = SpinSystem::ising_lattice(2, 2, 1.0, 0.0);
  const SamplerOptions o;
  CHECK(EnumeratedSpace(SamplerKind::Zanella, ising, o).size() == 16);
  CHECK(EnumeratedSpace(SamplerKind::Tabu, ising, o).size() == 512);
  CHECK(EnumeratedSpace(SamplerKind::Dzz, ising, o).size() == 256);
  CHECK(EnumeratedSpace(SamplerKind::Dcs, ising, o).size() == 128);

  EnumeratedSpace space(SamplerKind::Tabu, ising, o);
  for (std::size_t u = 0; u < space.size(); u += 37) CHECK(space.index(space.state(u)) == u);
}

TEST_CASE("two-state Zanella generator and its stationary law", "[oracle]") {
  PathModel two({1.0, 2.0});
  EnumeratedSpace space(SamplerKind::Zanella, two, SamplerOptions{});
  const auto q = build_rate_matrix(space);
  Eigen::MatrixXd expected(2, 2);
  expected << -2.0 / 3, 2.0 / 3, 1.0 / 3, -1.0 / 3;
  CHECK((dense(q) - expected).cwiseAbs().maxCoeff() < 1e-15);

  const auto st = stationary_distribution(q);
  REQUIRE(st.irreducible());
  const auto pi = st.mixture();
  CHECK(pi[0] == Approx(1.0 / 3).epsilon(1e-14));
  CHECK(pi[1] == Approx(2.0 / 3).epsilon(1e-14));
  const Eigen::VectorXd ref = to::dense_stationary(expected);
  CHECK(std::abs(ref[0] - pi[0]) < 1e-14);
}

TEST_CASE("one-spin Tabu matrix matches a hand enumeration", "[oracle]") {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(1, 1);
  SpinSystem one(J, 0.4);
  EnumeratedSpace space(SamplerKind::Tabu, one, SamplerOptions{});
  REQUIRE(space.size() == 8);
  const Eigen::MatrixXd got = dense(build_rate_matrix(space));

  Eigen::MatrixXd hand = Eigen::MatrixXd::Zero(8, 8);
  for (int x : {1, -1}) {
    const double lambda = barker(std::exp(-2 * 0.4 * x));
    for (int alpha : {1, -1}) {
      for (int tau : {1, -1}) {
        SamplerState s{State{x}, {alpha}, {}, 0, tau};
        const auto u = space.index(s);
        if (alpha == tau) {
          // Available: flip the spin and mark the generator used.
          const auto v = space.index(SamplerState{State{-x}, {-alpha}, {}, 0, tau});
          hand(u, v) += lambda;
        } else {
          // Nothing available in direction tau: the reversed direction has
          // rate lambda, which is the compensating tau flip.
          const auto v = space.index(SamplerState{State{x}, {alpha}, {}, 0, -tau});
          hand(u, v) += lambda;
        }
        hand(u, u) -= lambda;
      }
    }
  }
  CHECK((got - hand).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("detailed balance separates reversible and non-reversible samplers", "[oracle]") {
  const auto ising = SpinSystem::ising_lattice(2, 2, 1.0, 0.0);
  EnumeratedSpace zs(SamplerKind::Zanella, ising, SamplerOptions{});
  CHECK(check_detailed_balance(build_rate_matrix(zs), zs.reference(), 1e-12).pass);

  EnumeratedSpace ts(SamplerKind::Tabu, ising, SamplerOptions{});
  const auto tabu = check_detailed_balance(build_rate_matrix(ts), ts.reference(), 1e-12);
  CHECK_FALSE(tabu.pass);
  CHECK(tabu.max_violation > 1e-3);

  // Birth-death chain with arbitrary rates is reversible.
  const auto path = PathModel::beta_binomial(6, 2.0, 3.0);
  EnumeratedSpace ps(SamplerKind::Zanella, path, SamplerOptions{});
  CHECK(check_detailed_balance(build_rate_matrix(ps), ps.reference(), 1e-12).pass);
}

TEST_CASE("Tabu satisfies skew balance and needs its compensators", "[oracle]") {
  const auto ising = SpinSystem::ising_lattice(2, 2, 1.0, 0.0);
  EnumeratedSpace space(SamplerKind::Tabu, ising, SamplerOptions{});
  const auto inv = space.involution();
  const auto good = check_skew_detailed_balance(build_rate_matrix(space), space.reference(), inv, 1e-12);
  CHECK(good.pass());
  CHECK(good.local_pair.max_violation <= 1e-12);

  RateMatrixOptions bare;
  bare.include_compensators = false;
  const auto bad = check_skew_detailed_balance(build_rate_matrix(space, bare), space.reference(), inv, 1e-12);
  CHECK_FALSE(bad.semi_local.pass);
}

TEST_CASE("dZZ satisfies per-generator skew balance on a truncated lattice", "[oracle]") {
  const auto lattice = sheared_window();
  EnumeratedSpace space(SamplerKind::Dzz, lattice, SamplerOptions{});
  for (std::size_t r = 0; r < space.reduced().size(); ++r) {
    RateMatrixOptions one;
    one.only_generator = r;
    const auto q = build_rate_matrix(space, one);
    CHECK(check_skew_detailed_balance(q, space.reference(), space.involution(r), 1e-12).pass());
    one.include_compensators = false;
    const auto bare = build_rate_matrix(space, one);
    CHECK_FALSE(check_skew_detailed_balance(bare, space.reference(), space.involution(r), 1e-12).semi_local.pass);
  }

  // The full generator is the sum of the single-generator parts.
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(space.size(), space.size());
  for (std::size_t r = 0; r < space.reduced().size(); ++r) {
    RateMatrixOptions one;
    one.only_generator = r;
    sum += dense(build_rate_matrix(space, one));
  }
  CHECK((sum - dense(build_rate_matrix(space))).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("generator expectation vanishes for dCS and catches corrupted rates", "[oracle]") {
  const auto line = LatticeGaussianModel::identity(1, 2.0, Window{-2, 2});
  EnumeratedSpace space(SamplerKind::Dcs, line, SamplerOptions{});
  REQUIRE(space.size() == 20);
  auto q = build_rate_matrix(space);
  const std::vector<double> ones(space.size(), 1.0);
  CHECK(std::abs(generator_expectation(q, space.reference(), ones)) < 1e-15);

  std::mt19937_64 gen(5);
  std::normal_distribution<double> n01;
  std::vector<double> f(space.size());
  for (int trial = 0; trial < 50; ++trial) {
    for (auto& v : f) v = n01(gen);
    CHECK(std::abs(generator_expectation(q, space.reference(), f)) < 1e-13);
  }

  // Inflate one off-diagonal rate (keeping the row sum at zero).
  bool corrupted = false;
  for (Eigen::Index u = 0; u < q.q.outerSize() && !corrupted; ++u) {
    for (decltype(q.q)::InnerIterator it(q.q, u); it; ++it) {
      if (it.col() != u && it.value() > 0) {
        const double r = it.value();
        it.valueRef() = 1.5 * r;
        q.q.coeffRef(u, u) -= 0.5 * r;
        corrupted = true;
        break;
      }
    }
  }
  REQUIRE(corrupted);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    for (auto& v : f) v = n01(gen);
    worst = std::max(worst, std::abs(generator_expectation(q, space.reference(), f)));
  }
  CHECK(worst > 1e-6);
}

TEST_CASE("jump measure on small targets", "[oracle]") {
  SpinSystem flat(Eigen::MatrixXd::Zero(3, 3), 0.0);
  const auto jm = jump_measure(flat, BalancingFunction::barker());
  for (double m : jm.measure) CHECK(m == Approx(1.0 / 8));

  // pi = (0.2, 0.5, 0.3) on a path.
  PathModel path({0.2, 0.5, 0.3});
  const double p[] = {0.2, 0.5, 0.3};
  const double lambda[] = {barker(0.5 / 0.2), barker(0.2 / 0.5) + barker(0.3 / 0.5), barker(0.5 / 0.3)};
  double z = 0.0;
  for (int i = 0; i < 3; ++i) z += p[i] * lambda[i];
  const auto b = jump_measure(path, BalancingFunction::barker());
  for (int i = 0; i < 3; ++i) {
    CHECK(b.exit_rate[i] == Approx(lambda[i]).epsilon(1e-14));
    CHECK(b.measure[i] == Approx(p[i] * lambda[i] / z).epsilon(1e-14));
    CHECK(b.ratio[i] == Approx(lambda[i] / z).epsilon(1e-14));
  }

  // Global weighting: pi(x) Lambda(x) is the neighbour mass.
  const auto g = jump_measure(path, BalancingFunction::global());
  const double nb[] = {0.5, 0.5, 0.5};
  for (int i = 0; i < 3; ++i) CHECK(g.measure[i] == Approx(nb[i] / 1.5).epsilon(1e-14));
}

TEST_CASE("weighted dZZ keeps the target invariant", "[oracle]") {
  const auto lattice = sheared_window();
  SamplerOptions o;
  o.weights = {3.0, 0.5};
  EnumeratedSpace space(SamplerKind::Dzz, lattice, o);
  const auto st = stationary_distribution(build_rate_matrix(space));
  CHECK(st.irreducible());
  CHECK(check_invariance(space, st, 1e-10).pass);
  const auto xm = x_marginal(space, st.mixture());
  CHECK(tv_distance(xm, space.base_probabilities()) < 1e-10);
}

TEST_CASE("verify_sampler passes on the small reference targets", "[oracle]") {
  const auto ising = SpinSystem::ising_lattice(2, 2, 1.0, 0.0);
  PathModel path({0.2, 0.5, 0.3});
  for (const Target* t : {static_cast<const Target*>(&ising), static_cast<const Target*>(&path)}) {
    for (auto kind : {SamplerKind::Zanella, SamplerKind::Tabu, SamplerKind::Dzz, SamplerKind::Dcs}) {
      if (kind == SamplerKind::Tabu && !t->generators().all_order_two()) continue;
      for (const auto& row : verify_sampler(*t, kind, SamplerOptions{}, 100000, 1e-10)) {
        INFO(to_string(kind) << " " << row.name << " " << row.max_violation);
        CHECK(row.pass);
      }
    }
  }
}

TEST_CASE("oracle refuses spaces it cannot enumerate", "[oracle]") {
  const auto sk = SpinSystem::sherrington_kirkpatrick(12, 1.0, 0.0, 3);
  CHECK_THROWS_AS(EnumeratedSpace(SamplerKind::Tabu, sk, SamplerOptions{}, 1000), SizeOverflowError);
  const auto open = LatticeGaussianModel::identity(2, 3.0);
  CHECK_THROWS_AS(EnumeratedSpace(SamplerKind::Dzz, open, SamplerOptions{}), SizeOverflowError);
}
