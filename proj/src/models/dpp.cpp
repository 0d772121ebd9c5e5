#include "jumpmc/models/dpp.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "jumpmc/errors.hpp"
#include "jumpmc/rng.hpp"

namespace jumpmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<int> members_of(const State& x) {
  std::vector<int> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i]) out.push_back(static_cast<int>(i));
  }
  return out;
}

Eigen::MatrixXd restrict(const Eigen::MatrixXd& L, const std::vector<int>& idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd A(k, k);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) A(r, c) = L(idx[r], idx[c]);
  }
  return A;
}

// Cholesky with the pivot test; nullopt when singular.
std::optional<Eigen::LLT<Eigen::MatrixXd>> factor(const Eigen::MatrixXd& A, double tol) {
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Eigen::MatrixXd L = llt.matrixL();
  for (Eigen::Index k = 0; k < A.rows(); ++k) {
    if (!(L(k, k) * L(k, k) > tol * A(k, k))) return std::nullopt;
  }
  return llt;
}

}  // namespace

DppModel::DppModel(Eigen::MatrixXd kernel, double pivot_tol)
    : Target(involution_generators(static_cast<std::size_t>(kernel.rows()))),
      kernel_(std::move(kernel)),
      pivot_tol_(pivot_tol) {
  if (kernel_.rows() < 1 || kernel_.rows() != kernel_.cols()) throw ConfigError("DPP kernel must be square");
  if (!kernel_.isApprox(kernel_.transpose(), 1e-12)) throw ConfigError("DPP kernel must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(kernel_, Eigen::EigenvaluesOnly);
  eigenvalues_ = eig.eigenvalues();
  const double scale = std::max(1.0, eigenvalues_.cwiseAbs().maxCoeff());
  if (eigenvalues_.minCoeff() < -1e-10 * scale) throw ConfigError("DPP kernel is not positive semidefinite");
  eigenvalues_ = eigenvalues_.cwiseMax(0.0);
}

DppModel DppModel::uniform_points(int m, std::uint64_t seed) {
  if (m < 1) throw ConfigError("DPP needs at least one item");
  Philox4x32 rng(seed);
  Eigen::MatrixX2d s(m, 2);
  for (int i = 0; i < m; ++i) {
    s(i, 0) = rng.uniform();
    s(i, 1) = rng.uniform();
  }
  Eigen::MatrixXd L(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) L(i, j) = std::exp(-0.5 * (s.row(i) - s.row(j)).squaredNorm());
  }
  return DppModel(std::move(L));
}

double DppModel::expected_cardinality() const {
  return (eigenvalues_.array() / (1.0 + eigenvalues_.array())).sum();
}

double DppModel::log_density(const State& x) const {
  const auto idx = members_of(x);
  if (idx.empty()) return 0.0;
  const auto llt = factor(restrict(kernel_, idx), pivot_tol_);
  if (!llt) return kNegInf;
  const Eigen::MatrixXd L = llt->matrixL();
  return 2.0 * L.diagonal().array().log().sum();
}

void DppModel::validate(const State& x) const {
  if (static_cast<int>(x.size()) != size()) throw ValidationError("DPP state has the wrong length");
  for (int b : x) {
    if (b != 0 && b != 1) throw ValidationError("DPP indicators must be 0 or 1");
  }
}

double DppModel::statistic(const State& x, double) const {
  return static_cast<double>(std::count(x.begin(), x.end(), 1));
}

std::optional<std::uint64_t> DppModel::state_space_size() const {
  if (size() >= 63) return std::nullopt;
  return std::uint64_t{1} << size();
}

std::vector<State> DppModel::enumerate_states() const {
  return binary_states(static_cast<std::size_t>(size()), 0, 1, 20);
}

}  // namespace jumpmc
