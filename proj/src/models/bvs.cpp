#include "jumpmc/models/bvs.hpp"

#include <cmath>
#include <numbers>

#include "jumpmc/errors.hpp"
#include "jumpmc/io.hpp"
#include "jumpmc/rng.hpp"

namespace jumpmc {

namespace {

std::vector<std::string> default_names(Eigen::Index n) {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < n; ++i) out.push_back("x" + std::to_string(i));
  return out;
}

}  // namespace

BvsModel::BvsModel(Eigen::MatrixXd design, Eigen::VectorXd response, BvsHyper hyper,
                   std::vector<std::string> names)
    : Target(involution_generators(static_cast<std::size_t>(design.cols()))),
      design_(std::move(design)),
      response_(std::move(response)),
      hyper_(hyper),
      names_(std::move(names)) {
  if (design_.rows() < 1 || design_.cols() < 1) throw ConfigError("design matrix must be non-empty");
  if (response_.size() != design_.rows()) throw ConfigError("response length differs from design rows");
  if (!(hyper_.w > 0 && hyper_.v > 0 && hyper_.lambda > 0)) {
    throw ConfigError("hyperparameters w, v and lambda must be positive");
  }
  if (!design_.allFinite() || !response_.allFinite()) throw ConfigError("design or response has non-finite entries");
  if (names_.empty()) names_ = default_names(design_.cols());
  if (static_cast<Eigen::Index>(names_.size()) != design_.cols()) {
    throw ConfigError("covariate name count differs from design columns");
  }
  gram_ = design_.transpose() * design_;
  zty_ = design_.transpose() * response_;
  yty_ = response_.squaredNorm();
}

BvsModel BvsModel::from_csv(const BvsDataSpec& spec, BvsHyper hyper) {
  const Table t = read_table(spec.path);
  if (t.rows.empty()) throw ConfigError(spec.path.string() + " has no data rows");
  const std::size_t yc = t.column(spec.response);
  const auto m = static_cast<Eigen::Index>(t.rows.size());

  std::vector<std::string> base_names;
  std::vector<Eigen::VectorXd> base_cols;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c == yc) continue;
    Eigen::VectorXd col(m);
    for (Eigen::Index r = 0; r < m; ++r) col[r] = t.rows[r][c];
    base_names.push_back(t.columns[c]);
    base_cols.push_back(std::move(col));
  }
  for (const auto& name : spec.log_columns) {
    const std::size_t c = t.column(name);
    if (c == yc) throw ConfigError("response column cannot be log-transformed as a covariate");
    Eigen::VectorXd col(m);
    for (Eigen::Index r = 0; r < m; ++r) {
      if (!(t.rows[r][c] > 0)) throw ConfigError("log transform of non-positive value in column '" + name + "'");
      col[r] = std::log(t.rows[r][c]);
    }
    base_names.push_back("log_" + name);
    base_cols.push_back(std::move(col));
  }

  std::vector<std::string> names;
  std::vector<Eigen::VectorXd> cols;
  if (spec.intercept) {
    names.push_back("intercept");
    cols.push_back(Eigen::VectorXd::Ones(m));
  }
  names.insert(names.end(), base_names.begin(), base_names.end());
  cols.insert(cols.end(), base_cols.begin(), base_cols.end());
  if (spec.interactions) {
    for (std::size_t i = 0; i < base_cols.size(); ++i) {
      for (std::size_t j = i + 1; j < base_cols.size(); ++j) {
        names.push_back(base_names[i] + ":" + base_names[j]);
        cols.push_back(base_cols[i].cwiseProduct(base_cols[j]));
      }
    }
  }

  Eigen::MatrixXd Z(m, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) Z.col(static_cast<Eigen::Index>(j)) = cols[j];
  Eigen::VectorXd y(m);
  for (Eigen::Index r = 0; r < m; ++r) y[r] = t.rows[r][yc];
  return BvsModel(std::move(Z), std::move(y), hyper, std::move(names));
}

BvsModel BvsModel::synthetic(int m, int n, int active, double noise_sd, std::uint64_t seed, BvsHyper hyper) {
  if (m < 1 || n < 1 || active < 0 || active > n) throw ConfigError("invalid synthetic BVS dimensions");
  Philox4x32 rng(seed);
  Eigen::MatrixXd Z(m, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) Z(i, j) = rng.normal();
  }
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < active; ++j) beta[j] = (j % 2 ? -1.0 : 1.0) * (1.0 + 0.5 * j);
  Eigen::VectorXd y = Z * beta;
  for (int i = 0; i < m; ++i) y[i] += noise_sd * rng.normal();
  return BvsModel(std::move(Z), std::move(y), hyper);
}

double BvsModel::log_density(const State& x) const {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i]) idx.push_back(static_cast<Eigen::Index>(i));
  }
  const double a = hyper_.w / 2.0;
  const double b0 = hyper_.w * hyper_.lambda / 2.0;
  const double m = static_cast<double>(observations());
  const double v2 = hyper_.v * hyper_.v;

  double log_det = 0.0;
  double q = yty_;
  if (!idx.empty()) {
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd A(k, k);
    Eigen::VectorXd b(k);
    for (Eigen::Index r = 0; r < k; ++r) {
      b[r] = zty_[idx[r]];
      for (Eigen::Index c = 0; c < k; ++c) A(r, c) = v2 * gram_(idx[r], idx[c]);
      A(r, r) += 1.0;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) throw ConsistencyError("BVS posterior precision is not positive definite");
    const Eigen::MatrixXd L = llt.matrixL();
    log_det = 2.0 * L.diagonal().array().log().sum();
    q -= v2 * b.dot(llt.solve(b));
  }
  return std::lgamma(a + m / 2.0) - std::lgamma(a) + a * std::log(b0) -
         (m / 2.0) * std::log(2.0 * std::numbers::pi) - 0.5 * log_det - (a + m / 2.0) * std::log(b0 + q / 2.0);
}

void BvsModel::validate(const State& x) const {
  if (static_cast<int>(x.size()) != covariates()) throw ValidationError("BVS state has the wrong length");
  for (int b : x) {
    if (b != 0 && b != 1) throw ValidationError("BVS inclusion indicators must be 0 or 1");
  }
}

double BvsModel::statistic(const State& x, double) const {
  double k = 0;
  for (int b : x) k += b;
  return k;
}

std::optional<std::uint64_t> BvsModel::state_space_size() const {
  if (covariates() >= 63) return std::nullopt;
  return std::uint64_t{1} << covariates();
}

std::vector<State> BvsModel::enumerate_states() const {
  return binary_states(static_cast<std::size_t>(covariates()), 0, 1, 20);
}

}  // namespace jumpmc
