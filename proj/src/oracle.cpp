#include "jumpmc/oracle.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "jumpmc/errors.hpp"
#include "jumpmc/io.hpp"
#include "jumpmc/rng.hpp"

namespace jumpmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

double tv(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

}  // namespace

// ---------------------------------------------------------------- space

EnumeratedSpace::EnumeratedSpace(SamplerKind kind, const Target& target, const SamplerOptions& options,
                                 std::uint64_t size_cap)
    : kind_(kind), target_(target), options_(options) {
  const auto& gens = target.generators();
  if (gens.empty()) throw ConfigError("target has no generators");
  double aux = 1.0;
  switch (kind) {
    case SamplerKind::Zanella:
      break;
    case SamplerKind::Tabu:
      if (!gens.all_order_two()) throw ConfigError("Tabu enumeration requires order-2 generators");
      aux = std::ldexp(1.0, static_cast<int>(gens.size()) + 1);
      break;
    case SamplerKind::Dzz:
      if (!gens.symmetric()) throw ConfigError("dZZ enumeration requires a symmetric generating set");
      reduced_ = reduced_set(gens);
      aux = std::ldexp(1.0, static_cast<int>(reduced_.size()));
      break;
    case SamplerKind::Dcs:
      if (!gens.symmetric()) throw ConfigError("dCS enumeration requires a symmetric generating set");
      aux = 2.0 * static_cast<double>(gens.size());
      break;
  }
  const auto base_count = target.state_space_size();
  if (!base_count) {
    throw SizeOverflowError(target.kind() + " state space is unbounded; declare a truncation window");
  }
  const double total = static_cast<double>(*base_count) * aux;
  if (total > static_cast<double>(size_cap)) {
    throw SizeOverflowError("augmented space has " + std::to_string(static_cast<long double>(total)) +
                            " states, above the cap of " + std::to_string(size_cap));
  }
  aux_count_ = static_cast<std::size_t>(aux);

  for (auto& x : target.enumerate_states()) {
    target.validate(x);
    const double ld = target.log_density(x);
    if (ld == kNegInf) continue;
    if (!std::isfinite(ld)) throw DomainError("non-finite log density during enumeration");
    lookup_.emplace(x, base_.size());
    base_.push_back(std::move(x));
    base_log_.push_back(ld);
  }
  if (base_.empty()) throw DomainError("target has no state with positive mass");
  const double top = *std::max_element(base_log_.begin(), base_log_.end());
  double z = 0.0;
  for (double ld : base_log_) z += base_prob_.emplace_back(std::exp(ld - top));
  for (double& p : base_prob_) p /= z;

  if (kind == SamplerKind::Dcs) {
    psi_ = options.psi.empty() ? std::vector<double>(gens.size(), 1.0) : options.psi;
    if (psi_.size() != gens.size()) throw ConfigError("dCS psi needs one entry per generator");
    const double s = std::accumulate(psi_.begin(), psi_.end(), 0.0);
    for (double& v : psi_) v /= s;
  }

  reference_.resize(size());
  for (std::size_t u = 0; u < size(); ++u) {
    const double px = base_prob_[x_index(u)];
    if (kind == SamplerKind::Dcs) {
      reference_[u] = px * psi_[aux_code(u) / 2] / 2.0;
    } else {
      reference_[u] = px / static_cast<double>(aux_count_);
    }
  }
}

std::optional<std::size_t> EnumeratedSpace::base_index(const State& x) const {
  auto it = lookup_.find(x);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

SamplerState EnumeratedSpace::state(std::size_t u) const {
  SamplerState s;
  s.x = base_[x_index(u)];
  const std::size_t code = aux_code(u);
  const auto& gens = target_.generators();
  switch (kind_) {
    case SamplerKind::Zanella:
      break;
    case SamplerKind::Tabu:
      s.alpha.resize(gens.size());
      for (std::size_t k = 0; k < gens.size(); ++k) s.alpha[k] = (code >> k) & 1 ? -1 : 1;
      s.tau = (code >> gens.size()) & 1 ? -1 : 1;
      break;
    case SamplerKind::Dzz:
      s.theta.resize(reduced_.size());
      for (std::size_t r = 0; r < reduced_.size(); ++r) s.theta[r] = (code >> r) & 1 ? -1 : 1;
      break;
    case SamplerKind::Dcs:
      s.velocity = gens[code / 2].id;
      s.tau = code % 2 ? -1 : 1;
      break;
  }
  return s;
}

std::size_t EnumeratedSpace::index(const SamplerState& s) const {
  const auto xi = base_index(s.x);
  if (!xi) throw DomainError("state is not in the enumerated support");
  std::size_t code = 0;
  const auto& gens = target_.generators();
  switch (kind_) {
    case SamplerKind::Zanella:
      break;
    case SamplerKind::Tabu:
      for (std::size_t k = 0; k < gens.size(); ++k) code |= static_cast<std::size_t>(s.alpha[k] < 0) << k;
      code |= static_cast<std::size_t>(s.tau < 0) << gens.size();
      break;
    case SamplerKind::Dzz:
      for (std::size_t r = 0; r < reduced_.size(); ++r) code |= static_cast<std::size_t>(s.theta[r] < 0) << r;
      break;
    case SamplerKind::Dcs:
      code = gens.position(s.velocity) * 2 + (s.tau < 0 ? 1 : 0);
      break;
  }
  return *xi * aux_count_ + code;
}

std::vector<std::size_t> EnumeratedSpace::involution(std::optional<std::size_t> flip_only) const {
  std::vector<std::size_t> out;
  if (kind_ == SamplerKind::Zanella) return out;
  out.resize(size());
  const auto& gens = target_.generators();
  for (std::size_t u = 0; u < size(); ++u) {
    const std::size_t code = aux_code(u);
    std::size_t image = code;
    switch (kind_) {
      case SamplerKind::Tabu:
        image = code ^ (std::size_t{1} << gens.size());
        break;
      case SamplerKind::Dzz:
        image = flip_only ? code ^ (std::size_t{1} << *flip_only) : code ^ (aux_count_ - 1);
        break;
      case SamplerKind::Dcs:
        image = code ^ 1;
        break;
      case SamplerKind::Zanella:
        break;
    }
    out[u] = x_index(u) * aux_count_ + image;
  }
  return out;
}

// ---------------------------------------------------------------- rates

double RateMatrix::exit_rate(std::size_t u) const { return -q.coeff(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(u)); }

double RateMatrix::max_row_sum() const {
  double worst = 0.0;
  for (Eigen::Index r = 0; r < q.outerSize(); ++r) {
    double s = 0.0;
    for (decltype(q)::InnerIterator it(q, r); it; ++it) s += it.value();
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

RateMatrix build_rate_matrix(const EnumeratedSpace& space, const RateMatrixOptions& options) {
  const Target& target = space.target();
  const auto& gens = target.generators();
  const BalancingFunction& g = space.options().g;
  const std::size_t nx = space.base_size();
  const std::size_t ng = gens.size();

  // rate[i][k] = g(pi(gamma_k x_i) / pi(x_i)); dest[i][k] = base index or kNone.
  std::vector<std::vector<double>> rate(nx, std::vector<double>(ng, 0.0));
  std::vector<std::vector<std::size_t>> dest(nx, std::vector<std::size_t>(ng, kNone));
  for (std::size_t i = 0; i < nx; ++i) {
    const State& x = space.base_states()[i];
    for (std::size_t k = 0; k < ng; ++k) {
      const State y = target.apply(gens[k].id, x);
      if (auto j = space.base_index(y)) {
        dest[i][k] = *j;
        rate[i][k] = std::exp(log_rate(g, space.base_log_density()[*j] - space.base_log_density()[i]));
      } else if (target.log_density(y) != kNegInf) {
        throw ConfigError("enumeration of " + target.kind() + " is not closed under its generators");
      }
    }
  }

  std::vector<Eigen::Triplet<double>> trips;
  auto add = [&](std::size_t u, std::size_t v, double r) {
    if (r < 0 || !std::isfinite(r)) throw ConsistencyError("negative or non-finite rate in rate matrix");
    if (r > 0 && u != v) trips.emplace_back(static_cast<int>(u), static_cast<int>(v), r);
  };
  const std::size_t A = space.aux_count();

  for (std::size_t u = 0; u < space.size(); ++u) {
    const std::size_t i = space.x_index(u);
    const std::size_t code = space.aux_code(u);
    switch (space.sampler()) {
      case SamplerKind::Zanella:
        for (std::size_t k = 0; k < ng; ++k) {
          if (dest[i][k] != kNone) add(u, dest[i][k], rate[i][k]);
        }
        break;
      case SamplerKind::Tabu: {
        const int tau = (code >> ng) & 1 ? -1 : 1;
        double avail = 0.0, other = 0.0;
        for (std::size_t k = 0; k < ng; ++k) {
          const int alpha = (code >> k) & 1 ? -1 : 1;
          if (alpha == tau) {
            avail += rate[i][k];
            if (dest[i][k] != kNone) add(u, dest[i][k] * A + (code ^ (std::size_t{1} << k)), rate[i][k]);
          } else {
            other += rate[i][k];
          }
        }
        if (options.include_compensators) add(u, i * A + (code ^ (std::size_t{1} << ng)), std::max(0.0, other - avail));
        break;
      }
      case SamplerKind::Dzz: {
        const auto& red = space.reduced();
        const auto& w = space.options().weights;
        for (std::size_t r = 0; r < red.size(); ++r) {
          if (options.only_generator && *options.only_generator != r) continue;
          const double weight = w.empty() ? 1.0 : w[r];
          const bool up = !((code >> r) & 1);
          const std::size_t kf = gens.position(up ? red[r].id : red[r].inverse_id);
          const std::size_t kb = gens.position(up ? red[r].inverse_id : red[r].id);
          if (dest[i][kf] != kNone) add(u, dest[i][kf] * A + code, weight * rate[i][kf]);
          if (options.include_compensators) {
            add(u, i * A + (code ^ (std::size_t{1} << r)), weight * std::max(0.0, rate[i][kb] - rate[i][kf]));
          }
        }
        break;
      }
      case SamplerKind::Dcs: {
        const auto& psi = space.psi();
        const std::size_t kv = code / 2;
        const bool up = code % 2 == 0;
        auto pos_dir = [&](std::size_t k, bool forward) {
          return forward ? k : gens.position(gens[k].inverse_id);
        };
        // delta(x, v, tau) and delta(x, v, -tau).
        const std::size_t kf = pos_dir(kv, up);
        const std::size_t kb = pos_dir(kv, !up);
        if (dest[i][kf] != kNone) add(u, dest[i][kf] * A + code, rate[i][kf]);
        if (options.include_compensators) {
          const double rho_v = std::max(0.0, rate[i][kb] - rate[i][kf]);
          if (rho_v > 0) {
            std::vector<double> weight(ng, 0.0);
            double z = 0.0;
            for (std::size_t k = 0; k < ng; ++k) {
              const double rho = std::max(0.0, rate[i][pos_dir(k, !up)] - rate[i][pos_dir(k, up)]);
              weight[k] = psi[k] * rho;
              z += weight[k];
            }
            if (!(z > 0)) throw ConsistencyError("dCS velocity normalizer vanished with positive rho");
            for (std::size_t k = 0; k < ng; ++k) {
              add(u, i * A + k * 2 + (up ? 1 : 0), rho_v * weight[k] / z);
            }
          }
        }
        break;
      }
    }
  }

  const auto n = static_cast<Eigen::Index>(space.size());
  Eigen::SparseMatrix<double, Eigen::RowMajor> off(n, n);
  off.setFromTriplets(trips.begin(), trips.end());
  std::vector<double> exit(space.size(), 0.0);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (decltype(off)::InnerIterator it(off, r); it; ++it) exit[r] += it.value();
  }
  for (Eigen::Index r = 0; r < n; ++r) trips.emplace_back(static_cast<int>(r), static_cast<int>(r), -exit[r]);
  RateMatrix out;
  out.q.resize(n, n);
  out.q.setFromTriplets(trips.begin(), trips.end());
  return out;
}

// ---------------------------------------------------------------- stationarity

namespace {

// Iterative Tarjan; returns component id per vertex.
std::vector<int> strongly_connected(const std::vector<std::vector<std::size_t>>& adj, int& count) {
  const std::size_t n = adj.size();
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> call;
  int next = 0;
  count = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (index[s] >= 0) continue;
    call.emplace_back(s, 0);
    while (!call.empty()) {
      auto& [v, edge] = call.back();
      if (edge == 0) {
        index[v] = low[v] = next++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      bool descended = false;
      while (edge < adj[v].size()) {
        const std::size_t w = adj[v][edge++];
        if (index[w] < 0) {
          call.emplace_back(w, 0);
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = count;
        } while (w != v);
        ++count;
      }
      const std::size_t done = v;
      call.pop_back();
      if (!call.empty()) {
        const std::size_t parent = call.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
    }
  }
  return comp;
}

}  // namespace

StationaryResult stationary_distribution(const RateMatrix& rm) {
  const auto& q = rm.q;
  const std::size_t n = rm.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (Eigen::Index r = 0; r < q.outerSize(); ++r) {
    for (std::remove_reference_t<decltype(q)>::InnerIterator it(q, r); it; ++it) {
      if (it.col() != r && it.value() > 0) adj[r].push_back(static_cast<std::size_t>(it.col()));
    }
  }
  int count = 0;
  const auto comp = strongly_connected(adj, count);
  std::vector<char> closed(count, 1);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v : adj[u]) {
      if (comp[v] != comp[u]) closed[comp[u]] = 0;
    }
  }
  std::vector<std::vector<std::size_t>> members(count);
  for (std::size_t u = 0; u < n; ++u) members[comp[u]].push_back(u);

  StationaryResult out;
  std::vector<long> local(n, -1);
  for (int c = 0; c < count; ++c) {
    if (!closed[c]) {
      out.transient.insert(out.transient.end(), members[c].begin(), members[c].end());
      continue;
    }
    const auto& idx = members[c];
    const auto m = static_cast<Eigen::Index>(idx.size());
    for (Eigen::Index a = 0; a < m; ++a) local[idx[a]] = a;
    std::vector<double> law;
    if (m == 1) {
      law = {1.0};
    } else {
      // Q_C' pi = 0 with the last equation replaced by sum(pi) = 1.
      std::vector<Eigen::Triplet<double>> trips;
      for (Eigen::Index a = 0; a < m; ++a) {
        for (std::remove_reference_t<decltype(q)>::InnerIterator it(q, static_cast<Eigen::Index>(idx[a])); it; ++it) {
          const long b = local[it.col()];
          if (b < 0 || b == m - 1) continue;
          trips.emplace_back(static_cast<int>(b), static_cast<int>(a), it.value());
        }
        trips.emplace_back(static_cast<int>(m - 1), static_cast<int>(a), 1.0);
      }
      Eigen::SparseMatrix<double> A(m, m);
      A.setFromTriplets(trips.begin(), trips.end());
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
      lu.compute(A);
      if (lu.info() != Eigen::Success) throw ConsistencyError("stationary solve failed: singular class system");
      Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
      b[m - 1] = 1.0;
      const Eigen::VectorXd x = lu.solve(b);
      law.assign(x.data(), x.data() + m);
    }
    // Residual |pi_C Q_C|_inf.
    std::vector<double> flow(m, 0.0);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (std::remove_reference_t<decltype(q)>::InnerIterator it(q, static_cast<Eigen::Index>(idx[a])); it; ++it) {
        const long b = local[it.col()];
        if (b >= 0) flow[b] += law[a] * it.value();
      }
    }
    for (double f : flow) out.residual = std::max(out.residual, std::abs(f));
    for (std::size_t u : idx) local[u] = -1;
    out.closed_classes.push_back(idx);
    out.class_distributions.push_back(std::move(law));
  }
  std::sort(out.transient.begin(), out.transient.end());
  return out;
}

std::vector<double> StationaryResult::mixture(const std::vector<double>& class_weights) const {
  std::size_t n = transient.size();
  for (const auto& c : closed_classes) n += c.size();
  std::vector<double> w = class_weights;
  if (w.empty()) w.assign(closed_classes.size(), 1.0 / static_cast<double>(closed_classes.size()));
  if (w.size() != closed_classes.size()) throw DomainError("one weight per closed class is required");
  std::vector<double> out(n, 0.0);
  for (std::size_t c = 0; c < closed_classes.size(); ++c) {
    for (std::size_t a = 0; a < closed_classes[c].size(); ++a) {
      out[closed_classes[c][a]] += w[c] * class_distributions[c][a];
    }
  }
  return out;
}

std::vector<double> StationaryResult::mixture_under(const std::vector<double>& reference) const {
  std::vector<double> w;
  double total = 0.0;
  for (const auto& c : closed_classes) {
    double m = 0.0;
    for (std::size_t u : c) m += reference[u];
    w.push_back(m);
    total += m;
  }
  if (!(total > 0)) throw DomainError("reference measure gives no mass to any closed class");
  for (double& v : w) v /= total;
  return mixture(w);
}

// ---------------------------------------------------------------- balance checks

CheckResult check_detailed_balance(const RateMatrix& rm, const std::vector<double>& pi, double tol) {
  CheckResult out{"detailed_balance", rm.size(), 0.0, true, ""};
  const auto& q = rm.q;
  for (Eigen::Index r = 0; r < q.outerSize(); ++r) {
    for (std::remove_reference_t<decltype(q)>::InnerIterator it(q, r); it; ++it) {
      if (it.col() == r) continue;
      const double lhs = pi[r] * it.value();
      const double rhs = pi[it.col()] * q.coeff(it.col(), r);
      out.max_violation = std::max(out.max_violation, std::abs(lhs - rhs));
    }
  }
  out.pass = out.max_violation <= tol;
  return out;
}

SkewBalanceReport check_skew_detailed_balance(const RateMatrix& rm, const std::vector<double>& ref,
                                              const std::vector<std::size_t>& S, double tol) {
  const std::size_t n = rm.size();
  if (S.size() != n) throw DomainError("involution table size differs from the rate matrix");
  for (std::size_t u = 0; u < n; ++u) {
    if (S[S[u]] != u) throw DomainError("involution table is not an involution");
  }
  SkewBalanceReport out;
  out.measure_invariance = {"skew_measure_invariance", n, 0.0, true, ""};
  out.local_pair = {"skew_local_pair", n, 0.0, true, ""};
  out.semi_local = {"skew_semi_local", n, 0.0, true, ""};
  const auto& q = rm.q;
  for (std::size_t u = 0; u < n; ++u) {
    out.measure_invariance.max_violation = std::max(out.measure_invariance.max_violation, std::abs(ref[S[u]] - ref[u]));
    out.semi_local.max_violation = std::max(out.semi_local.max_violation, std::abs(rm.exit_rate(u) - rm.exit_rate(S[u])));
    for (std::remove_reference_t<decltype(q)>::InnerIterator it(q, static_cast<Eigen::Index>(u)); it; ++it) {
      const auto v = static_cast<std::size_t>(it.col());
      if (v == u) continue;
      const double lhs = ref[u] * it.value();
      const double rhs = ref[S[v]] * q.coeff(static_cast<Eigen::Index>(S[v]), static_cast<Eigen::Index>(S[u]));
      out.local_pair.max_violation = std::max(out.local_pair.max_violation, std::abs(lhs - rhs));
    }
  }
  for (auto* c : {&out.measure_invariance, &out.local_pair, &out.semi_local}) c->pass = c->max_violation <= tol;
  return out;
}

double generator_expectation(const RateMatrix& rm, const std::vector<double>& ref, const std::vector<double>& f) {
  if (f.size() != rm.size() || ref.size() != rm.size()) throw DomainError("dimension mismatch in generator expectation");
  const Eigen::Map<const Eigen::VectorXd> fv(f.data(), static_cast<Eigen::Index>(f.size()));
  const Eigen::Map<const Eigen::VectorXd> pv(ref.data(), static_cast<Eigen::Index>(ref.size()));
  const Eigen::VectorXd qf = rm.q * fv;
  return pv.dot(qf);
}

JumpMeasure jump_measure(const Target& target, const BalancingFunction& g) {
  const auto states = target.enumerate_states();
  std::vector<double> log_pi;
  for (const auto& x : states) log_pi.push_back(target.log_density(x));
  const double top = *std::max_element(log_pi.begin(), log_pi.end());
  std::vector<double> pi;
  double z = 0.0;
  for (double lp : log_pi) z += pi.emplace_back(std::exp(lp - top));
  for (double& p : pi) p /= z;

  JumpMeasure out;
  double zj = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    double lambda = 0.0;
    if (log_pi[i] != kNegInf) {
      for (const auto& gen : target.generators()) {
        const double there = target.log_density(target.apply(gen.id, states[i]));
        if (there != kNegInf) lambda += std::exp(log_rate(g, there - log_pi[i]));
      }
    }
    out.exit_rate.push_back(lambda);
    zj += out.measure.emplace_back(pi[i] * lambda);
  }
  if (!(zj > 0)) throw DomainError("jump measure has zero total mass");
  for (std::size_t i = 0; i < states.size(); ++i) {
    out.measure[i] /= zj;
    out.ratio.push_back(pi[i] > 0 ? out.measure[i] / pi[i] : 0.0);
  }
  return out;
}

std::vector<double> x_marginal(const EnumeratedSpace& space, const std::vector<double>& law) {
  std::vector<double> out(space.base_size(), 0.0);
  for (std::size_t u = 0; u < space.size(); ++u) out[space.x_index(u)] += law[u];
  return out;
}

std::vector<std::pair<std::string, double>> sign_marginals(const EnumeratedSpace& space,
                                                           const std::vector<double>& law) {
  std::vector<std::pair<std::string, double>> out;
  const std::size_t ng = space.target().generators().size();
  auto bit_marginal = [&](std::size_t bit) {
    double p = 0.0;
    for (std::size_t u = 0; u < space.size(); ++u) {
      if (!((space.aux_code(u) >> bit) & 1)) p += law[u];
    }
    return p;
  };
  switch (space.sampler()) {
    case SamplerKind::Zanella:
      break;
    case SamplerKind::Tabu:
      for (std::size_t k = 0; k < ng; ++k) out.emplace_back("alpha[" + std::to_string(k) + "]", bit_marginal(k));
      out.emplace_back("tau", bit_marginal(ng));
      break;
    case SamplerKind::Dzz:
      for (std::size_t r = 0; r < space.reduced().size(); ++r) {
        out.emplace_back("theta[" + std::to_string(r) + "]", bit_marginal(r));
      }
      break;
    case SamplerKind::Dcs:
      out.emplace_back("tau", bit_marginal(0));
      break;
  }
  return out;
}

std::vector<double> velocity_marginal(const EnumeratedSpace& space, const std::vector<double>& law) {
  if (space.sampler() != SamplerKind::Dcs) throw DomainError("velocity marginal is defined for dCS only");
  std::vector<double> out(space.target().generators().size(), 0.0);
  for (std::size_t u = 0; u < space.size(); ++u) out[space.aux_code(u) / 2] += law[u];
  return out;
}

CheckResult check_invariance(const EnumeratedSpace& space, const StationaryResult& st, double tol) {
  const auto& ref = space.reference();
  CheckResult out{"stationarity", space.size(), 0.0, true, ""};
  for (std::size_t c = 0; c < st.closed_classes.size(); ++c) {
    const auto& idx = st.closed_classes[c];
    double mass = 0.0;
    for (std::size_t u : idx) mass += ref[u];
    if (mass == 0.0) continue;
    std::vector<double> expect;
    for (std::size_t u : idx) expect.push_back(ref[u] / mass);
    out.max_violation = std::max(out.max_violation, tv(expect, st.class_distributions[c]));
  }
  double transient_mass = 0.0;
  for (std::size_t u : st.transient) transient_mass += ref[u];
  out.max_violation = std::max(out.max_violation, transient_mass);
  out.pass = out.max_violation <= tol;
  out.note = std::to_string(st.closed_classes.size()) + " closed class(es), " + std::to_string(st.transient.size()) +
             " transient state(s)";
  if (!st.irreducible()) out.note += "; reducible: invariance checked per closed class";
  return out;
}

std::vector<CheckResult> verify_sampler(const Target& target, SamplerKind kind, const SamplerOptions& options,
                                        std::uint64_t size_cap, double tol, std::uint64_t seed) {
  const EnumeratedSpace space(kind, target, options, size_cap);
  const RateMatrix q = build_rate_matrix(space);
  const StationaryResult st = stationary_distribution(q);
  std::vector<CheckResult> rows;
  rows.push_back(check_invariance(space, st, tol));
  rows.push_back({"stationary_residual", space.size(), st.residual, st.residual <= tol, ""});
  const auto law = st.mixture_under(space.reference());
  rows.push_back({"x_marginal_tv", space.size(), tv(x_marginal(space, law), space.base_probabilities()), false,
                  space.truncated() ? "target renormalized within its truncation window" : ""});
  rows.back().pass = rows.back().max_violation <= tol;
  if (kind != SamplerKind::Zanella) {
    double worst = 0.0;
    for (const auto& [name, p] : sign_marginals(space, law)) worst = std::max(worst, std::abs(p - 0.5));
    if (kind == SamplerKind::Dcs) {
      const auto vm = velocity_marginal(space, law);
      for (std::size_t k = 0; k < vm.size(); ++k) worst = std::max(worst, std::abs(vm[k] - space.psi()[k]));
    }
    rows.push_back({"auxiliary_uniformity", space.size(), worst, worst <= tol, ""});
  }
  switch (kind) {
    case SamplerKind::Zanella:
      rows.push_back(check_detailed_balance(q, space.reference(), tol));
      break;
    case SamplerKind::Tabu: {
      const auto rep = check_skew_detailed_balance(q, space.reference(), space.involution(), tol);
      rows.insert(rows.end(), {rep.measure_invariance, rep.local_pair, rep.semi_local});
      break;
    }
    case SamplerKind::Dzz: {
      const auto rep = check_skew_detailed_balance(q, space.reference(), space.involution(), tol);
      rows.insert(rows.end(), {rep.measure_invariance, rep.local_pair, rep.semi_local});
      Eigen::SparseMatrix<double, Eigen::RowMajor> sum(q.q.rows(), q.q.cols());
      double single_worst = 0.0;
      bool single_pass = true;
      for (std::size_t r = 0; r < space.reduced().size(); ++r) {
        RateMatrixOptions one;
        one.only_generator = r;
        const RateMatrix qr = build_rate_matrix(space, one);
        sum += qr.q;
        const auto sr = check_skew_detailed_balance(qr, space.reference(), space.involution(r), tol);
        single_pass = single_pass && sr.pass();
        single_worst = std::max({single_worst, sr.measure_invariance.max_violation, sr.local_pair.max_violation,
                                 sr.semi_local.max_violation});
      }
      Eigen::SparseMatrix<double, Eigen::RowMajor> diff = q.q - sum;
      double sup = 0.0;
      for (Eigen::Index r = 0; r < diff.outerSize(); ++r) {
        for (decltype(diff)::InnerIterator it(diff, r); it; ++it) sup = std::max(sup, std::abs(it.value()));
      }
      rows.push_back({"dzz_superposition", space.size(), sup, sup <= tol, ""});
      rows.push_back({"dzz_single_generator_skew_balance", space.size(), single_worst, single_pass, ""});
      break;
    }
    case SamplerKind::Dcs: {
      Philox4x32 rng(seed, 0);
      double worst = 0.0;
      for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> f(space.size());
        for (double& v : f) v = rng.normal();
        worst = std::max(worst, std::abs(generator_expectation(q, space.reference(), f)));
      }
      rows.push_back({"dcs_generator_expectation", space.size(), worst, worst <= tol, "100 random f"});
      break;
    }
  }
  return rows;
}

void write_checks_csv(const std::filesystem::path& path, const std::vector<CheckResult>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "check,space_size,max_violation,pass,note\n";
  for (const auto& r : rows) {
    out << r.name << ',' << r.space_size << ',' << format_double(r.max_violation) << ',' << (r.pass ? "pass" : "fail")
        << ",\"" << r.note << "\"\n";
  }
}

}  // namespace jumpmc
