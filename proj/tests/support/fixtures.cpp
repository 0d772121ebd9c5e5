#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jumpmc/models/bvs.hpp"
#include "jumpmc/models/dpp.hpp"
#include "jumpmc/models/facility.hpp"
#include "jumpmc/models/lattice.hpp"
#include "jumpmc/models/permutation.hpp"
#include "jumpmc/models/spin.hpp"

using namespace jumpmc;

namespace fixtures {

std::vector<NamedModel> seven_models() {
  std::vector<NamedModel> out;
  out.push_back({"sk", std::make_unique<SpinSystem>(SpinSystem::sherrington_kirkpatrick(12, 3.0, 0.2, 11))});
  out.push_back({"bvs", std::make_unique<BvsModel>(BvsModel::synthetic(30, 8, 3, 0.5, 12))});
  out.push_back({"permutation", std::make_unique<PermutationModel>(PermutationModel::lognormal(7, 5.0, 13))});
  VenueSpec venue;
  venue.spacing = 0.25;
  venue.users = 30;
  FacilityParams fp;
  fp.kappa = 30;
  fp.cost_install = 0.5;
  fp.capacity = 3;
  out.push_back({"facility", std::make_unique<FacilityModel>(FacilityModel::venue(venue, fp, 14))});
  out.push_back({"dpp", std::make_unique<DppModel>(DppModel::uniform_points(12, 15))});
  out.push_back({"lattice_gaussian", std::make_unique<LatticeGaussianModel>(LatticeGaussianModel::identity(3, 7.0))});
  out.push_back({"gauge", std::make_unique<GaugeModel>(3, 3, 7, 1.5)});
  return out;
}

State random_state(const Target& target, std::mt19937_64& gen) {
  const std::string kind = target.kind();
  State x = target.default_initial_state();
  std::uniform_int_distribution<int> coin(0, 1);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    if (kind == "spin") {
      for (auto& v : x) v = coin(gen) ? 1 : -1;
    } else if (kind == "bvs" || kind == "facility") {
      for (auto& v : x) v = coin(gen);
    } else if (kind == "dpp") {
      // Small subsets keep L_X well conditioned.
      std::fill(x.begin(), x.end(), 0);
      std::uniform_int_distribution<int> item(0, static_cast<int>(x.size()) - 1);
      const int k = std::uniform_int_distribution<int>(0, 3)(gen);
      for (int i = 0; i < k; ++i) x[item(gen)] = 1;
    } else if (kind == "permutation") {
      std::iota(x.begin(), x.end(), 0);
      std::shuffle(x.begin(), x.end(), gen);
    } else if (kind == "lattice_gaussian") {
      std::uniform_int_distribution<int> z(-20, 20);
      for (auto& v : x) v = z(gen);
    } else if (kind == "gauge") {
      const auto& g = dynamic_cast<const GaugeModel&>(target);
      std::uniform_int_distribution<int> e(0, g.modulus() - 1);
      for (auto& v : x) v = e(gen);
    } else if (kind == "path") {
      x[0] = std::uniform_int_distribution<int>(0, static_cast<int>(*target.state_space_size()) - 1)(gen);
    }
    if (std::isfinite(target.log_density(x))) return x;
  }
  return target.default_initial_state();
}

}  // namespace fixtures
