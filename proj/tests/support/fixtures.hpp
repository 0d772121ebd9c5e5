#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "jumpmc/statespace.hpp"

namespace fixtures {

struct NamedModel {
  std::string name;
  std::unique_ptr<jumpmc::Target> target;
};

/// Small instances of the seven model families (SK, BVS, permutation,
/// facility, DPP, lattice Gaussian, gauge).
std::vector<NamedModel> seven_models();

/// A random state with finite log density.
jumpmc::State random_state(const jumpmc::Target& target, std::mt19937_64& gen);

}  // namespace fixtures
