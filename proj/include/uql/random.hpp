#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "uql/common.hpp"

namespace uql {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Independent stream seed for item `index` under `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Uniform integer in [0, bound). Rejection sampling so results do not depend
// on the standard library's distribution implementation.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

double uniform01(Rng& rng);

Input uniform_input(Rng& rng, int n);

// Uniform permutation of 0..n-1 (Fisher-Yates).
std::vector<int> random_permutation(Rng& rng, int n);

}  // namespace uql
