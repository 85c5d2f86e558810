#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "uql/boolfn.hpp"
#include "uql/costsim.hpp"
#include "uql/dtree.hpp"

namespace uql {

struct Instance {
  BooleanFunction function;
  CostVector costs;
  std::string label;
  std::uint64_t seed = 0;
};

// Smallest multiple of beta that is at least c.
double quantize_up(double c, double beta);

// AND_n with a seeded uniform permutation of {1..n} as costs.
Instance and_instance(int n, std::uint64_t seed);

// Tribes of width w; each tribe gets its own seeded permutation of {1..w}.
Instance tribes_instance(int w, std::uint64_t seed);

// Address function with cost scale * Inf_i quantized up to the beta grid:
// control bits 0.5 scale, action bits 2^-k scale.
Instance address_instance(int k, double beta, double scale = 1.0);

// Hard instance: list bits cost beta, control bits scale, action bits
// 2^-k scale, quantized up to the beta grid. k must be 1 or 2.
Instance hard_instance(int k, double beta, double scale = 1.0);

// Two-phase strategy for the hard instance as a tree: read list bits in order
// until one is 1, and on z = 0 read the control bits, then the selected row.
DecisionTree hard_instance_witness_tree(int k);

// "and(n)", "or(n)", "maj(n)", "thr(n,t)", "parity(n)", "dictator(n,i)",
// "const(n,b)", "profile(0011)" (symmetric profile, weight 0 first),
// "tribes(w)", "address(k)", "hard(k)".
BooleanFunction named_function(std::string_view spec);

}  // namespace uql
