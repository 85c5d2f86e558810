#pragma once

#include <cstdint>
#include <vector>

#include "uql/boolfn.hpp"

namespace uql {

// profile[w] is the value on inputs of Hamming weight w; size n+1.
BooleanFunction symmetric_function(std::vector<std::uint8_t> profile);

BooleanFunction and_function(int n);
BooleanFunction or_function(int n);
// 1 iff more than half of the inputs are 1.
BooleanFunction majority_function(int n);
// 1 iff at least t inputs are 1.
BooleanFunction threshold_function(int n, int t);
BooleanFunction parity_function(int n);
BooleanFunction constant_function(int n, bool value);
BooleanFunction dictator_function(int n, int i);

// OR of 2^w disjoint ANDs of width w; tribe t owns coordinates t*w .. t*w+w-1.
BooleanFunction tribes_function(int w);

// Coordinate layout of the address function and the hard instance.
struct AddressLayout {
  int k = 0;              // control bits, also log of the row length
  int side = 0;           // 2^k rows of 2^k action bits
  int list_bits = 0;      // hard instance only
  int control_offset = 0;
  int action_offset = 0;  // row j, column t at action_offset + j*side + t
  int arity = 0;
};

AddressLayout address_layout(int k);
AddressLayout hard_instance_layout(int k);

// Control bits select a row (bit t of the row index is control bit t); the
// output is the XOR of that row.
BooleanFunction address_function(int k);

// Alternating decision list over k list bits (rule i fires on z_i = 1 with
// label (i+1) mod 2), falling through to the address function on z = 0.
BooleanFunction hard_instance_function(int k);

}  // namespace uql
