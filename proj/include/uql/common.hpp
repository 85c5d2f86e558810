#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace uql {

// Input point: bit i holds x_i. Coordinates are 0-based throughout.
using Input = std::uint64_t;

inline constexpr int kMaxArity = 64;
inline constexpr int kEnumerationCap = 20;
inline constexpr int kDpCap = 12;
inline constexpr std::int64_t kDefaultStepLimit = 10'000'000;
inline constexpr double kDefaultBeta = 1.0 / 1024.0;

// Bad parameters, malformed input, arity mismatch, cap exceeded.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A checked postcondition did not hold.
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

struct StepLimitExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool bit_of(Input x, int i) { return ((x >> i) & 1U) != 0; }

inline Input low_mask(int n) {
  return n >= 64 ? ~Input{0} : (Input{1} << n) - 1;
}

}  // namespace uql
