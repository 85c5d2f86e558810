#pragma once

// Brute-force reference computations shared by the test binaries. They only
// evaluate f pointwise, independent of tables, providers and caches.

#include <cmath>
#include <vector>

#include "uql/boolfn.hpp"
#include "uql/random.hpp"

namespace uql::testing {

struct NaiveStats {
  std::vector<double> influence;
  double expectation = 0.0;
  double bias = 0.0;
};

inline NaiveStats naive_stats(const BooleanFunction& f, const Restriction& pi) {
  const int n = f.arity();
  const Input free_mask = low_mask(n) & ~pi.mask();
  std::vector<std::uint64_t> pivots(static_cast<std::size_t>(n), 0);
  std::uint64_t ones = 0;
  std::uint64_t points = 0;
  Input sub = 0;
  do {
    const Input x = pi.values() | sub;
    const bool v = f(x);
    ones += v;
    ++points;
    for (int i = 0; i < n; ++i) {
      if (bit_of(free_mask, i) && f(x ^ (Input{1} << i)) != v) ++pivots[static_cast<std::size_t>(i)];
    }
    sub = (sub - free_mask) & free_mask;
  } while (sub != 0);
  NaiveStats s;
  for (auto p : pivots) s.influence.push_back(static_cast<double>(p) / static_cast<double>(points));
  s.expectation = static_cast<double>(ones) / static_cast<double>(points);
  s.bias = std::min(s.expectation, 1.0 - s.expectation);
  return s;
}

inline TruthTable random_table(int n, Rng& rng) {
  return TruthTable::tabulate(n, [&](Input) { return (rng() & 1U) != 0; });
}

// Random restriction fixing each coordinate with probability 1/2.
inline Restriction random_restriction(int n, Rng& rng) {
  const Input mask = uniform_input(rng, n);
  return Restriction(mask, uniform_input(rng, n) & mask);
}

}  // namespace uql::testing
