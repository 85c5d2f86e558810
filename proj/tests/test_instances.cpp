#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>

#include "uql/families.hpp"
#include "uql/instances.hpp"
#include "uql/oracle.hpp"
#include "uql/strategies.hpp"

using namespace uql;

TEST_CASE("and instances") {
  const auto one = and_instance(1, 5);
  CHECK(one.costs == CostVector{1.0});
  CHECK(one.label == "and-n1");
  const auto a = and_instance(6, 17);
  const auto b = and_instance(6, 17);
  CHECK(a.costs == b.costs);
  CostVector sorted = a.costs;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == CostVector{1, 2, 3, 4, 5, 6});
  CHECK(distance(a.function, and_function(6)) == 0.0);
  CHECK_THROWS_AS(and_instance(0, 1), ConfigError);
}

TEST_CASE("and instance permutations are uniform") {
  // Chi-square over the 24 orderings of n = 4; 49.73 is the 1e-3 critical
  // value for 23 degrees of freedom.
  constexpr int kDraws = 100000;
  std::map<CostVector, int> counts;
  for (int s = 0; s < kDraws; ++s) ++counts[and_instance(4, static_cast<std::uint64_t>(s)).costs];
  CHECK(counts.size() == 24);
  const double expected = kDraws / 24.0;
  double chi2 = 0.0;
  for (const auto& [perm, k] : counts) chi2 += (k - expected) * (k - expected) / expected;
  CHECK(chi2 < 49.73);
}

TEST_CASE("tribes instances") {
  const auto t1 = tribes_instance(1, 3);
  CHECK(t1.costs == CostVector{1.0, 1.0});
  CHECK(distance(t1.function, or_function(2)) == 0.0);
  const auto t2 = tribes_instance(2, 3);
  REQUIRE(t2.costs.size() == 8);
  for (int t = 0; t < 4; ++t) {
    const double a = t2.costs[static_cast<std::size_t>(2 * t)];
    const double b = t2.costs[static_cast<std::size_t>(2 * t + 1)];
    CHECK(std::min(a, b) == 1.0);
    CHECK(std::max(a, b) == 2.0);
  }
}

TEST_CASE("address and hard instance costs") {
  CHECK(quantize_up(0.3, 0.25) == 0.5);
  CHECK(quantize_up(0.5, 0.25) == 0.5);
  CHECK_THROWS_AS(quantize_up(1.0, 0.0), ConfigError);
  const auto a = address_instance(1, 1.0 / 64);
  CHECK(a.costs == CostVector{0.5, 0.5, 0.5, 0.5, 0.5});
  const auto a2 = address_instance(2, 0.1);
  const auto l2 = address_layout(2);
  CHECK(a2.costs[0] == doctest::Approx(0.5));
  CHECK(a2.costs[static_cast<std::size_t>(l2.action_offset)] == doctest::Approx(0.3));

  for (int k = 1; k <= 2; ++k) {
    const double beta = 1.0 / 64;
    const auto h = hard_instance(k, beta);
    const auto l = hard_instance_layout(k);
    REQUIRE(static_cast<int>(h.costs.size()) == l.arity);
    for (int i = 0; i < l.control_offset; ++i) CHECK(h.costs[static_cast<std::size_t>(i)] == beta);
    for (int i = l.control_offset; i < l.action_offset; ++i) CHECK(h.costs[static_cast<std::size_t>(i)] == 1.0);
    for (int i = l.action_offset; i < l.arity; ++i) {
      CHECK(h.costs[static_cast<std::size_t>(i)] == std::ldexp(1.0, -k));
    }
  }
  CHECK_THROWS_AS(hard_instance(3, 1.0 / 64), ConfigError);
  CHECK_THROWS_AS(hard_instance(0, 1.0 / 64), ConfigError);
}

TEST_CASE("hard instance witness tree computes the function") {
  for (int k = 1; k <= 2; ++k) {
    const auto t = hard_instance_witness_tree(k);
    const auto f = hard_instance_function(k);
    CHECK(distance(tree_function(t, f.arity()), f) == 0.0);
  }
  // At k = 1 the witness is optimal.
  const auto h = hard_instance(1, 1.0 / 64);
  const auto r = avg_cost_and_error(*follow_tree(hard_instance_witness_tree(1)), h.function, h.costs, 1.0 / 64,
                                    EvalMode::exhaustive(), {}, 1);
  CHECK(r.error == 0.0);
  CHECK(r.avg_cost == doctest::Approx(opt_avg_0(h.function, h.costs).value).epsilon(1e-12));
}
