#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>

#include "test_support.hpp"
#include "uql/experiments.hpp"
#include "uql/families.hpp"
#include "uql/oracle.hpp"

using namespace uql;
using uql::testing::naive_stats;
using uql::testing::random_table;

namespace {

// Plain recursion over restrictions, constancy decided by pointwise
// evaluation; worst selects the max branch.
double brute_opt(const BooleanFunction& f, const CostVector& c, const Restriction& pi, bool worst,
                 std::map<std::pair<Input, Input>, double>& memo) {
  const auto key = std::make_pair(pi.mask(), pi.values());
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  const auto s = naive_stats(f, pi);
  double best = 0.0;
  if (s.bias > 0.0) {
    best = 1e300;
    for (int i = 0; i < f.arity(); ++i) {
      if (pi.fixes(i)) continue;
      const double a = brute_opt(f, c, pi.with(i, false), worst, memo);
      const double b = brute_opt(f, c, pi.with(i, true), worst, memo);
      best = std::min(best, c[static_cast<std::size_t>(i)] + (worst ? std::max(a, b) : 0.5 * (a + b)));
    }
  }
  memo[key] = best;
  return best;
}

double brute_opt(const BooleanFunction& f, const CostVector& c, bool worst) {
  std::map<std::pair<Input, Input>, double> memo;
  return brute_opt(f, c, Restriction(), worst, memo);
}

}  // namespace

TEST_CASE("zero-error DP examples") {
  CHECK(opt_avg_0(and_function(2), CostVector{1, 2}).value == 2.0);
  CHECK(opt_worst_0(and_function(2), CostVector{1, 2}).value == 3.0);
  CHECK(opt_avg_0(parity_function(2), CostVector{1, 1}).value == 2.0);
  CHECK(opt_worst_0(parity_function(2), CostVector{1, 1}).value == 2.0);
  CHECK(opt_avg_0(constant_function(3, true), CostVector{1, 1, 1}).value == 0.0);
  CHECK(opt_avg_0(majority_function(3), CostVector{1, 2, 3}).value == 4.5);
  CHECK_THROWS_AS(opt_avg_0(and_function(13), CostVector(13, 1.0)), ConfigError);
}

TEST_CASE("zero-error DP matches brute-force recursion") {
  Rng rng(43);
  for (const auto& inst : random_small_instances(60, 5, 0.125)) {
    CHECK(opt_avg_0(inst.function, inst.costs).value == doctest::Approx(brute_opt(inst.function, inst.costs, false)));
    CHECK(opt_worst_0(inst.function, inst.costs).value == doctest::Approx(brute_opt(inst.function, inst.costs, true)));
  }
  for (int rep = 0; rep < 5; ++rep) {
    const auto f = BooleanFunction::from_table(random_table(5, rng));
    CostVector c(5);
    for (auto& v : c) v = static_cast<double>(1 + uniform_below(rng, 6));
    CHECK(opt_avg_0(f, c).value == doctest::Approx(brute_opt(f, c, false)));
  }
}

TEST_CASE("witness policies replay to the DP value") {
  for (const auto& inst : random_small_instances(40, 7, 0.25)) {
    const auto opt = opt_avg_0(inst.function, inst.costs);
    const auto s = policy_strategy(opt.policy);
    const auto r = avg_cost_and_error(*s, inst.function, inst.costs, 0.25, EvalMode::exhaustive(), {}, 1);
    CHECK(r.avg_cost == opt.value);
    CHECK(r.error == 0.0);
    Policy pol;
    const auto pt = pareto_point(inst.function, inst.costs, 4.0, &pol);
    const auto rp = avg_cost_and_error(*policy_strategy(pol), inst.function, inst.costs, 0.25,
                                       EvalMode::exhaustive(), {}, 1);
    CHECK(rp.avg_cost == doctest::Approx(pt.cost));
    CHECK(rp.error == doctest::Approx(pt.error));
  }
}

TEST_CASE("benchmark chain holds on random instances") {
  for (const auto& inst : random_small_instances(40, 11, 0.25)) {
    const auto& f = inst.function;
    const auto& c = inst.costs;
    const double avg0 = opt_avg_0(f, c).value;
    const double w0 = opt_worst_0(f, c).value;
    CHECK(certificate_lower_bound(f, c) <= avg0 + 1e-12);
    CHECK(avg0 <= w0);
    CHECK(opt_worst_eps(f, c, 0.0) == w0);
    for (double eps : {0.05, 0.1, 0.25}) {
      const auto iv = opt_avg_eps(f, c, eps);
      CHECK(iv.lower <= iv.upper + 1e-12);
      CHECK(iv.upper <= avg0);
      CHECK(opt_worst_eps(f, c, eps) <= w0);
    }
  }
}

TEST_CASE("pareto frontier is monotone in lambda") {
  for (const auto& inst : random_small_instances(20, 13, 0.25)) {
    const auto pts = pareto_avg(inst.function, inst.costs, default_lambda_grid());
    for (std::size_t j = 1; j < pts.size(); ++j) {
      CHECK(pts[j].error <= pts[j - 1].error + 1e-12);
      CHECK(pts[j].cost >= pts[j - 1].cost - 1e-12);
      CHECK(pts[j].value == doctest::Approx(pts[j].lambda * pts[j].error + pts[j].cost));
    }
    CHECK(pts.back().error == 0.0);
    CHECK(pts.back().cost == doctest::Approx(opt_avg_0(inst.function, inst.costs).value));
  }
}

TEST_CASE("eps interval examples") {
  // AND_2 is within 1/4 of the constant 0.
  const auto iv = opt_avg_eps(and_function(2), CostVector{1, 1}, 0.25);
  CHECK(iv.upper == 0.0);
  CHECK(iv.lower == 0.0);
  CHECK(opt_worst_eps(and_function(2), CostVector{1, 1}, 0.25) == 0.0);
  CHECK(opt_worst_eps(parity_function(2), CostVector{1, 1}, 0.25) == 2.0);
  CHECK_THROWS_AS(opt_worst_eps(and_function(5), CostVector(5, 1.0), 0.1), ConfigError);
}

TEST_CASE("symmetric closed form matches the DP") {
  Rng rng(47);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = 1 + static_cast<int>(uniform_below(rng, 10));
    std::vector<std::uint8_t> p(static_cast<std::size_t>(n) + 1);
    for (auto& v : p) v = static_cast<std::uint8_t>(rng() & 1U);
    const auto f = symmetric_function(p);
    CostVector c(static_cast<std::size_t>(n));
    for (auto& v : c) v = static_cast<double>(1 + uniform_below(rng, 9));
    CHECK(symmetric_opt(f, c).opt == doctest::Approx(opt_avg_0(f, c).value).epsilon(1e-12));
  }
  CHECK_THROWS_AS(symmetric_stop_times(BooleanFunction(3, [](Input x) { return x == 7; }), 0.1), ConfigError);
}

TEST_CASE("stop time examples") {
  const auto par = symmetric_stop_times(parity_function(4), 0.1);
  CHECK(par.tau0[4] == 1.0);
  CHECK(par.tau_eps[4] == 1.0);
  const auto maj = symmetric_stop_times(majority_function(3), 0.25);
  CHECK(maj.tau0[2] == 0.5);
  CHECK(maj.tau0[3] == 0.5);
  CHECK(maj.tau_eps[1] == 1.0);
  CHECK_THROWS_AS(empirical_stop_time_check(and_function(4), 0.25), ConfigError);
  CHECK(empirical_stop_time_check(parity_function(4), 0.25) == 2.0);
}
