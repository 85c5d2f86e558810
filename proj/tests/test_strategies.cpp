#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "test_support.hpp"
#include "uql/experiments.hpp"
#include "uql/families.hpp"
#include "uql/instances.hpp"
#include "uql/oracle.hpp"
#include "uql/strategies.hpp"

using namespace uql;

namespace {

StrategyConfig with_eps(double eps) {
  StrategyConfig c;
  c.epsilon = eps;
  return c;
}

CostAndError exact_eval(const Strategy& s, const BooleanFunction& f, const CostVector& c, double beta) {
  return avg_cost_and_error(s, f, c, beta, EvalMode::exhaustive(), {}, 1);
}

}  // namespace

TEST_CASE("config validation") {
  const auto a = make_analyzer(and_function(2));
  CHECK_THROWS_AS(warmup_iprr(a, with_eps(0.0)), ConfigError);
  CHECK_THROWS_AS(warmup_iprr(a, with_eps(0.6)), ConfigError);
  CHECK_THROWS_AS(iprr(a, with_eps(0.1)), ConfigError);
  StrategyConfig bad = with_eps(0.1);
  bad.budget = -1.0;
  CHECK_THROWS_AS(iprr(a, bad), ConfigError);
  StrategyRequest req{"nope", with_eps(0.1), std::nullopt};
  CHECK_THROWS_AS(make_strategy(req, and_function(2), CostVector{1, 1}), ConfigError);
  req.name = "follow-tree";
  CHECK_THROWS_AS(make_strategy(req, and_function(2), CostVector{1, 1}), ConfigError);
}

TEST_CASE("constant functions cost nothing") {
  const auto f = constant_function(3, true);
  const auto a = make_analyzer(f);
  const CostVector c{1, 1, 1};
  StrategyConfig ic = with_eps(0.1);
  ic.budget = 4.0;
  for (const auto& s : {warmup_iprr(a, with_eps(0.1)), iprr(a, ic), round_robin(a, with_eps(0.1)),
                        cheapest_first_offline(a, c)}) {
    const auto r = exact_eval(*s, f, c, 0.5);
    CHECK(r.avg_cost == 0.0);
    CHECK(r.error == 0.0);
  }
  const auto oq = online_query(a, with_eps(0.1));
  const auto r = run(*oq, f, 0b101, c, 0.5, 3);
  CHECK(r.total_cost == 0.0);
  CHECK(r.output);
}

TEST_CASE("argmax rules") {
  const auto f = parity_function(3);
  class Probe final : public Strategy {
   public:
    std::string name() const override { return "probe"; }
    bool execute(Session& s, Rng&) const override {
      // theta = 0 with positive influence beats any ratio, zero influence never wins.
      CHECK(influence_argmax(s, {0.5, 0.0, 0.25}, TieBreak::LowestIndex) == 0);
      CHECK(influence_argmax(s, {0.5, 0.0, 0.5}, TieBreak::HighestIndex) == 2);
      s.invest(0);
      CHECK(influence_argmax(s, {0.5, 0.0, 0.25}, TieBreak::LowestIndex) == 2);
      s.invest(2);
      s.invest(2);
      // 0.5/1 vs 0.25/2
      CHECK(influence_argmax(s, {0.5, 0.0, 0.25}, TieBreak::LowestIndex) == 0);
      CHECK(influence_argmax(s, {0.0, 0.0, 0.0}, TieBreak::LowestIndex) == -1);
      return false;
    }
  } probe;
  run(probe, f, 0, CostVector{10, 10, 10}, 1.0);
}

TEST_CASE("cheapest-first examples") {
  const auto f = and_function(2);
  const auto a = make_analyzer(f);
  CHECK(exact_eval(*cheapest_first_offline(a, CostVector{1, 2}), f, CostVector{1, 2}, 1.0).avg_cost == 2.0);
  CHECK(exact_eval(*cheapest_first_offline(a, CostVector{2, 1}), f, CostVector{2, 1}, 1.0).avg_cost == 2.0);
  const auto inst = and_instance(3, 42);
  const auto r = exact_eval(*cheapest_first_offline(make_analyzer(inst.function), inst.costs), inst.function,
                            inst.costs, 1.0);
  CHECK(r.avg_cost == 2.75);
  CHECK(r.error == 0.0);
}

TEST_CASE("follow-the-tree examples") {
  const auto chain = DecisionTree::query(0, DecisionTree::leaf(false),
                                         DecisionTree::query(1, DecisionTree::leaf(false), DecisionTree::leaf(true)));
  const auto f = and_function(2);
  const auto r = run(*follow_tree(chain), f, 0b11, CostVector{1, 1}, 1.0);
  CHECK(r.total_cost == 2.0);
  CHECK(r.output);
  CHECK(run(*follow_tree(DecisionTree::leaf(true)), f, 0, CostVector{1, 1}, 1.0).total_cost == 0.0);
  const auto pruned = exact_eval(*follow_pruned_tree(chain, f, 0.9), f, CostVector{1, 1}, 1.0);
  CHECK(pruned.avg_cost == 0.0);
  CHECK(pruned.error == 0.25);
  const auto tiny = exact_eval(*follow_pruned_tree(chain, f, 1e-9), f, CostVector{1, 1}, 1.0);
  CHECK(tiny.avg_cost == exact_eval(*follow_tree(chain), f, CostVector{1, 1}, 1.0).avg_cost);
  CHECK(tiny.error == 0.0);
}

TEST_CASE("iprr with a huge budget queries exhaustively") {
  const auto f = parity_function(2);
  StrategyConfig c = with_eps(0.1);
  c.budget = 1e6;
  const auto r = exact_eval(*iprr(make_analyzer(f), c), f, CostVector{1, 1}, 1.0);
  CHECK(r.error == 0.0);
  CHECK(r.avg_cost == 2.0);
}

TEST_CASE("round-robin on a single coordinate matches warmup") {
  const auto f = dictator_function(1, 0);
  const auto a = make_analyzer(f);
  for (double cost : {0.0, 0.3, 1.0, 2.5}) {
    const CostVector c{cost};
    CHECK(exact_eval(*round_robin(a, with_eps(0.1)), f, c, 0.25).avg_cost ==
          exact_eval(*warmup_iprr(a, with_eps(0.1)), f, c, 0.25).avg_cost);
  }
}

TEST_CASE("warmup reveals symmetric functions in ascending cost order") {
  Rng rng(31);
  const double beta = 0.25;
  for (int rep = 0; rep < 60; ++rep) {
    const int n = 1 + static_cast<int>(uniform_below(rng, 5));
    std::vector<std::uint8_t> p(static_cast<std::size_t>(n) + 1);
    for (auto& v : p) v = static_cast<std::uint8_t>(rng() & 1U);
    const auto f = symmetric_function(p);
    CostVector c(static_cast<std::size_t>(n));
    for (auto& v : c) v = static_cast<double>(1 + uniform_below(rng, 8)) * beta;
    const auto s = warmup_iprr(make_analyzer(f), with_eps(0.1));
    for (Input x = 0; x < (Input{1} << n); ++x) {
      const auto r = run(*s, f, x, c, beta);
      for (std::size_t k = 1; k < r.reveal_order.size(); ++k) {
        const int a = r.reveal_order[k - 1].first;
        const int b = r.reveal_order[k].first;
        const double ca = c[static_cast<std::size_t>(a)];
        const double cb = c[static_cast<std::size_t>(b)];
        CHECK((ca < cb || (ca == cb && a < b)));
      }
    }
  }
}

TEST_CASE("tie-break rule keeps the output and moves the cost by at most (n-1) beta") {
  Rng rng(37);
  const double beta = 0.25;
  for (int rep = 0; rep < 60; ++rep) {
    const int n = 1 + static_cast<int>(uniform_below(rng, 4));
    std::vector<std::uint8_t> p(static_cast<std::size_t>(n) + 1);
    for (auto& v : p) v = static_cast<std::uint8_t>(rng() & 1U);
    const auto f = symmetric_function(p);
    CostVector c(static_cast<std::size_t>(n));
    for (auto& v : c) v = static_cast<double>(1 + uniform_below(rng, 8)) * beta;
    const auto a = make_analyzer(f);
    StrategyConfig lo = with_eps(0.1);
    StrategyConfig hi = lo;
    hi.tie_break = TieBreak::HighestIndex;
    const auto sl = warmup_iprr(a, lo);
    const auto sh = warmup_iprr(a, hi);
    for (Input x = 0; x < (Input{1} << n); ++x) {
      const auto rl = run(*sl, f, x, c, beta);
      const auto rh = run(*sh, f, x, c, beta);
      CHECK(rl.output == rh.output);
      // Equal-theta ties decide which coordinate carries the last step.
      CHECK(std::abs(rl.total_cost - rh.total_cost) <= (n - 1) * beta);
    }
  }
}

TEST_CASE("warmup on the hard instance reads every list bit when z = 0") {
  for (int k = 1; k <= 2; ++k) {
    const Instance inst = hard_instance(k, 1.0 / 64);
    const auto s = warmup_iprr(make_analyzer(inst.function), with_eps(0.2));
    Rng rng(41);
    for (int rep = 0; rep < 40; ++rep) {
      const Input x = uniform_input(rng, inst.function.arity()) & ~low_mask(k);
      const auto r = run(*s, inst.function, x, inst.costs, 1.0 / 64);
      for (int i = 0; i < k; ++i) {
        CHECK(std::any_of(r.reveal_order.begin(), r.reveal_order.end(), [&](const auto& e) { return e.first == i; }));
      }
    }
  }
}

TEST_CASE("online-query examples") {
  const auto f = and_function(2);
  const auto s = online_query(make_analyzer(f), with_eps(0.1));
  for (Input x = 0; x < 4; ++x) {
    const auto a = run(*s, f, x, CostVector{1, 1}, 0.5, 77);
    const auto b = run(*s, f, x, CostVector{1, 1}, 0.5, 77);
    CHECK(a.output == f(x));
    CHECK(a.total_cost == b.total_cost);
    CHECK(a.reveal_order == b.reveal_order);
    CHECK(a.total_cost <= 2.0);
    CHECK(a.wasted_invests == 0);
  }
}

TEST_CASE("warmup and iprr guarantees on random small instances") {
  const double beta = 0.25;
  for (const auto& inst : random_small_instances(40, 99, beta)) {
    const auto& f = inst.function;
    const auto a = make_analyzer(f);
    for (double eps : {0.1, 0.25}) {
      const auto w = exact_eval(*warmup_iprr(a, with_eps(eps)), f, inst.costs, beta);
      CHECK(w.error <= eps);
      CHECK(w.avg_cost <= warmup_iprr_bound(f, beta, eps, opt_worst_0(f, inst.costs).value) + 1e-9);
      const double ow = opt_worst_eps(f, inst.costs, eps);
      StrategyConfig c = with_eps(eps);
      c.budget = ow > 0.0 ? ow : beta;
      CHECK(exact_eval(*iprr(a, c), f, inst.costs, beta).error <= 2 * eps);
    }
  }
}
