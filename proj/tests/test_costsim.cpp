#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <functional>

#include "uql/costsim.hpp"
#include "uql/families.hpp"
#include "uql/io.hpp"

using namespace uql;

namespace {

// Strategy driven by a callback, for exercising the session protocol.
class Scripted final : public Strategy {
 public:
  explicit Scripted(std::function<bool(Session&, Rng&)> body, bool randomized = false)
      : body_(std::move(body)), randomized_(randomized) {}
  std::string name() const override { return "scripted"; }
  bool randomized() const override { return randomized_; }
  bool execute(Session& s, Rng& rng) const override { return body_(s, rng); }

 private:
  std::function<bool(Session&, Rng&)> body_;
  bool randomized_;
};

bool reveal(Session& s, int i) {
  while (!s.revealed(i)) s.invest(i);
  return *s.revealed(i);
}

}  // namespace

TEST_CASE("reveal rule examples") {
  InvestmentState st(1, 0.5);
  const CostVector c{1.2};
  CHECK_FALSE(invest(st, 0, 1, c).has_value());
  CHECK_FALSE(invest(st, 0, 1, c).has_value());
  const auto ev = invest(st, 0, 1, c);
  REQUIRE(ev.has_value());
  CHECK(ev->theta == 1.5);
  CHECK(ev->bit);
  CHECK(*st.reveal_cost[0] == 1.5);

  InvestmentState zero(1, 0.25);
  const auto first = invest(zero, 0, 0, CostVector{0.0});
  REQUIRE(first.has_value());
  CHECK(first->theta == 0.25);

  InvestmentState never(1, 1.0);
  for (int k = 0; k < 100; ++k) CHECK_FALSE(invest(never, 0, 0, CostVector{kNeverReveals}).has_value());
  CHECK_THROWS_AS(invest(never, 1, 0, CostVector{1.0}), ConfigError);
  CHECK_THROWS_AS(InvestmentState(1, 0.0), ConfigError);
}

TEST_CASE("run records account for every invest") {
  const auto f = and_function(3);
  const CostVector c{1.0, 2.0, 0.5};
  Scripted s([](Session& ss, Rng&) {
    const bool a = reveal(ss, 2);
    const bool b = reveal(ss, 0);
    return a && b && reveal(ss, 1);
  });
  const RunRecord r = run(s, f, 0b111, c, 0.5);
  CHECK(r.output);
  CHECK(r.total_cost == 3.5);
  double sum = 0.0;
  for (double v : r.per_variable_theta) sum += v;
  CHECK(sum == r.total_cost);
  REQUIRE(r.reveal_order.size() == 3);
  CHECK(r.reveal_order[0].first == 2);
  CHECK(r.reveal_order[1].first == 0);
  CHECK(r.wasted_invests == 0);
  const Json j = run_record_to_json(r);
  CHECK(j.begin().key() == "output");
  CHECK(j["total_cost"].get<double>() == 3.5);
}

TEST_CASE("invalid costs and inputs are rejected") {
  const auto f = and_function(2);
  Scripted s([](Session&, Rng&) { return false; });
  CHECK_THROWS_AS(run(s, f, 0, CostVector{1.0}, 1.0), ConfigError);
  CHECK_THROWS_AS(run(s, f, 0, CostVector{1.0, -1.0}, 1.0), ConfigError);
  CHECK_THROWS_AS(run(s, f, 0b100, CostVector{1.0, 1.0}, 1.0), ConfigError);
  CHECK_THROWS_AS(run(s, f, 0, CostVector{1.0, 1.0}, -1.0), ConfigError);
}

TEST_CASE("wasted invests and step limits") {
  const auto f = and_function(1);
  Scripted waste([](Session& s, Rng&) {
    reveal(s, 0);
    s.invest(0);
    return true;
  });
  CHECK(run(waste, f, 1, CostVector{1.0}, 1.0).wasted_invests == 1);

  Scripted forever([](Session& s, Rng&) {
    for (;;) s.invest(0);
    return true;
  });
  RunOptions opts;
  opts.step_limit = 50;
  CHECK_THROWS_AS(run(forever, f, 1, CostVector{kNeverReveals}, 1.0, 0, opts), StepLimitExceeded);
  const auto trials = run_trials(forever, f, CostVector{kNeverReveals}, 1.0, EvalMode::exhaustive(), opts);
  REQUIRE(trials.size() == 2);
  CHECK(trials[0].step_limit);
  const std::string csv = trials_csv(trials, 1);
  CHECK(csv.find("step_limit") != std::string::npos);
}

TEST_CASE("sessions cannot be used after the run halts") {
  const auto f = and_function(1);
  std::optional<Session> leaked;
  Scripted leak([&](Session& s, Rng&) {
    leaked = s;
    return false;
  });
  run(leak, f, 0, CostVector{1.0}, 1.0);
  REQUIRE(leaked.has_value());
  CHECK_THROWS_AS(leaked->invest(0), ContractViolation);
  CHECK_THROWS_AS(leaked->simulate(0), ContractViolation);
}

TEST_CASE("nested sessions follow the three reveal cases") {
  const auto f = parity_function(2);
  const CostVector c{1.0, 2.0};
  Scripted s([](Session& outer, Rng&) {
    // Case 3: the simulation pushes the real investment up to its level.
    Session sim = outer.simulate(0b11);
    sim.invest(0);
    CHECK(outer.theta(0) == 0.5);
    CHECK_FALSE(sim.revealed(0));
    sim.invest(0);
    CHECK(outer.theta(0) == 1.0);
    REQUIRE(sim.revealed(0));
    CHECK(*sim.revealed(0));  // the simulated input's bit
    CHECK(outer.revealed(0));
    CHECK_FALSE(*outer.revealed(0));  // the real bit
    // Case 1: the real reveal is known, a second simulation reveals at the same level.
    Session sim2 = outer.simulate(0b01);
    sim2.invest(0);
    CHECK_FALSE(sim2.revealed(0));
    sim2.invest(0);
    CHECK(sim2.revealed(0));
    CHECK(outer.theta(0) == 1.0);
    // Case 2: below the real investment nothing is charged.
    Session sim3 = outer.simulate(0b00);
    sim3.invest(1);
    CHECK(outer.theta(1) == 0.5);
    Session sim4 = outer.simulate(0b00);
    sim4.invest(1);
    CHECK(outer.theta(1) == 0.5);
    CHECK_FALSE(sim4.revealed(1));
    // Replay sees the real input.
    Session real = outer.replay();
    real.invest(0);
    real.invest(0);
    REQUIRE(real.revealed(0));
    CHECK_FALSE(*real.revealed(0));
    return false;
  });
  const RunRecord r = run(s, f, 0b10, c, 0.5);
  CHECK(r.total_cost == 1.5);
  CHECK(r.steps == 3);
  CHECK(r.work_steps == 8);
}

TEST_CASE("exhaustive and Monte Carlo evaluation") {
  const auto f = and_function(2);
  Scripted cheapest([](Session& s, Rng&) { return reveal(s, 0) && reveal(s, 1); });
  const auto exact = avg_cost_and_error(cheapest, f, CostVector{1.0, 2.0}, 1.0, EvalMode::exhaustive());
  CHECK(exact.avg_cost == 2.0);
  CHECK(exact.error == 0.0);

  Scripted coin([](Session&, Rng& rng) { return (rng() & 1U) != 0; }, true);
  CHECK_THROWS_AS(avg_cost_and_error(coin, f, CostVector{1.0, 1.0}, 1.0, EvalMode::exhaustive()), ConfigError);
  CHECK_THROWS_AS(avg_cost_and_error(coin, f, CostVector{1.0, 1.0}, 1.0, EvalMode::monte_carlo(0, 1)), ConfigError);
  const auto a = avg_cost_and_error(coin, f, CostVector{1.0, 1.0}, 1.0, EvalMode::monte_carlo(5000, 9), {}, 1);
  const auto b = avg_cost_and_error(coin, f, CostVector{1.0, 1.0}, 1.0, EvalMode::monte_carlo(5000, 9), {}, 4);
  CHECK(a.error == b.error);
  CHECK(a.error == doctest::Approx(0.5).epsilon(0.05));
  const auto ta = run_trials(coin, f, CostVector{1.0, 1.0}, 1.0, EvalMode::monte_carlo(300, 2), {}, 1);
  const auto tb = run_trials(coin, f, CostVector{1.0, 1.0}, 1.0, EvalMode::monte_carlo(300, 2), {}, 3);
  CHECK(trials_csv(ta, 2) == trials_csv(tb, 2));

  const auto big = BooleanFunction(21, [](Input) { return false; });
  Scripted none([](Session&, Rng&) { return false; });
  CHECK_THROWS_AS(avg_cost_and_error(none, big, CostVector(21, 1.0), 1.0, EvalMode::exhaustive()), ConfigError);
}
