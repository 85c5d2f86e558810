#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "test_support.hpp"
#include "uql/analyzer.hpp"
#include "uql/families.hpp"
#include "uql/instances.hpp"

using namespace uql;
using uql::testing::naive_stats;
using uql::testing::random_restriction;
using uql::testing::random_table;

namespace {

void check_provider(const BooleanFunction& f, const Restriction& pi) {
  REQUIRE(f.provider() != nullptr);
  const auto got = f.provider()->stats(pi);
  REQUIRE(got.has_value());
  const auto want = naive_stats(f, pi);
  CHECK(got->expectation == doctest::Approx(want.expectation).epsilon(1e-12));
  CHECK(got->bias == doctest::Approx(want.bias).epsilon(1e-12));
  for (int i = 0; i < f.arity(); ++i) {
    CHECK(std::abs(got->influence[static_cast<std::size_t>(i)] - want.influence[static_cast<std::size_t>(i)]) <= 1e-12);
  }
}

}  // namespace

TEST_CASE("restriction composition and application") {
  const Restriction a = Restriction().with(0, true).with(2, false);
  CHECK(a.size() == 2);
  CHECK(a.to_string(4) == "1*0*");
  CHECK(a.apply(0b1111) == 0b1011);
  CHECK_THROWS_AS(a.with(0, false), ConfigError);
  const Restriction b = Restriction().with(1, true);
  CHECK(a.compose(b).to_string(3) == "110");
  CHECK_THROWS_AS(a.compose(a), ConfigError);
  CHECK_THROWS_AS(Restriction(0b01, 0b10), ConfigError);
}

TEST_CASE("truth table hex round trip and digit counts") {
  Rng rng(7);
  for (int n = 0; n <= 10; ++n) {
    const TruthTable t = random_table(n, rng);
    const std::string hex = t.to_hex();
    CHECK(hex.size() == std::max<std::size_t>(1, (std::size_t{1} << n) / 4));
    CHECK(TruthTable::from_hex(n, hex) == t);
  }
  // AND_2 is 1 only at x = 3: integer 8.
  CHECK(truth_table(and_function(2)).to_hex() == "8");
  CHECK_THROWS_AS(TruthTable::from_hex(3, "f"), ConfigError);
  CHECK_THROWS_AS(TruthTable::from_hex(2, "g"), ConfigError);
  CHECK_THROWS_AS(TruthTable::from_hex(1, "f"), ConfigError);
}

TEST_CASE("pivotal counts and compaction match pointwise evaluation") {
  Rng rng(11);
  for (int n = 1; n <= 9; ++n) {
    const TruthTable t = random_table(n, rng);
    const BooleanFunction f = BooleanFunction::from_table(t);
    const auto s = naive_stats(f, Restriction());
    for (int i = 0; i < n; ++i) {
      CHECK(std::ldexp(static_cast<double>(t.pivotal_count(i)), -n) == s.influence[static_cast<std::size_t>(i)]);
    }
    const Restriction pi = random_restriction(n, rng);
    const TruthTable c = t.compact(pi);
    CHECK(c.arity() == n - pi.size());
    std::uint64_t k = 0;
    for (Input x = 0; x < (Input{1} << n); ++x) {
      if ((x & pi.mask()) != pi.values()) continue;
      CHECK(c.get(k++) == t.get(x));
    }
  }
}

TEST_CASE("named function examples") {
  const auto maj = named_function("maj(3)");
  for (int i = 0; i < 3; ++i) CHECK(influence(maj, i) == 0.5);
  CHECK(total_influence(named_function("parity(5)")) == 5.0);
  CHECK(total_influence(named_function("const(4,1)")) == 0.0);
  CHECK(distance(named_function("thr(4,4)"), and_function(4)) == 0.0);
  CHECK(distance(named_function("profile(0000)"), constant_function(3, false)) == 0.0);
  CHECK(bias(named_function("profile(1111)")) == 0.0);
  CHECK(influence(named_function("dictator(3,1)"), 1) == 1.0);
  CHECK(influence(named_function("dictator(3,1)"), 0) == 0.0);
  CHECK_THROWS_AS(named_function("maj"), ConfigError);
  CHECK_THROWS_AS(named_function("maj(x)"), ConfigError);
  CHECK_THROWS_AS(named_function("thr(3)"), ConfigError);
  CHECK_THROWS_AS(named_function("blah(3)"), ConfigError);
  CHECK_THROWS_AS(named_function("profile(012)"), ConfigError);
}

TEST_CASE("evaluation checks arity and bit values") {
  const auto f = and_function(3);
  CHECK(evaluate(f, std::vector<int>{1, 1, 1}));
  CHECK_FALSE(evaluate(f, std::vector<int>{1, 0, 1}));
  CHECK_THROWS_AS(evaluate(f, std::vector<int>{1, 1}), ConfigError);
  CHECK_THROWS_AS(evaluate(f, std::vector<int>{1, 2, 1}), ConfigError);
  CHECK_THROWS_AS(evaluate(f, Input{0b1000}), ConfigError);
}

TEST_CASE("restrict keeps arity and reindexes nothing") {
  const auto f = majority_function(3);
  const auto g = restrict(f, Restriction().with(0, true));
  CHECK(g.arity() == 3);
  CHECK(influence(g, 0) == 0.0);
  CHECK(influence(g, 1) == 0.5);
  CHECK(expectation(g) == 0.75);
  const auto h = restrict(BooleanFunction::from_table(truth_table(f)), Restriction().with(0, true));
  CHECK(distance(g, h) == 0.0);
}

TEST_CASE("symmetric provider matches enumeration on random profiles and restrictions") {
  Rng rng(3);
  for (int n = 1; n <= 12; ++n) {
    for (int rep = 0; rep < 4; ++rep) {
      std::vector<std::uint8_t> p(static_cast<std::size_t>(n) + 1);
      for (auto& v : p) v = static_cast<std::uint8_t>(rng() & 1U);
      const auto f = symmetric_function(p);
      check_provider(f, Restriction());
      check_provider(f, random_restriction(n, rng));
    }
  }
}

TEST_CASE("tribes provider matches enumeration") {
  Rng rng(5);
  for (int w = 1; w <= 2; ++w) {
    const auto f = tribes_function(w);
    check_provider(f, Restriction());
    for (int rep = 0; rep < 50; ++rep) check_provider(f, random_restriction(f.arity(), rng));
  }
  for (double v : influence_profile(tribes_function(2)).per_coordinate) CHECK(v == 27.0 / 128.0);
  const auto f3 = tribes_function(3);
  for (int rep = 0; rep < 5; ++rep) check_provider(f3, random_restriction(f3.arity(), rng));
}

TEST_CASE("address provider matches enumeration") {
  Rng rng(9);
  const auto f = address_function(1);
  check_provider(f, Restriction());
  for (int rep = 0; rep < 60; ++rep) check_provider(f, random_restriction(f.arity(), rng));
  const auto p = influence_profile(f);
  CHECK(p.per_coordinate[0] == 0.5);
  for (int i = 1; i < 5; ++i) CHECK(p.per_coordinate[static_cast<std::size_t>(i)] == 0.5);
  const auto f2 = address_function(2);
  CHECK(total_influence(f2) == 0.5 * 2 + 4);
  for (int rep = 0; rep < 10; ++rep) {
    Restriction pi = random_restriction(f2.arity(), rng);
    // Keep the enumeration small: fix most action bits.
    for (int i = 2; i < f2.arity(); ++i) {
      if (!pi.fixes(i) && (rng() % 4) != 0) pi = pi.with(i, (rng() & 1U) != 0);
    }
    check_provider(f2, pi);
  }
}

TEST_CASE("hard instance provider matches enumeration") {
  Rng rng(13);
  const auto f = hard_instance_function(1);
  check_provider(f, Restriction());
  for (int rep = 0; rep < 80; ++rep) check_provider(f, random_restriction(f.arity(), rng));
  const auto f2 = hard_instance_function(2);
  for (int rep = 0; rep < 10; ++rep) {
    Restriction pi = random_restriction(f2.arity(), rng);
    for (int i = 4; i < f2.arity(); ++i) {
      if (!pi.fixes(i) && (rng() % 4) != 0) pi = pi.with(i, (rng() & 1U) != 0);
    }
    check_provider(f2, pi);
  }
}

TEST_CASE("hard instance influence profile and balance") {
  for (int k = 1; k <= 2; ++k) {
    const auto f = hard_instance_function(k);
    const auto l = hard_instance_layout(k);
    const auto p = influence_profile(f);
    CHECK(p.total <= 4.0);
    for (int i = l.control_offset; i < l.action_offset; ++i) {
      CHECK(p.per_coordinate[static_cast<std::size_t>(i)] == std::ldexp(1.0, -(k + 1)));
    }
    for (int i = l.action_offset; i < l.arity; ++i) {
      CHECK(p.per_coordinate[static_cast<std::size_t>(i)] == std::ldexp(1.0, -k) / l.side);
    }
    // Prefix-zero restrictions of the list keep the expectation in [1/4, 3/4].
    Restriction pi;
    for (int i = 0; i <= k; ++i) {
      const auto s = f.provider()->stats(pi);
      REQUIRE(s.has_value());
      CHECK(s->expectation >= 0.25);
      CHECK(s->expectation <= 0.75);
      if (i < k) pi = pi.with(i, false);
    }
  }
  // Exact list influences at k = 1 against pointwise evaluation.
  const auto f = hard_instance_function(1);
  CHECK(influence(f, 0) == naive_stats(f, Restriction()).influence[0]);
}

TEST_CASE("sampling paths are explicit and flagged") {
  const auto big = BooleanFunction(24, [](Input x) { return (x & 1U) != 0; });
  CHECK_THROWS_AS(distance(big, big), ConfigError);
  CHECK(distance(big, big, SampleSpec{1000, 1}) == 0.0);
  CHECK(expectation(big, SampleSpec{20000, 2}) == doctest::Approx(0.5).epsilon(0.05));
  StatsOptions opts;
  opts.enumeration_cap = 4;
  CHECK_THROWS_AS(restricted_stats(big, Restriction(), opts), ConfigError);
  opts.samples = 4000;
  opts.seed = 3;
  const auto s = restricted_stats(big, Restriction(), opts);
  CHECK(s.approximate);
  CHECK(s.influence[0] == 1.0);
  CHECK(s.influence[1] == 0.0);
  const auto s2 = restricted_stats(big, Restriction(), opts);
  CHECK(s2.expectation == s.expectation);
  CHECK(estimate_influence(majority_function(5), 0, 20000, 4) == doctest::Approx(0.375).epsilon(0.05));
}

TEST_CASE("analyzer caches agree with direct computation") {
  Rng rng(17);
  const auto f = BooleanFunction::from_table(random_table(6, rng));
  RestrictionAnalyzer a(f);
  for (int rep = 0; rep < 50; ++rep) {
    const auto pi = random_restriction(6, rng);
    const auto want = naive_stats(f, pi);
    const auto got = a.stats(pi);
    CHECK(got->expectation == want.expectation);
    for (int i = 0; i < 6; ++i) CHECK(got->influence[static_cast<std::size_t>(i)] == want.influence[static_cast<std::size_t>(i)]);
    CHECK(a.stats(pi) == got);
  }
}
