#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uql/common.hpp"

namespace uql {

// Partial assignment: coordinate i is fixed iff bit i of mask is set, and then
// its value is bit i of values.
class Restriction {
 public:
  Restriction() = default;
  Restriction(Input mask, Input values);

  Input mask() const { return mask_; }
  Input values() const { return values_; }
  bool empty() const { return mask_ == 0; }
  int size() const;
  bool fixes(int i) const { return bit_of(mask_, i); }
  std::optional<bool> value(int i) const;

  // Throws ConfigError if i is already assigned.
  Restriction with(int i, bool b) const;
  // Union of disjoint restrictions; throws ConfigError on overlap.
  Restriction compose(const Restriction& other) const;

  Input apply(Input x) const { return (x & ~mask_) | values_; }
  // '0', '1' or '*' per coordinate, x_0 first.
  std::string to_string(int n) const;

  bool operator==(const Restriction&) const = default;

 private:
  Input mask_ = 0;
  Input values_ = 0;
};

// Packed truth table over 2^n points, bit x of the table is f(x).
class TruthTable {
 public:
  TruthTable() = default;
  explicit TruthTable(int n);

  static TruthTable tabulate(int n, const std::function<bool(Input)>& f);
  // Hex of the integer sum f(x) 2^x, most significant digit first.
  static TruthTable from_hex(int n, std::string_view hex);
  std::string to_hex() const;

  int arity() const { return n_; }
  std::uint64_t points() const { return std::uint64_t{1} << n_; }
  bool get(Input x) const { return ((words_[x >> 6] >> (x & 63)) & 1U) != 0; }
  void set(Input x, bool v);

  std::uint64_t count_ones() const;
  // Number of x with f(x) != f(x ^ e_i); counts both ends of each edge.
  std::uint64_t pivotal_count(int i) const;
  std::uint64_t disagreement(const TruthTable& other) const;
  // Table of f restricted by pi as a function of the free coordinates, in
  // increasing coordinate order.
  TruthTable compact(const Restriction& pi) const;

  const std::vector<std::uint64_t>& words() const { return words_; }
  bool operator==(const TruthTable&) const = default;

 private:
  int n_ = 0;
  std::vector<std::uint64_t> words_;
};

// Influences, expectation and bias of some f_pi. Influence of a fixed
// coordinate is 0.
struct RestrictionStats {
  std::vector<double> influence;
  double expectation = 0.0;
  double bias = 0.0;
  bool approximate = false;

  bool constant() const { return expectation == 0.0 || expectation == 1.0; }
};

// Closed-form statistics of f_pi for a structured family. Returns nullopt for
// restrictions it has no closed form for.
class InfluenceProvider {
 public:
  virtual ~InfluenceProvider() = default;
  virtual std::optional<RestrictionStats> stats(const Restriction& pi) const = 0;
};

enum class Family { Generic, TruthTable, Symmetric, Tribes, Address, HardInstance, Tree };

std::string family_name(Family f);

struct InfluenceProfile {
  std::vector<double> per_coordinate;
  double total = 0.0;
};

class BooleanFunction {
 public:
  using Evaluator = std::function<bool(Input)>;

  BooleanFunction(int n, Evaluator eval, Family family = Family::Generic);
  static BooleanFunction from_table(TruthTable table);

  int arity() const { return n_; }
  Family family() const { return family_; }
  // Family parameter: w for tribes, k for address and hard instances.
  int family_parameter() const { return parameter_; }
  const std::vector<std::uint8_t>& symmetric_profile() const { return profile_; }
  const TruthTable* table() const { return table_.get(); }
  const InfluenceProvider* provider() const { return provider_.get(); }
  const std::shared_ptr<const InfluenceProvider>& provider_handle() const { return provider_; }
  // JSON function specification, empty when the function has none.
  const std::string& spec() const { return spec_; }

  // Unchecked fast path; x must not have bits at or above n.
  bool operator()(Input x) const { return table_ ? table_->get(x) : eval_(x); }

  BooleanFunction with_provider(std::shared_ptr<const InfluenceProvider> p) const;
  BooleanFunction with_spec(std::string spec) const;
  BooleanFunction with_family(Family family, int parameter,
                              std::vector<std::uint8_t> profile = {}) const;
  // Materializes the truth table when n is within the enumeration cap.
  BooleanFunction tabulated() const;

 private:
  int n_;
  Evaluator eval_;
  Family family_;
  int parameter_ = 0;
  std::vector<std::uint8_t> profile_;
  std::shared_ptr<const TruthTable> table_;
  std::shared_ptr<const InfluenceProvider> provider_;
  std::string spec_;
};

struct SampleSpec {
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

bool evaluate(const BooleanFunction& f, Input x);
bool evaluate(const BooleanFunction& f, const std::vector<int>& bits);

BooleanFunction restrict(const BooleanFunction& f, const Restriction& pi);

// Exact under the enumeration cap; otherwise requires sampling parameters.
double distance(const BooleanFunction& f, const BooleanFunction& g,
                std::optional<SampleSpec> sampling = std::nullopt);
double expectation(const BooleanFunction& f, std::optional<SampleSpec> sampling = std::nullopt);
double bias(const BooleanFunction& f, std::optional<SampleSpec> sampling = std::nullopt);

// Provider first, else exact enumeration under the cap.
double influence(const BooleanFunction& f, int i);
InfluenceProfile influence_profile(const BooleanFunction& f);
double total_influence(const BooleanFunction& f);
double estimate_influence(const BooleanFunction& f, int i, std::uint64_t samples,
                          std::uint64_t seed);

// Truth table of f (the stored one, or a fresh tabulation under the cap).
TruthTable truth_table(const BooleanFunction& f);

struct StatsOptions {
  int enumeration_cap = kEnumerationCap;
  // Used only when neither a provider, a table nor enumeration applies.
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

// Statistics of f_pi: provider, then stored table, then enumeration of the
// free coordinates, then sampling (flagged approximate).
RestrictionStats restricted_stats(const BooleanFunction& f, const Restriction& pi,
                                  const StatsOptions& options = {});

// Exact statistics of a compact table (all coordinates free).
RestrictionStats table_stats(const TruthTable& t);

}  // namespace uql
