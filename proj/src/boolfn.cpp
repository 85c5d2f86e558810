#include "uql/boolfn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "uql/random.hpp"

namespace uql {

namespace {

constexpr std::uint64_t kLowHalf[6] = {
    0x5555555555555555ULL, 0x3333333333333333ULL, 0x0F0F0F0F0F0F0F0FULL,
    0x00FF00FF00FF00FFULL, 0x0000FFFF0000FFFFULL, 0x00000000FFFFFFFFULL,
};

double dyadic(std::uint64_t count, int log2_denominator) {
  return std::ldexp(static_cast<double>(count), -log2_denominator);
}

void check_coordinate(const BooleanFunction& f, int i) {
  if (i < 0 || i >= f.arity()) {
    throw ConfigError("coordinate " + std::to_string(i) + " out of range for arity " +
                      std::to_string(f.arity()));
  }
}

class RestrictedProvider final : public InfluenceProvider {
 public:
  RestrictedProvider(std::shared_ptr<const InfluenceProvider> base, Restriction pi)
      : base_(std::move(base)), pi_(pi) {}

  std::optional<RestrictionStats> stats(const Restriction& pi) const override {
    // Coordinates fixed by the base restriction are irrelevant to f_pi, so a
    // second assignment to them is ignored.
    const Restriction merged(pi_.mask() | pi.mask(), pi_.values() | (pi.values() & ~pi_.mask()));
    return base_->stats(merged);
  }

 private:
  std::shared_ptr<const InfluenceProvider> base_;
  Restriction pi_;
};

TruthTable compact_by_evaluation(const BooleanFunction& f, const Restriction& pi) {
  const Input free = ~pi.mask() & low_mask(f.arity());
  TruthTable out(std::popcount(free));
  Input s = 0;
  std::uint64_t k = 0;
  do {
    if (f(pi.values() | s)) out.set(k, true);
    ++k;
    s = (s - free) & free;
  } while (s != 0);
  return out;
}

RestrictionStats expand(const RestrictionStats& compact, const Restriction& pi, int n) {
  RestrictionStats out;
  out.expectation = compact.expectation;
  out.bias = compact.bias;
  out.approximate = compact.approximate;
  out.influence.assign(static_cast<std::size_t>(n), 0.0);
  std::size_t t = 0;
  for (int i = 0; i < n; ++i) {
    if (!pi.fixes(i)) out.influence[static_cast<std::size_t>(i)] = compact.influence[t++];
  }
  return out;
}

std::uint64_t count_ones_exact(const BooleanFunction& f, std::optional<SampleSpec> sampling,
                               bool* sampled, std::uint64_t* total) {
  if (const TruthTable* t = f.table()) {
    *sampled = false;
    *total = t->points();
    return t->count_ones();
  }
  if (f.arity() <= kEnumerationCap) {
    const TruthTable t = TruthTable::tabulate(f.arity(), [&](Input x) { return f(x); });
    *sampled = false;
    *total = t.points();
    return t.count_ones();
  }
  if (!sampling || sampling->samples == 0) {
    throw ConfigError("arity " + std::to_string(f.arity()) +
                      " exceeds the enumeration cap and no sampling parameters were given");
  }
  Rng rng(sampling->seed);
  std::uint64_t ones = 0;
  for (std::uint64_t s = 0; s < sampling->samples; ++s) ones += f(uniform_input(rng, f.arity()));
  *sampled = true;
  *total = sampling->samples;
  return ones;
}

}  // namespace

Restriction::Restriction(Input mask, Input values) : mask_(mask), values_(values) {
  if ((values & ~mask) != 0) throw ConfigError("restriction values outside its mask");
}

int Restriction::size() const { return std::popcount(mask_); }

std::optional<bool> Restriction::value(int i) const {
  if (!fixes(i)) return std::nullopt;
  return bit_of(values_, i);
}

Restriction Restriction::with(int i, bool b) const {
  if (i < 0 || i >= kMaxArity) throw ConfigError("restriction coordinate out of range");
  if (fixes(i)) throw ConfigError("coordinate " + std::to_string(i) + " assigned twice");
  const Input e = Input{1} << i;
  return Restriction(mask_ | e, b ? (values_ | e) : values_);
}

Restriction Restriction::compose(const Restriction& other) const {
  if ((mask_ & other.mask_) != 0) throw ConfigError("composed restrictions overlap");
  return Restriction(mask_ | other.mask_, values_ | other.values_);
}

std::string Restriction::to_string(int n) const {
  std::string s(static_cast<std::size_t>(n), '*');
  for (int i = 0; i < n; ++i) {
    if (fixes(i)) s[static_cast<std::size_t>(i)] = bit_of(values_, i) ? '1' : '0';
  }
  return s;
}

TruthTable::TruthTable(int n) : n_(n) {
  if (n < 0 || n > 32) throw ConfigError("truth table arity out of range: " + std::to_string(n));
  const std::uint64_t points = std::uint64_t{1} << n;
  words_.assign(static_cast<std::size_t>(std::max<std::uint64_t>(1, points / 64)), 0);
}

TruthTable TruthTable::tabulate(int n, const std::function<bool(Input)>& f) {
  TruthTable t(n);
  const std::uint64_t points = t.points();
  for (std::uint64_t x = 0; x < points; ++x) {
    if (f(x)) t.words_[x >> 6] |= std::uint64_t{1} << (x & 63);
  }
  return t;
}

void TruthTable::set(Input x, bool v) {
  const std::uint64_t m = std::uint64_t{1} << (x & 63);
  if (v) {
    words_[x >> 6] |= m;
  } else {
    words_[x >> 6] &= ~m;
  }
}

TruthTable TruthTable::from_hex(int n, std::string_view hex) {
  TruthTable t(n);
  const std::uint64_t points = t.points();
  const std::size_t digits = points < 4 ? 1 : static_cast<std::size_t>(points / 4);
  if (hex.size() != digits) {
    throw ConfigError("truth table hex for n=" + std::to_string(n) + " needs " +
                      std::to_string(digits) + " digits, got " + std::to_string(hex.size()));
  }
  for (std::size_t q = 0; q < digits; ++q) {
    const char ch = hex[digits - 1 - q];
    int v;
    if (ch >= '0' && ch <= '9') {
      v = ch - '0';
    } else if (ch >= 'a' && ch <= 'f') {
      v = ch - 'a' + 10;
    } else if (ch >= 'A' && ch <= 'F') {
      v = ch - 'A' + 10;
    } else {
      throw ConfigError(std::string("invalid hex digit '") + ch + "'");
    }
    for (int b = 0; b < 4; ++b) {
      if (((v >> b) & 1) == 0) continue;
      const std::uint64_t x = 4 * q + static_cast<std::uint64_t>(b);
      if (x >= points) throw ConfigError("truth table hex has bits beyond 2^n points");
      t.set(x, true);
    }
  }
  return t;
}

std::string TruthTable::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::uint64_t pts = points();
  const std::size_t digits = pts < 4 ? 1 : static_cast<std::size_t>(pts / 4);
  std::string s(digits, '0');
  for (std::size_t q = 0; q < digits; ++q) {
    int v = 0;
    for (int b = 0; b < 4; ++b) {
      const std::uint64_t x = 4 * q + static_cast<std::uint64_t>(b);
      if (x < pts && get(x)) v |= 1 << b;
    }
    s[digits - 1 - q] = kDigits[v];
  }
  return s;
}

std::uint64_t TruthTable::count_ones() const {
  std::uint64_t c = 0;
  for (std::uint64_t w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
  return c;
}

std::uint64_t TruthTable::pivotal_count(int i) const {
  if (i < 0 || i >= n_) throw ConfigError("pivotal_count coordinate out of range");
  std::uint64_t c = 0;
  if (i < 6) {
    const int s = 1 << i;
    for (std::uint64_t w : words_) c += static_cast<std::uint64_t>(std::popcount((w ^ (w >> s)) & kLowHalf[i]));
  } else {
    const std::size_t stride = std::size_t{1} << (i - 6);
    for (std::size_t j = 0; j < words_.size(); ++j) {
      if ((j & stride) == 0) c += static_cast<std::uint64_t>(std::popcount(words_[j] ^ words_[j + stride]));
    }
  }
  return 2 * c;
}

std::uint64_t TruthTable::disagreement(const TruthTable& other) const {
  if (other.n_ != n_) throw ConfigError("truth table arity mismatch");
  std::uint64_t c = 0;
  for (std::size_t j = 0; j < words_.size(); ++j) c += static_cast<std::uint64_t>(std::popcount(words_[j] ^ other.words_[j]));
  return c;
}

TruthTable TruthTable::compact(const Restriction& pi) const {
  if (pi.empty()) return *this;
  const Input free = ~pi.mask() & low_mask(n_);
  TruthTable out(std::popcount(free));
  Input s = 0;
  std::uint64_t k = 0;
  do {
    if (get(pi.values() | s)) out.words_[k >> 6] |= std::uint64_t{1} << (k & 63);
    ++k;
    s = (s - free) & free;
  } while (s != 0);
  return out;
}

std::string family_name(Family f) {
  switch (f) {
    case Family::Generic: return "generic";
    case Family::TruthTable: return "truth_table";
    case Family::Symmetric: return "symmetric";
    case Family::Tribes: return "tribes";
    case Family::Address: return "address";
    case Family::HardInstance: return "hard_instance";
    case Family::Tree: return "tree";
  }
  return "generic";
}

BooleanFunction::BooleanFunction(int n, Evaluator eval, Family family)
    : n_(n), eval_(std::move(eval)), family_(family) {
  if (n < 0 || n > kMaxArity) throw ConfigError("arity out of range: " + std::to_string(n));
  if (!eval_) throw ConfigError("missing evaluator");
}

BooleanFunction BooleanFunction::from_table(TruthTable table) {
  auto shared = std::make_shared<const TruthTable>(std::move(table));
  BooleanFunction f(shared->arity(), [shared](Input x) { return shared->get(x); },
                    Family::TruthTable);
  f.table_ = shared;
  f.spec_ = "{\"family\":\"truth_table\",\"n\":" + std::to_string(shared->arity()) +
            ",\"bits\":\"" + shared->to_hex() + "\"}";
  return f;
}

BooleanFunction BooleanFunction::with_provider(std::shared_ptr<const InfluenceProvider> p) const {
  BooleanFunction f = *this;
  f.provider_ = std::move(p);
  return f;
}

BooleanFunction BooleanFunction::with_spec(std::string spec) const {
  BooleanFunction f = *this;
  f.spec_ = std::move(spec);
  return f;
}

BooleanFunction BooleanFunction::with_family(Family family, int parameter,
                                             std::vector<std::uint8_t> profile) const {
  BooleanFunction f = *this;
  f.family_ = family;
  f.parameter_ = parameter;
  f.profile_ = std::move(profile);
  return f;
}

BooleanFunction BooleanFunction::tabulated() const {
  if (table_ || n_ > kEnumerationCap) return *this;
  BooleanFunction f = *this;
  f.table_ = std::make_shared<const TruthTable>(TruthTable::tabulate(n_, eval_));
  return f;
}

bool evaluate(const BooleanFunction& f, Input x) {
  if ((x & ~low_mask(f.arity())) != 0) throw ConfigError("input has bits beyond the arity");
  return f(x);
}

bool evaluate(const BooleanFunction& f, const std::vector<int>& bits) {
  if (static_cast<int>(bits.size()) != f.arity()) {
    throw ConfigError("arity mismatch: function has " + std::to_string(f.arity()) +
                      " inputs, point has " + std::to_string(bits.size()));
  }
  Input x = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0 && bits[i] != 1) throw ConfigError("input bits must be 0 or 1");
    if (bits[i] != 0) x |= Input{1} << i;
  }
  return f(x);
}

BooleanFunction restrict(const BooleanFunction& f, const Restriction& pi) {
  if ((pi.mask() & ~low_mask(f.arity())) != 0) throw ConfigError("restriction coordinate out of range");
  BooleanFunction base = f;
  BooleanFunction g(f.arity(), [base, pi](Input x) { return base(pi.apply(x)); });
  if (f.table()) g = g.tabulated();
  if (f.provider()) {
    // All structured providers accept arbitrary restrictions, so they are kept.
    g = g.with_provider(std::make_shared<RestrictedProvider>(f.provider_handle(), pi));
  }
  return g;
}

double distance(const BooleanFunction& f, const BooleanFunction& g, std::optional<SampleSpec> sampling) {
  if (f.arity() != g.arity()) throw ConfigError("distance: arity mismatch");
  const int n = f.arity();
  if (f.table() && g.table()) return dyadic(f.table()->disagreement(*g.table()), n);
  if (n <= kEnumerationCap) {
    std::uint64_t c = 0;
    const std::uint64_t points = std::uint64_t{1} << n;
    for (Input x = 0; x < points; ++x) c += f(x) != g(x);
    return dyadic(c, n);
  }
  if (!sampling || sampling->samples == 0) {
    throw ConfigError("distance: arity exceeds the enumeration cap and no sampling parameters were given");
  }
  Rng rng(sampling->seed);
  std::uint64_t c = 0;
  for (std::uint64_t s = 0; s < sampling->samples; ++s) {
    const Input x = uniform_input(rng, n);
    c += f(x) != g(x);
  }
  return static_cast<double>(c) / static_cast<double>(sampling->samples);
}

double expectation(const BooleanFunction& f, std::optional<SampleSpec> sampling) {
  if (f.provider() && f.arity() > kEnumerationCap) {
    if (auto s = f.provider()->stats(Restriction{})) return s->expectation;
  }
  bool sampled = false;
  std::uint64_t total = 0;
  const std::uint64_t ones = count_ones_exact(f, sampling, &sampled, &total);
  return static_cast<double>(ones) / static_cast<double>(total);
}

double bias(const BooleanFunction& f, std::optional<SampleSpec> sampling) {
  if (f.provider() && f.arity() > kEnumerationCap) {
    if (auto s = f.provider()->stats(Restriction{})) return s->bias;
  }
  bool sampled = false;
  std::uint64_t total = 0;
  const std::uint64_t ones = count_ones_exact(f, sampling, &sampled, &total);
  return static_cast<double>(std::min(ones, total - ones)) / static_cast<double>(total);
}

double influence(const BooleanFunction& f, int i) {
  check_coordinate(f, i);
  if (f.provider()) {
    if (auto s = f.provider()->stats(Restriction{})) return s->influence[static_cast<std::size_t>(i)];
  }
  if (const TruthTable* t = f.table()) return dyadic(t->pivotal_count(i), f.arity());
  if (f.arity() > kEnumerationCap) {
    throw ConfigError("influence: arity exceeds the enumeration cap and no provider is available");
  }
  return dyadic(truth_table(f).pivotal_count(i), f.arity());
}

InfluenceProfile influence_profile(const BooleanFunction& f) {
  InfluenceProfile p;
  const auto s = restricted_stats(f, Restriction{});
  p.per_coordinate = s.influence;
  for (double v : p.per_coordinate) p.total += v;
  return p;
}

double total_influence(const BooleanFunction& f) { return influence_profile(f).total; }

double estimate_influence(const BooleanFunction& f, int i, std::uint64_t samples, std::uint64_t seed) {
  check_coordinate(f, i);
  if (samples == 0) throw ConfigError("estimate_influence needs at least one sample");
  Rng rng(seed);
  const Input e = Input{1} << i;
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const Input x = uniform_input(rng, f.arity());
    hits += f(x) != f(x ^ e);
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

TruthTable truth_table(const BooleanFunction& f) {
  if (const TruthTable* t = f.table()) return *t;
  if (f.arity() > kEnumerationCap) throw ConfigError("truth table beyond the enumeration cap");
  return TruthTable::tabulate(f.arity(), [&](Input x) { return f(x); });
}

RestrictionStats table_stats(const TruthTable& t) {
  RestrictionStats s;
  const int m = t.arity();
  const std::uint64_t ones = t.count_ones();
  const std::uint64_t total = t.points();
  s.expectation = dyadic(ones, m);
  s.bias = dyadic(std::min(ones, total - ones), m);
  s.influence.resize(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) s.influence[static_cast<std::size_t>(j)] = dyadic(t.pivotal_count(j), m);
  return s;
}

RestrictionStats restricted_stats(const BooleanFunction& f, const Restriction& pi, const StatsOptions& options) {
  const int n = f.arity();
  if ((pi.mask() & ~low_mask(n)) != 0) throw ConfigError("restriction coordinate out of range");
  if (f.provider()) {
    if (auto s = f.provider()->stats(pi)) return *s;
  }
  const int free = n - pi.size();
  if (const TruthTable* t = f.table()) return expand(table_stats(t->compact(pi)), pi, n);
  if (free <= options.enumeration_cap) return expand(table_stats(compact_by_evaluation(f, pi)), pi, n);
  if (options.samples == 0) {
    throw ConfigError("no exact influence path for a restriction with " + std::to_string(free) +
                      " free coordinates and sampling is disabled");
  }
  Rng rng(derive_seed(options.seed, splitmix64(pi.mask()) ^ pi.values()));
  std::vector<std::uint64_t> pivots(static_cast<std::size_t>(n), 0);
  std::uint64_t ones = 0;
  for (std::uint64_t s = 0; s < options.samples; ++s) {
    const Input x = pi.apply(uniform_input(rng, n));
    const bool fx = f(x);
    ones += fx;
    for (int i = 0; i < n; ++i) {
      if (!pi.fixes(i)) pivots[static_cast<std::size_t>(i)] += fx != f(x ^ (Input{1} << i));
    }
  }
  RestrictionStats out;
  const auto total = static_cast<double>(options.samples);
  out.expectation = static_cast<double>(ones) / total;
  out.bias = std::min(out.expectation, 1.0 - out.expectation);
  out.influence.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.influence[static_cast<std::size_t>(i)] = static_cast<double>(pivots[static_cast<std::size_t>(i)]) / total;
  out.approximate = true;
  return out;
}

}  // namespace uql
