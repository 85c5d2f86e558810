#include "uql/families.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace uql {

namespace {

using Count = unsigned __int128;

double ratio(Count num, int log2_den) { return std::ldexp(static_cast<double>(num), -log2_den); }

std::vector<Count> binomial_row(int m) {
  std::vector<Count> row(static_cast<std::size_t>(m) + 1, 0);
  row[0] = 1;
  for (int r = 1; r <= m; ++r) {
    for (int k = r; k >= 1; --k) row[static_cast<std::size_t>(k)] += row[static_cast<std::size_t>(k) - 1];
  }
  return row;
}

class SymmetricProvider final : public InfluenceProvider {
 public:
  explicit SymmetricProvider(std::vector<std::uint8_t> profile) : profile_(std::move(profile)) {}

  std::optional<RestrictionStats> stats(const Restriction& pi) const override {
    const int n = static_cast<int>(profile_.size()) - 1;
    const int r = std::popcount(pi.values());
    const int m = n - pi.size();
    RestrictionStats s;
    const auto row = binomial_row(m);
    Count ones = 0;
    for (int k = 0; k <= m; ++k) {
      if (profile_[static_cast<std::size_t>(r + k)] != 0) ones += row[static_cast<std::size_t>(k)];
    }
    const Count total = Count{1} << m;
    s.expectation = ratio(ones, m);
    s.bias = ratio(std::min(ones, total - ones), m);
    s.influence.assign(static_cast<std::size_t>(n), 0.0);
    if (m >= 1) {
      const auto prev = binomial_row(m - 1);
      Count pivots = 0;
      for (int k = 0; k < m; ++k) {
        if (profile_[static_cast<std::size_t>(r + k)] != profile_[static_cast<std::size_t>(r + k + 1)]) {
          pivots += prev[static_cast<std::size_t>(k)];
        }
      }
      const double inf = ratio(pivots, m - 1);
      for (int i = 0; i < n; ++i) {
        if (!pi.fixes(i)) s.influence[static_cast<std::size_t>(i)] = inf;
      }
    }
    return s;
  }

 private:
  std::vector<std::uint8_t> profile_;
};

class TribesProvider final : public InfluenceProvider {
 public:
  explicit TribesProvider(int w) : w_(w), tribes_(1 << w) {}

  std::optional<RestrictionStats> stats(const Restriction& pi) const override {
    const int n = w_ * tribes_;
    RestrictionStats s;
    s.influence.assign(static_cast<std::size_t>(n), 0.0);
    // Probability that each tribe evaluates to 0; dead tribes have 1.
    std::vector<double> q(static_cast<std::size_t>(tribes_), 1.0);
    std::vector<int> unfixed(static_cast<std::size_t>(tribes_), 0);
    for (int t = 0; t < tribes_; ++t) {
      bool dead = false;
      int k = 0;
      for (int j = 0; j < w_; ++j) {
        const int i = t * w_ + j;
        if (!pi.fixes(i)) {
          ++k;
        } else if (!bit_of(pi.values(), i)) {
          dead = true;
        }
      }
      unfixed[static_cast<std::size_t>(t)] = dead ? -1 : k;
      if (!dead && k == 0) {
        s.expectation = 1.0;
        s.bias = 0.0;
        return s;
      }
      if (!dead) q[static_cast<std::size_t>(t)] = 1.0 - std::ldexp(1.0, -k);
    }
    double all_zero = 1.0;
    for (double v : q) all_zero *= v;
    s.expectation = 1.0 - all_zero;
    s.bias = std::min(s.expectation, all_zero);
    for (int t = 0; t < tribes_; ++t) {
      const int k = unfixed[static_cast<std::size_t>(t)];
      if (k <= 0) continue;
      double others = 1.0;
      for (int u = 0; u < tribes_; ++u) {
        if (u != t) others *= q[static_cast<std::size_t>(u)];
      }
      const double inf = others * std::ldexp(1.0, -(k - 1));
      for (int j = 0; j < w_; ++j) {
        const int i = t * w_ + j;
        if (!pi.fixes(i)) s.influence[static_cast<std::size_t>(i)] = inf;
      }
    }
    return s;
  }

 private:
  int w_;
  int tribes_;
};

// Statistics of the address block of `layout` under pi, written into the
// control and action slots of `influence`. Returns the expectation.
double address_block_stats(const AddressLayout& layout, const Restriction& pi,
                           std::vector<double>& influence) {
  const int side = layout.side;
  // Row value: -1 undetermined, else its parity.
  std::vector<int> row(static_cast<std::size_t>(side), -1);
  for (int j = 0; j < side; ++j) {
    int parity = 0;
    bool determined = true;
    for (int t = 0; t < side; ++t) {
      const int i = layout.action_offset + j * side + t;
      if (!pi.fixes(i)) {
        determined = false;
        break;
      }
      parity ^= bit_of(pi.values(), i) ? 1 : 0;
    }
    if (determined) row[static_cast<std::size_t>(j)] = parity;
  }
  std::vector<int> selectable;
  for (int j = 0; j < side; ++j) {
    bool ok = true;
    for (int b = 0; b < layout.k; ++b) {
      const int i = layout.control_offset + b;
      if (pi.fixes(i) && bit_of(pi.values(), i) != (((j >> b) & 1) != 0)) ok = false;
    }
    if (ok) selectable.push_back(j);
  }
  const double weight = 1.0 / static_cast<double>(selectable.size());
  double e = 0.0;
  for (int j : selectable) {
    const int v = row[static_cast<std::size_t>(j)];
    e += weight * (v < 0 ? 0.5 : static_cast<double>(v));
    for (int t = 0; t < side; ++t) {
      const int i = layout.action_offset + j * side + t;
      if (!pi.fixes(i)) influence[static_cast<std::size_t>(i)] = weight;
    }
  }
  for (int b = 0; b < layout.k; ++b) {
    const int i = layout.control_offset + b;
    if (pi.fixes(i)) continue;
    double inf = 0.0;
    for (int j : selectable) {
      const int a = row[static_cast<std::size_t>(j)];
      const int c = row[static_cast<std::size_t>(j ^ (1 << b))];
      inf += weight * ((a < 0 || c < 0) ? 0.5 : (a != c ? 1.0 : 0.0));
    }
    influence[static_cast<std::size_t>(i)] = inf;
  }
  return e;
}

class AddressProvider final : public InfluenceProvider {
 public:
  explicit AddressProvider(AddressLayout layout) : layout_(layout) {}

  std::optional<RestrictionStats> stats(const Restriction& pi) const override {
    RestrictionStats s;
    s.influence.assign(static_cast<std::size_t>(layout_.arity), 0.0);
    s.expectation = address_block_stats(layout_, pi, s.influence);
    s.bias = std::min(s.expectation, 1.0 - s.expectation);
    return s;
  }

 private:
  AddressLayout layout_;
};

class HardInstanceProvider final : public InfluenceProvider {
 public:
  explicit HardInstanceProvider(AddressLayout layout) : layout_(layout) {}

  std::optional<RestrictionStats> stats(const Restriction& pi) const override {
    const int len = layout_.list_bits;
    RestrictionStats s;
    s.influence.assign(static_cast<std::size_t>(layout_.arity), 0.0);
    std::vector<double> block(static_cast<std::size_t>(layout_.arity), 0.0);
    // p[i] = Pr[the list from rule i onward outputs 1]; p[len] is the address block.
    std::vector<double> p(static_cast<std::size_t>(len) + 1, 0.0);
    p[static_cast<std::size_t>(len)] = address_block_stats(layout_, pi, block);
    for (int i = len - 1; i >= 0; --i) {
      const double label = static_cast<double>((i + 1) % 2);
      const double next = p[static_cast<std::size_t>(i) + 1];
      if (!pi.fixes(i)) {
        p[static_cast<std::size_t>(i)] = 0.5 * label + 0.5 * next;
      } else {
        p[static_cast<std::size_t>(i)] = bit_of(pi.values(), i) ? label : next;
      }
    }
    double reach = 1.0;
    for (int i = 0; i < len; ++i) {
      const double next = p[static_cast<std::size_t>(i) + 1];
      if (!pi.fixes(i)) {
        const bool label = (i + 1) % 2 == 1;
        s.influence[static_cast<std::size_t>(i)] = reach * (label ? 1.0 - next : next);
        reach *= 0.5;
      } else if (bit_of(pi.values(), i)) {
        reach = 0.0;
      }
    }
    for (int i = len; i < layout_.arity; ++i) s.influence[static_cast<std::size_t>(i)] = reach * block[static_cast<std::size_t>(i)];
    s.expectation = p[0];
    s.bias = std::min(s.expectation, 1.0 - s.expectation);
    return s;
  }

 private:
  AddressLayout layout_;
};

bool address_eval(const AddressLayout& l, Input x) {
  const auto j = static_cast<int>((x >> l.control_offset) & low_mask(l.k));
  const Input row = (x >> (l.action_offset + j * l.side)) & low_mask(l.side);
  return (std::popcount(row) & 1) != 0;
}

std::string profile_spec(const std::vector<std::uint8_t>& profile) {
  std::string s = "{\"family\":\"symmetric\",\"profile\":[";
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (i > 0) s += ",";
    s += profile[i] != 0 ? "1" : "0";
  }
  return s + "]}";
}

}  // namespace

BooleanFunction symmetric_function(std::vector<std::uint8_t> profile) {
  if (profile.empty()) throw ConfigError("symmetric profile must have n+1 entries");
  const int n = static_cast<int>(profile.size()) - 1;
  if (n > kMaxArity) throw ConfigError("symmetric profile arity too large");
  for (auto& v : profile) {
    if (v > 1) throw ConfigError("symmetric profile entries must be 0 or 1");
  }
  auto shared = std::make_shared<const std::vector<std::uint8_t>>(profile);
  BooleanFunction f(n, [shared](Input x) { return (*shared)[static_cast<std::size_t>(std::popcount(x))] != 0; },
                    Family::Symmetric);
  return f.with_family(Family::Symmetric, n, profile)
      .with_provider(std::make_shared<SymmetricProvider>(profile))
      .with_spec(profile_spec(profile));
}

BooleanFunction and_function(int n) { return threshold_function(n, n); }

BooleanFunction or_function(int n) { return threshold_function(n, 1); }

BooleanFunction majority_function(int n) {
  if (n < 1) throw ConfigError("majority needs n >= 1");
  std::vector<std::uint8_t> p(static_cast<std::size_t>(n) + 1);
  for (int w = 0; w <= n; ++w) p[static_cast<std::size_t>(w)] = 2 * w > n ? 1 : 0;
  return symmetric_function(std::move(p));
}

BooleanFunction threshold_function(int n, int t) {
  if (n < 1) throw ConfigError("threshold needs n >= 1");
  std::vector<std::uint8_t> p(static_cast<std::size_t>(n) + 1);
  for (int w = 0; w <= n; ++w) p[static_cast<std::size_t>(w)] = w >= t ? 1 : 0;
  return symmetric_function(std::move(p));
}

BooleanFunction parity_function(int n) {
  std::vector<std::uint8_t> p(static_cast<std::size_t>(n) + 1);
  for (int w = 0; w <= n; ++w) p[static_cast<std::size_t>(w)] = static_cast<std::uint8_t>(w % 2);
  return symmetric_function(std::move(p));
}

BooleanFunction constant_function(int n, bool value) {
  return symmetric_function(std::vector<std::uint8_t>(static_cast<std::size_t>(n) + 1, value ? 1 : 0));
}

BooleanFunction dictator_function(int n, int i) {
  if (i < 0 || i >= n) throw ConfigError("dictator coordinate out of range");
  if (n > kEnumerationCap) throw ConfigError("dictator arity beyond the enumeration cap");
  return BooleanFunction::from_table(TruthTable::tabulate(n, [i](Input x) { return bit_of(x, i); }));
}

BooleanFunction tribes_function(int w) {
  if (w < 1) throw ConfigError("tribes needs w >= 1");
  if (w > 4) throw ConfigError("tribes arity overflow: w*2^w exceeds 64 inputs");
  const int tribes = 1 << w;
  const Input wmask = low_mask(w);
  BooleanFunction f(w * tribes, [w, tribes, wmask](Input x) {
    for (int t = 0; t < tribes; ++t) {
      if (((x >> (t * w)) & wmask) == wmask) return true;
    }
    return false;
  });
  return f.with_family(Family::Tribes, w)
      .with_provider(std::make_shared<TribesProvider>(w))
      .with_spec("{\"family\":\"tribes\",\"w\":" + std::to_string(w) + "}");
}

AddressLayout address_layout(int k) {
  if (k < 1) throw ConfigError("address needs k >= 1");
  AddressLayout l;
  l.k = k;
  l.side = 1 << k;
  l.list_bits = 0;
  l.control_offset = 0;
  l.action_offset = k;
  l.arity = k + l.side * l.side;
  if (l.arity > kMaxArity) throw ConfigError("address arity overflow at k=" + std::to_string(k));
  return l;
}

AddressLayout hard_instance_layout(int k) {
  if (k < 1) throw ConfigError("hard instance needs k >= 1");
  AddressLayout l;
  l.k = k;
  l.side = 1 << k;
  l.list_bits = k;
  l.control_offset = k;
  l.action_offset = 2 * k;
  l.arity = 2 * k + l.side * l.side;
  if (l.arity > kMaxArity) throw ConfigError("hard instance arity overflow at k=" + std::to_string(k));
  return l;
}

BooleanFunction address_function(int k) {
  const AddressLayout l = address_layout(k);
  BooleanFunction f(l.arity, [l](Input x) { return address_eval(l, x); });
  return f.with_family(Family::Address, k)
      .with_provider(std::make_shared<AddressProvider>(l))
      .with_spec("{\"family\":\"address\",\"k\":" + std::to_string(k) + "}");
}

BooleanFunction hard_instance_function(int k) {
  const AddressLayout l = hard_instance_layout(k);
  BooleanFunction f(l.arity, [l](Input x) {
    for (int i = 0; i < l.list_bits; ++i) {
      if (bit_of(x, i)) return (i + 1) % 2 == 1;
    }
    return address_eval(l, x);
  });
  return f.with_family(Family::HardInstance, k)
      .with_provider(std::make_shared<HardInstanceProvider>(l))
      .with_spec("{\"family\":\"hard_instance\",\"k\":" + std::to_string(k) + "}");
}

}  // namespace uql
