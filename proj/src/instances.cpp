#include "uql/instances.hpp"

#include <charconv>
#include <functional>
#include <cmath>
#include <vector>

#include "uql/families.hpp"
#include "uql/random.hpp"

namespace uql {

namespace {

std::vector<int> parse_args(std::string_view body, std::string_view spec) {
  std::vector<int> out;
  while (!body.empty()) {
    const auto comma = body.find(',');
    const std::string_view tok = body.substr(0, comma);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
      throw ConfigError("malformed function spec '" + std::string(spec) + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

double quantize_up(double c, double beta) {
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  return std::ceil(c / beta) * beta;
}

Instance and_instance(int n, std::uint64_t seed) {
  if (n < 1 || n > kMaxArity) throw ConfigError("and_instance needs 1 <= n <= 64");
  Rng rng(seed);
  const auto perm = random_permutation(rng, n);
  CostVector c(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = perm[static_cast<std::size_t>(i)] + 1;
  return {and_function(n), std::move(c), "and-n" + std::to_string(n), seed};
}

Instance tribes_instance(int w, std::uint64_t seed) {
  BooleanFunction f = tribes_function(w);
  Rng rng(seed);
  CostVector c;
  c.reserve(static_cast<std::size_t>(f.arity()));
  for (int t = 0; t < (1 << w); ++t) {
    for (int v : random_permutation(rng, w)) c.push_back(v + 1);
  }
  return {std::move(f), std::move(c), "tribes-w" + std::to_string(w), seed};
}

Instance address_instance(int k, double beta, double scale) {
  if (!(scale > 0.0)) throw ConfigError("cost scale must be positive");
  BooleanFunction f = address_function(k);
  const AddressLayout l = address_layout(k);
  CostVector c(static_cast<std::size_t>(l.arity));
  for (int i = 0; i < l.arity; ++i) {
    const double raw = i < l.action_offset ? 0.5 * scale : std::ldexp(scale, -k);
    c[static_cast<std::size_t>(i)] = quantize_up(raw, beta);
  }
  return {std::move(f), std::move(c), "address-k" + std::to_string(k), 0};
}

Instance hard_instance(int k, double beta, double scale) {
  if (k < 1 || k > 2) throw ConfigError("hard instance supports k in {1, 2}");
  if (!(scale > 0.0)) throw ConfigError("cost scale must be positive");
  BooleanFunction f = hard_instance_function(k);
  const AddressLayout l = hard_instance_layout(k);
  CostVector c(static_cast<std::size_t>(l.arity));
  for (int i = 0; i < l.arity; ++i) {
    double raw = beta;
    if (i >= l.action_offset) {
      raw = std::ldexp(scale, -k);
    } else if (i >= l.control_offset) {
      raw = scale;
    }
    c[static_cast<std::size_t>(i)] = quantize_up(raw, beta);
  }
  return {std::move(f), std::move(c), "hard-k" + std::to_string(k), 0};
}

DecisionTree hard_instance_witness_tree(int k) {
  const AddressLayout l = hard_instance_layout(k);
  // Parity of the remaining row bits given the parity so far.
  std::function<DecisionTree(int, int, bool)> row = [&](int j, int t, bool parity) {
    if (t == l.side) return DecisionTree::leaf(parity);
    const int var = l.action_offset + j * l.side + t;
    return DecisionTree::query(var, row(j, t + 1, parity), row(j, t + 1, !parity));
  };
  std::function<DecisionTree(int, int)> control = [&](int t, int j) {
    if (t == l.k) return row(j, 0, false);
    return DecisionTree::query(l.control_offset + t, control(t + 1, j), control(t + 1, j | (1 << t)));
  };
  DecisionTree tree = control(0, 0);
  for (int i = l.list_bits - 1; i >= 0; --i) tree = DecisionTree::query(i, tree, DecisionTree::leaf((i + 1) % 2 == 1));
  return tree;
}

BooleanFunction named_function(std::string_view spec) {
  const auto open = spec.find('(');
  if (open == std::string_view::npos || spec.empty() || spec.back() != ')') {
    throw ConfigError("malformed function spec '" + std::string(spec) + "'");
  }
  const std::string_view name = spec.substr(0, open);
  const std::string_view body = spec.substr(open + 1, spec.size() - open - 2);
  if (name == "profile") {
    std::vector<std::uint8_t> p;
    for (char ch : body) {
      if (ch != '0' && ch != '1') throw ConfigError("profile digits must be 0 or 1");
      p.push_back(ch == '1' ? 1 : 0);
    }
    return symmetric_function(std::move(p));
  }
  const auto a = parse_args(body, spec);
  if (name == "tribes" || name == "address" || name == "hard") {
    if (a.size() != 1) throw ConfigError("wrong argument count in '" + std::string(spec) + "'");
    if (name == "tribes") return tribes_function(a[0]);
    if (name == "address") return address_function(a[0]);
    return hard_instance_function(a[0]);
  }
  auto need = [&](std::size_t count) {
    if (a.size() != count) throw ConfigError("wrong argument count in '" + std::string(spec) + "'");
    if (a[0] < 1 || a[0] > kMaxArity) throw ConfigError("arity out of range in '" + std::string(spec) + "'");
  };
  if (name == "and") return need(1), and_function(a[0]);
  if (name == "or") return need(1), or_function(a[0]);
  if (name == "maj") return need(1), majority_function(a[0]);
  if (name == "parity") return need(1), parity_function(a[0]);
  if (name == "thr") return need(2), threshold_function(a[0], a[1]);
  if (name == "dictator") return need(2), dictator_function(a[0], a[1]);
  if (name == "const") {
    need(2);
    if (a[1] != 0 && a[1] != 1) throw ConfigError("constant value must be 0 or 1");
    return constant_function(a[0], a[1] == 1);
  }
  throw ConfigError("unknown function '" + std::string(name) + "'");
}

}  // namespace uql
