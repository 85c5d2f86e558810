#include "uql/dtree.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace uql {

namespace {

int append_subtree(std::vector<DecisionTree::Node>& out, const DecisionTree& t, int id) {
  const auto& n = t.node(id);
  if (n.leaf()) {
    out.push_back(n);
    return static_cast<int>(out.size()) - 1;
  }
  const int lo = append_subtree(out, t, n.lo);
  const int hi = append_subtree(out, t, n.hi);
  out.push_back({n.var, lo, hi, false});
  return static_cast<int>(out.size()) - 1;
}

std::uint64_t subcube_disagreement(const DecisionTree& t, int id, const BooleanFunction& f,
                                   const Restriction& rho) {
  const Input free = ~rho.mask() & low_mask(f.arity());
  std::uint64_t c = 0;
  Input s = 0;
  do {
    const Input x = rho.values() | s;
    int v = id;
    while (!t.node(v).leaf()) v = bit_of(x, t.node(v).var) ? t.node(v).hi : t.node(v).lo;
    c += t.node(v).value != f(x);
    s = (s - free) & free;
  } while (s != 0);
  return c;
}

double path_influence(const BooleanFunction& f, const Restriction& rho, int i) {
  return restricted_stats(f, rho).influence[static_cast<std::size_t>(i)];
}

void check_arity(const DecisionTree& t, const BooleanFunction& f) {
  if (t.max_var() >= f.arity()) {
    throw ConfigError("tree queries coordinate " + std::to_string(t.max_var()) +
                      " beyond arity " + std::to_string(f.arity()));
  }
}

}  // namespace

DecisionTree::DecisionTree(std::vector<Node> nodes, int root) : nodes_(std::move(nodes)), root_(root) {
  const int count = static_cast<int>(nodes_.size());
  if (root < 0 || root >= count) throw ConfigError("tree root reference out of range");
  for (const auto& n : nodes_) {
    if (n.leaf()) continue;
    if (n.var >= kMaxArity) throw ConfigError("tree variable out of range");
    if (n.lo < 0 || n.lo >= count || n.hi < 0 || n.hi >= count) {
      throw ConfigError("tree child reference out of range");
    }
    if (n.var > max_var_) max_var_ = n.var;
  }
  // 0 unvisited, 1 on stack, 2 done.
  std::vector<int> state(static_cast<std::size_t>(count), 0);
  std::function<void(int, Input)> visit = [&](int id, Input path) {
    const auto& n = nodes_[static_cast<std::size_t>(id)];
    if (n.leaf()) return;
    if (state[static_cast<std::size_t>(id)] == 1) throw ConfigError("tree contains a cycle");
    if (bit_of(path, n.var)) {
      throw ConfigError("tree path queries coordinate " + std::to_string(n.var) + " twice");
    }
    state[static_cast<std::size_t>(id)] = 1;
    const Input next = path | (Input{1} << n.var);
    visit(n.lo, next);
    visit(n.hi, next);
    state[static_cast<std::size_t>(id)] = 2;
  };
  visit(root_, 0);
}

DecisionTree DecisionTree::leaf(bool value) { return DecisionTree({{-1, -1, -1, value}}, 0); }

DecisionTree DecisionTree::query(int var, const DecisionTree& lo, const DecisionTree& hi) {
  if (var < 0) throw ConfigError("query variable must be nonnegative");
  std::vector<Node> nodes;
  const int l = append_subtree(nodes, lo, lo.root());
  const int h = append_subtree(nodes, hi, hi.root());
  nodes.push_back({var, l, h, false});
  const int root = static_cast<int>(nodes.size()) - 1;
  return DecisionTree(std::move(nodes), root);
}

DecisionTree DecisionTree::subtree(int id) const {
  std::vector<Node> nodes;
  const int root = append_subtree(nodes, *this, id);
  return DecisionTree(std::move(nodes), root);
}

bool tree_eval(const DecisionTree& t, Input x) {
  int v = t.root();
  while (!t.node(v).leaf()) v = bit_of(x, t.node(v).var) ? t.node(v).hi : t.node(v).lo;
  return t.node(v).value;
}

double average_depth(const DecisionTree& t) {
  std::function<double(int)> rec = [&](int id) -> double {
    const auto& n = t.node(id);
    if (n.leaf()) return 0.0;
    return 1.0 + 0.5 * (rec(n.lo) + rec(n.hi));
  };
  return rec(t.root());
}

double average_depth_by_leaves(const DecisionTree& t) {
  double sum = 0.0;
  std::function<void(int, int)> rec = [&](int id, int depth) {
    const auto& n = t.node(id);
    if (n.leaf()) {
      sum += std::ldexp(static_cast<double>(depth), -depth);
      return;
    }
    rec(n.lo, depth + 1);
    rec(n.hi, depth + 1);
  };
  rec(t.root(), 0);
  return sum;
}

std::vector<double> query_probabilities(const DecisionTree& t, int n) {
  std::vector<double> delta(static_cast<std::size_t>(n), 0.0);
  std::function<void(int, int)> rec = [&](int id, int depth) {
    const auto& v = t.node(id);
    if (v.leaf()) return;
    if (v.var < n) delta[static_cast<std::size_t>(v.var)] += std::ldexp(1.0, -depth);
    rec(v.lo, depth + 1);
    rec(v.hi, depth + 1);
  };
  rec(t.root(), 0);
  return delta;
}

double query_probability(const DecisionTree& t, int i) {
  if (i < 0) throw ConfigError("coordinate out of range");
  if (i > t.max_var()) return 0.0;
  return query_probabilities(t, t.max_var() + 1)[static_cast<std::size_t>(i)];
}

BooleanFunction tree_function(const DecisionTree& t, int n) {
  if (t.max_var() >= n) throw ConfigError("tree queries coordinates beyond the arity");
  auto shared = std::make_shared<const DecisionTree>(t);
  BooleanFunction f(n, [shared](Input x) { return tree_eval(*shared, x); }, Family::Tree);
  return f.with_family(Family::Tree, 0).tabulated();
}

InfluentialCheck is_everywhere_influential(const DecisionTree& t, const BooleanFunction& f, double tau) {
  check_arity(t, f);
  InfluentialCheck result;
  std::function<bool(int, Restriction)> rec = [&](int id, Restriction rho) -> bool {
    const auto& v = t.node(id);
    if (v.leaf()) return true;
    if (!(path_influence(f, rho, v.var) >= tau)) {
      result.ok = false;
      result.violating_node = id;
      return false;
    }
    return rec(v.lo, rho.with(v.var, false)) && rec(v.hi, rho.with(v.var, true));
  };
  rec(t.root(), Restriction{});
  return result;
}

DecisionTree prune_unchecked(const DecisionTree& t, const BooleanFunction& f, double tau) {
  check_arity(t, f);
  std::vector<DecisionTree::Node> out;
  std::function<int(int, Restriction)> build = [&](int id, Restriction rho) -> int {
    for (;;) {
      const auto& v = t.node(id);
      if (v.leaf()) {
        out.push_back(v);
        return static_cast<int>(out.size()) - 1;
      }
      if (path_influence(f, rho, v.var) < tau) {
        const auto d0 = subcube_disagreement(t, v.lo, f, rho);
        const auto d1 = subcube_disagreement(t, v.hi, f, rho);
        id = d0 <= d1 ? v.lo : v.hi;
        continue;
      }
      const int lo = build(v.lo, rho.with(v.var, false));
      const int hi = build(v.hi, rho.with(v.var, true));
      out.push_back({v.var, lo, hi, false});
      return static_cast<int>(out.size()) - 1;
    }
  };
  const int root = build(t.root(), Restriction{});
  return DecisionTree(std::move(out), root);
}

DecisionTree prune(const DecisionTree& t, const BooleanFunction& f, double tau) {
  check_arity(t, f);
  const BooleanFunction tf = tree_function(t, f.arity());
  if (distance(tf, f) != 0.0) throw ConfigError("prune: the tree does not compute f");
  DecisionTree pruned = prune_unchecked(t, f, tau);
  const auto check = is_everywhere_influential(pruned, f, tau);
  if (!check.ok) throw ContractViolation("prune: result is not everywhere tau-influential");
  const double dist = distance(tree_function(pruned, f.arity()), f);
  const double bound = tau * average_depth(t);
  if (dist > bound + 1e-12) {
    throw ContractViolation("prune: distance " + std::to_string(dist) + " exceeds tau*Delta(T) = " +
                            std::to_string(bound));
  }
  return pruned;
}

double osss_slack(const BooleanFunction& f, const DecisionTree& t) {
  check_arity(t, f);
  const auto delta = query_probabilities(t, f.arity());
  const auto profile = influence_profile(f);
  double lhs = 0.0;
  for (int i = 0; i < f.arity(); ++i) lhs += delta[static_cast<std::size_t>(i)] * profile.per_coordinate[static_cast<std::size_t>(i)];
  const double error = distance(f, tree_function(t, f.arity()));
  return lhs - (bias(f) - error);
}

bool trees_equal(const DecisionTree& a, const DecisionTree& b) {
  std::function<bool(int, int)> rec = [&](int x, int y) -> bool {
    const auto& u = a.node(x);
    const auto& v = b.node(y);
    if (u.leaf() || v.leaf()) return u.leaf() && v.leaf() && u.value == v.value;
    return u.var == v.var && rec(u.lo, v.lo) && rec(u.hi, v.hi);
  };
  return rec(a.root(), b.root());
}

}  // namespace uql
