#include "uql/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uql {

void StrategyConfig::validate() const {
  if (!(epsilon > 0.0) || epsilon > 0.5) throw ConfigError("epsilon must lie in (0, 0.5]");
  if (budget && !(*budget > 0.0)) throw ConfigError("budget B must be positive");
  if (!(sample_constant > 0.0)) throw ConfigError("sample constant must be positive");
  if (!(error_multiplier > 0.0)) throw ConfigError("error multiplier must be positive");
  if (max_rounds < 1 || max_rounds > 62) throw ConfigError("max rounds must lie in [1, 62]");
}

AnalyzerHandle make_analyzer(const BooleanFunction& f, StatsOptions options) {
  return std::make_shared<const RestrictionAnalyzer>(f, options);
}

int influence_argmax(const Session& s, const std::vector<double>& influence, TieBreak tie) {
  int best = -1;
  double best_inf = 0.0;
  std::int64_t best_steps = 0;
  for (int i = 0; i < s.arity(); ++i) {
    const double a = influence[static_cast<std::size_t>(i)];
    if (!(a > 0.0) || s.revealed(i)) continue;
    const std::int64_t st = s.steps(i);
    int cmp;
    if (best < 0) {
      cmp = 1;
    } else if (st == 0 || best_steps == 0) {
      cmp = st == 0 ? (best_steps == 0 ? 0 : 1) : -1;
    } else {
      const double lhs = a * static_cast<double>(best_steps);
      const double rhs = best_inf * static_cast<double>(st);
      cmp = lhs > rhs ? 1 : (lhs < rhs ? -1 : 0);
    }
    if (cmp > 0 || (cmp == 0 && tie == TieBreak::HighestIndex)) {
      best = i;
      best_inf = a;
      best_steps = st;
    }
  }
  return best;
}

namespace {

std::shared_ptr<const RestrictionStats> current(Session& s, const RestrictionAnalyzer& analyzer) {
  auto st = analyzer.stats(s.restriction());
  if (st->approximate) s.mark_approximate();
  return st;
}

class WarmupIprr final : public Strategy {
 public:
  WarmupIprr(AnalyzerHandle a, StrategyConfig c) : analyzer_(std::move(a)), config_(c) {}
  std::string name() const override { return "warmup-iprr"; }

  bool execute(Session& s, Rng&) const override {
    auto st = current(s, *analyzer_);
    while (st->bias > config_.epsilon) {
      const int i = influence_argmax(s, st->influence, config_.tie_break);
      if (i < 0) break;
      s.record_influence(i, st->influence[static_cast<std::size_t>(i)]);
      if (s.invest(i)) st = current(s, *analyzer_);
    }
    return st->expectation >= 0.5;
  }

 private:
  AnalyzerHandle analyzer_;
  StrategyConfig config_;
};

class Iprr final : public Strategy {
 public:
  Iprr(AnalyzerHandle a, StrategyConfig c) : analyzer_(std::move(a)), config_(c) {}
  std::string name() const override { return "iprr"; }

  bool execute(Session& s, Rng&) const override {
    return iprr_in_session(s, *analyzer_, config_.epsilon, *config_.budget, config_.tie_break);
  }

 private:
  AnalyzerHandle analyzer_;
  StrategyConfig config_;
};

class OnlineQuery final : public Strategy {
 public:
  OnlineQuery(AnalyzerHandle a, StrategyConfig c) : analyzer_(std::move(a)), config_(c) {}
  std::string name() const override { return "online-query"; }
  bool randomized() const override { return true; }

  bool execute(Session& s, Rng& rng) const override {
    const double eps = config_.epsilon;
    const BooleanFunction& f = analyzer_->function();
    for (int i = 1; i <= config_.max_rounds; ++i) {
      const double budget = std::ldexp(1.0, i);
      const auto m = static_cast<std::int64_t>(
          std::ceil(config_.sample_constant / eps * std::log((i + 1) / eps)));
      std::int64_t wrong = 0;
      for (std::int64_t l = 0; l < m; ++l) {
        const Input sample = uniform_input(rng, s.arity());
        Session inner = s.simulate(sample);
        wrong += iprr_in_session(inner, *analyzer_, eps, budget, config_.tie_break) != f(sample);
      }
      if (static_cast<double>(wrong) / static_cast<double>(m) <= config_.error_multiplier * eps) {
        Session real = s.replay();
        return iprr_in_session(real, *analyzer_, eps, budget, config_.tie_break);
      }
    }
    throw ContractViolation("online-query: no round passed the empirical error test");
  }

 private:
  AnalyzerHandle analyzer_;
  StrategyConfig config_;
};

class FollowTree final : public Strategy {
 public:
  explicit FollowTree(DecisionTree t, std::string name = "follow-tree") : tree_(std::move(t)), name_(std::move(name)) {}
  std::string name() const override { return name_; }

  bool execute(Session& s, Rng&) const override {
    if (tree_.max_var() >= s.arity()) throw ConfigError("tree queries coordinates beyond the arity");
    int v = tree_.root();
    while (!tree_.node(v).leaf()) {
      const int i = tree_.node(v).var;
      while (!s.revealed(i)) s.invest(i);
      v = *s.revealed(i) ? tree_.node(v).hi : tree_.node(v).lo;
    }
    return tree_.node(v).value;
  }

 private:
  DecisionTree tree_;
  std::string name_;
};

class CheapestFirst final : public Strategy {
 public:
  CheapestFirst(AnalyzerHandle a, CostVector c) : analyzer_(std::move(a)) {
    validate_costs(c, analyzer_->arity());
    order_.resize(c.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a_, int b_) {
      return c[static_cast<std::size_t>(a_)] < c[static_cast<std::size_t>(b_)];
    });
  }
  std::string name() const override { return "cheapest-first"; }

  bool execute(Session& s, Rng&) const override {
    auto st = current(s, *analyzer_);
    while (!st->constant()) {
      int next = -1;
      for (int i : order_) {
        if (!s.revealed(i) && st->influence[static_cast<std::size_t>(i)] > 0.0) {
          next = i;
          break;
        }
      }
      if (next < 0) break;
      while (!s.invest(next)) {
      }
      st = current(s, *analyzer_);
    }
    return st->expectation >= 0.5;
  }

 private:
  AnalyzerHandle analyzer_;
  std::vector<int> order_;
};

class RoundRobin final : public Strategy {
 public:
  RoundRobin(AnalyzerHandle a, StrategyConfig c) : analyzer_(std::move(a)), config_(c) {}
  std::string name() const override { return "round-robin"; }

  bool execute(Session& s, Rng&) const override {
    const int n = s.arity();
    auto st = current(s, *analyzer_);
    int cursor = 0;
    while (st->bias > config_.epsilon) {
      int i = -1;
      for (int d = 0; d < n; ++d) {
        const int j = (cursor + d) % n;
        if (!s.revealed(j)) {
          i = j;
          break;
        }
      }
      if (i < 0) break;
      cursor = (i + 1) % n;
      if (s.invest(i)) st = current(s, *analyzer_);
    }
    return st->expectation >= 0.5;
  }

 private:
  AnalyzerHandle analyzer_;
  StrategyConfig config_;
};

}  // namespace

bool iprr_in_session(Session& s, const RestrictionAnalyzer& analyzer, double eps, double budget, TieBreak tie) {
  auto st = current(s, analyzer);
  for (;;) {
    const int i = influence_argmax(s, st->influence, tie);
    if (i < 0) break;
    const double inf = st->influence[static_cast<std::size_t>(i)];
    // Inf_i / theta_i < eps / B, written without the division.
    if (s.steps(i) > 0 && inf * budget < eps * s.theta(i)) break;
    s.record_influence(i, inf);
    if (s.invest(i)) st = current(s, analyzer);
  }
  return st->expectation >= 0.5;
}

std::unique_ptr<Strategy> warmup_iprr(AnalyzerHandle analyzer, StrategyConfig config) {
  config.validate();
  return std::make_unique<WarmupIprr>(std::move(analyzer), config);
}

std::unique_ptr<Strategy> iprr(AnalyzerHandle analyzer, StrategyConfig config) {
  config.validate();
  if (!config.budget) throw ConfigError("iprr needs a budget B");
  return std::make_unique<Iprr>(std::move(analyzer), config);
}

std::unique_ptr<Strategy> online_query(AnalyzerHandle analyzer, StrategyConfig config) {
  config.validate();
  return std::make_unique<OnlineQuery>(std::move(analyzer), config);
}

std::unique_ptr<Strategy> follow_tree(DecisionTree tree) { return std::make_unique<FollowTree>(std::move(tree)); }

std::unique_ptr<Strategy> follow_pruned_tree(const DecisionTree& tree, const BooleanFunction& f, double eps) {
  if (!(eps > 0.0)) throw ConfigError("epsilon must be positive");
  const double delta = average_depth(tree);
  const double tau = delta > 0.0 ? eps / delta : 0.0;
  return std::make_unique<FollowTree>(prune(tree, f, tau), "follow-pruned-tree");
}

std::unique_ptr<Strategy> cheapest_first_offline(AnalyzerHandle analyzer, CostVector costs) {
  return std::make_unique<CheapestFirst>(std::move(analyzer), std::move(costs));
}

std::unique_ptr<Strategy> round_robin(AnalyzerHandle analyzer, StrategyConfig config) {
  config.validate();
  return std::make_unique<RoundRobin>(std::move(analyzer), config);
}

std::unique_ptr<Strategy> make_strategy(const StrategyRequest& request, const BooleanFunction& f,
                                        const CostVector& costs, AnalyzerHandle analyzer) {
  if (!analyzer) analyzer = make_analyzer(f);
  const std::string& n = request.name;
  if (n == "warmup-iprr") return warmup_iprr(analyzer, request.config);
  if (n == "iprr") return iprr(analyzer, request.config);
  if (n == "online-query") return online_query(analyzer, request.config);
  if (n == "cheapest-first") return cheapest_first_offline(analyzer, costs);
  if (n == "round-robin") return round_robin(analyzer, request.config);
  if (n == "follow-tree" || n == "follow-pruned-tree") {
    if (!request.tree) throw ConfigError(n + " needs a tree document");
    if (n == "follow-tree") return follow_tree(*request.tree);
    return follow_pruned_tree(*request.tree, f, request.config.epsilon);
  }
  throw ConfigError("unknown strategy '" + n + "'");
}

}  // namespace uql
