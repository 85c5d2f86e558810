#include "uql/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>

#include "uql/families.hpp"
#include "uql/parallel.hpp"
#include "uql/strategies.hpp"

#ifndef UQL_VERSION
#define UQL_VERSION "0.0.0"
#endif

namespace uql {

std::string library_version() { return UQL_VERSION; }

namespace {

struct TrialStats {
  double mean = 0.0;
  double std_error = 0.0;
  double error_rate = 0.0;
  std::uint64_t step_limit = 0;
};

struct TrialResult {
  double cost = 0.0;
  bool wrong = false;
  bool step_limit = false;
};

// Runs trial(t) for t < trials into fixed slots and reduces in index order.
TrialStats collect(std::uint64_t trials, int workers, const std::function<TrialResult(std::uint64_t)>& trial) {
  std::vector<TrialResult> slots(static_cast<std::size_t>(trials));
  parallel_for(slots.size(), [&](std::size_t t) {
    try {
      slots[t] = trial(t);
    } catch (const StepLimitExceeded&) {
      slots[t].step_limit = true;
    }
  }, workers);
  TrialStats s;
  std::uint64_t wrong = 0;
  std::uint64_t ok = 0;
  double sum = 0.0;
  double sq = 0.0;
  for (const auto& r : slots) {
    if (r.step_limit) {
      ++s.step_limit;
      continue;
    }
    ++ok;
    sum += r.cost;
    sq += r.cost * r.cost;
    wrong += r.wrong;
  }
  if (ok > 0) {
    s.mean = sum / static_cast<double>(ok);
    const double var = std::max(0.0, sq / static_cast<double>(ok) - s.mean * s.mean);
    s.std_error = std::sqrt(var / static_cast<double>(ok));
    s.error_rate = static_cast<double>(wrong) / static_cast<double>(ok);
  } else {
    s.mean = std::numeric_limits<double>::infinity();
  }
  return s;
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Builds one CSV row from mixed values.
class Row {
 public:
  Row& operator<<(const std::string& v) { return add(v); }
  Row& operator<<(const char* v) { return add(v); }
  Row& operator<<(double v) { return add(format_number(v)); }
  Row& operator<<(int v) { return add(std::to_string(v)); }
  Row& operator<<(std::uint64_t v) { return add(std::to_string(v)); }
  Row& operator<<(bool v) { return add(v ? "1" : "0"); }
  std::string str() const { return text_ + "\n"; }

 private:
  Row& add(const std::string& v) {
    if (!first_) text_ += ',';
    text_ += v;
    first_ = false;
    return *this;
  }
  std::string text_;
  bool first_ = true;
};

struct Context {
  ExperimentConfig cfg;
  std::uint64_t trials = 0;
  double beta = 0.0;
  double eps = 0.0;
  Json seeds = Json::array();
  Json metrics = Json::object();
  std::string csv;

  std::uint64_t row_seed(std::uint64_t index) {
    const std::uint64_t s = derive_seed(cfg.seed, index);
    seeds.push_back(s);
    return s;
  }
};

double sum_inf_log(const BooleanFunction& f) {
  const auto p = influence_profile(f);
  double s = 0.0;
  for (double inf : p.per_coordinate) {
    if (inf > 0.0) s += inf * (1.0 + std::log(1.0 / inf));
  }
  return s;
}

void exp_and_lb(Context& ctx) {
  ctx.csv = "n,strategy,eps,trials,seed,mean_cost,std_error,error_rate,step_limit,ratio_to_cheapest\n";
  Json cheapest = Json::object();
  Json rr = Json::object();
  for (int n : {4, 8, 16, 32}) {
    const std::uint64_t seed = ctx.row_seed(static_cast<std::uint64_t>(n));
    const BooleanFunction f = and_function(n);
    const AnalyzerHandle analyzer = make_analyzer(f);
    StrategyConfig sc;
    sc.epsilon = std::ldexp(1.0, -(n + 1));
    const auto round = round_robin(analyzer, sc);
    auto trial = [&](bool use_cheapest) {
      return [&, use_cheapest](std::uint64_t t) {
        Rng r(derive_seed(seed, t));
        const Instance inst = and_instance(n, r());
        const Input x = uniform_input(r, n);
        RunRecord rec;
        if (use_cheapest) {
          rec = run(*cheapest_first_offline(analyzer, inst.costs), f, x, inst.costs, ctx.beta);
        } else {
          rec = run(*round, f, x, inst.costs, ctx.beta);
        }
        return TrialResult{rec.total_cost, rec.output != f(x), false};
      };
    };
    const TrialStats cf = collect(ctx.trials, ctx.cfg.workers, trial(true));
    const TrialStats rs = collect(ctx.trials, ctx.cfg.workers, trial(false));
    ctx.csv += (Row() << n << "cheapest-first" << 0.0 << ctx.trials << seed << cf.mean << cf.std_error
                      << cf.error_rate << cf.step_limit << 1.0).str();
    ctx.csv += (Row() << n << "round-robin" << sc.epsilon << ctx.trials << seed << rs.mean << rs.std_error
                      << rs.error_rate << rs.step_limit << rs.mean / cf.mean).str();
    cheapest[std::to_string(n)] = cf.mean;
    rr[std::to_string(n)] = rs.mean;
  }
  ctx.metrics["cheapest_first_mean"] = cheapest;
  ctx.metrics["round_robin_mean"] = rr;
  ctx.metrics["round_robin_growth_32_over_8"] = rr["32"].get<double>() / rr["8"].get<double>();
}

void exp_tribes_lb(Context& ctx) {
  ctx.csv = "w,n,strategy,eps,trials,seed,mean_cost,std_error,error_rate,step_limit,mean_cost_over_2w\n";
  Json cheapest = Json::object();
  Json warm = Json::object();
  for (int w : {1, 2, 3}) {
    const std::uint64_t seed = ctx.row_seed(static_cast<std::uint64_t>(w));
    const BooleanFunction f = tribes_function(w);
    const AnalyzerHandle analyzer = make_analyzer(f);
    StrategyConfig sc;
    sc.epsilon = ctx.eps;
    const auto warmup = warmup_iprr(analyzer, sc);
    auto trial = [&](bool use_cheapest) {
      return [&, use_cheapest](std::uint64_t t) {
        Rng r(derive_seed(seed, t));
        const Instance inst = tribes_instance(w, r());
        const Input x = uniform_input(r, f.arity());
        RunRecord rec;
        if (use_cheapest) {
          rec = run(*cheapest_first_offline(analyzer, inst.costs), f, x, inst.costs, ctx.beta);
        } else {
          rec = run(*warmup, f, x, inst.costs, ctx.beta);
        }
        return TrialResult{rec.total_cost, rec.output != f(x), false};
      };
    };
    const double scale = std::ldexp(1.0, w);
    const TrialStats cf = collect(ctx.trials, ctx.cfg.workers, trial(true));
    const TrialStats wu = collect(ctx.trials, ctx.cfg.workers, trial(false));
    ctx.csv += (Row() << w << f.arity() << "cheapest-first" << 0.0 << ctx.trials << seed << cf.mean << cf.std_error
                      << cf.error_rate << cf.step_limit << cf.mean / scale).str();
    ctx.csv += (Row() << w << f.arity() << "warmup-iprr" << ctx.eps << ctx.trials << seed << wu.mean << wu.std_error
                      << wu.error_rate << wu.step_limit << wu.mean / scale).str();
    cheapest[std::to_string(w)] = cf.mean / scale;
    warm[std::to_string(w)] = wu.mean / scale;
  }
  ctx.metrics["cheapest_first_over_2w"] = cheapest;
  ctx.metrics["warmup_over_2w"] = warm;
  ctx.metrics["warmup_growth_w3_over_w1"] = warm["3"].get<double>() / warm["1"].get<double>();
}

void exp_symmetric(Context& ctx) {
  const int n = 9;
  const BooleanFunction f = majority_function(n);
  const std::uint64_t seed = ctx.row_seed(0);
  Rng r(seed);
  CostVector c(static_cast<std::size_t>(n));
  const auto perm = random_permutation(r, n);
  for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = perm[static_cast<std::size_t>(i)] + 1;
  const AnalyzerHandle analyzer = make_analyzer(f);
  const double opt = symmetric_opt(f, c).opt;
  const double dp = opt_avg_0(f, c).value;
  ctx.csv = "eps,log2_inv_eps,seed,warmup_cost,error,opt,ratio,ratio_over_log,bound,bound_ok\n";
  double fitted = 0.0;
  bool bounds_ok = true;
  double max_error_over_eps = 0.0;
  for (int e = 2; e <= 8; ++e) {
    const double eps = std::ldexp(1.0, -e);
    StrategyConfig sc;
    sc.epsilon = eps;
    const auto warmup = warmup_iprr(analyzer, sc);
    const CostAndError ce = avg_cost_and_error(*warmup, f, c, ctx.beta, EvalMode::exhaustive(), {}, ctx.cfg.workers);
    const double bound = symmetric_opt(f, c, eps, ctx.beta).warmup_bound;
    const double ratio = ce.avg_cost / opt;
    const bool ok = ce.avg_cost <= bound + ctx.beta * n + 1e-9;
    fitted = std::max(fitted, ratio / e);
    bounds_ok = bounds_ok && ok;
    max_error_over_eps = std::max(max_error_over_eps, ce.error / eps);
    ctx.csv += (Row() << eps << e << seed << ce.avg_cost << ce.error << opt << ratio << ratio / e << bound << ok).str();
  }
  ctx.metrics["n"] = n;
  ctx.metrics["costs"] = c;
  ctx.metrics["opt_closed_form"] = opt;
  ctx.metrics["opt_dp"] = dp;
  ctx.metrics["fitted_C"] = fitted;
  ctx.metrics["bounds_ok"] = bounds_ok;
  ctx.metrics["max_error_over_eps"] = max_error_over_eps;
  ctx.metrics["stop_time_check_eps_quarter"] = empirical_stop_time_check(f, 0.25);
}

void exp_hard_instance(Context& ctx) {
  ctx.csv = "k,n,mode,trials,seed,warmup_cost,error,opt,opt_source,tinf,ratio\n";
  StrategyConfig sc;
  sc.epsilon = ctx.eps;
  Json ratios = Json::object();
  for (int k : {1, 2}) {
    const std::uint64_t seed = ctx.row_seed(static_cast<std::uint64_t>(k));
    const Instance inst = hard_instance(k, ctx.beta);
    const BooleanFunction& f = inst.function;
    const auto warmup = warmup_iprr(make_analyzer(f), sc);
    const bool exact = k == 1;
    const EvalMode mode = exact ? EvalMode::exhaustive() : EvalMode::monte_carlo(ctx.trials, seed);
    const CostAndError ce = avg_cost_and_error(*warmup, f, inst.costs, ctx.beta, mode, {}, ctx.cfg.workers);
    const DecisionTree witness = hard_instance_witness_tree(k);
    const auto delta = query_probabilities(witness, f.arity());
    double witness_cost = 0.0;
    for (int i = 0; i < f.arity(); ++i) witness_cost += inst.costs[static_cast<std::size_t>(i)] * delta[static_cast<std::size_t>(i)];
    double opt = witness_cost;
    std::string source = "witness";
    if (exact) {
      opt = opt_avg_0(f, inst.costs).value;
      source = "dp";
      ctx.metrics["k1_witness_cost"] = witness_cost;
      ctx.metrics["k1_dp_opt"] = opt;
    } else {
      ctx.metrics["k2_witness_cost"] = witness_cost;
    }
    const double tinf = total_influence(f);
    const double ratio = ce.avg_cost / (opt * tinf);
    ratios[std::to_string(k)] = ratio;
    ctx.csv += (Row() << k << f.arity() << (exact ? "exact" : "monte-carlo") << (exact ? std::uint64_t{1} << f.arity() : ctx.trials)
                      << seed << ce.avg_cost << ce.error << opt << source << tinf << ratio).str();
    ctx.metrics["tinf_k" + std::to_string(k)] = tinf;
    ctx.metrics["warmup_cost_k" + std::to_string(k)] = ce.avg_cost;
  }
  ctx.metrics["ratio"] = ratios;
  ctx.metrics["ratio_growth_k2_over_k1"] = ratios["2"].get<double>() / ratios["1"].get<double>();
}

struct IprrGridEntry {
  std::string label;
  BooleanFunction f;
};

std::vector<IprrGridEntry> iprr_grid(std::uint64_t seed) {
  std::vector<IprrGridEntry> g;
  g.push_back({"and3", and_function(3)});
  g.push_back({"maj3", majority_function(3)});
  g.push_back({"thr4at2", threshold_function(4, 2)});
  Rng r(seed);
  while (g.size() < 5) {
    TruthTable t = TruthTable::tabulate(4, [&](Input) { return (r() & 1U) != 0; });
    const BooleanFunction f = BooleanFunction::from_table(t);
    if (bias(f) >= 0.25) g.push_back({"random4n" + std::to_string(g.size()), f});
  }
  return g;
}

void exp_iprr(Context& ctx) {
  ctx.csv =
      "label,n,eps,trials,seed,mean_cost,std_error,error_rate,step_limit,opt_avg_lower,opt_avg_upper,bound,"
      "cost_over_bound,opt_worst_eps,iprr_budget,iprr_exact_error\n";
  const auto grid = iprr_grid(derive_seed(ctx.cfg.seed, 1000));
  double max_error = 0.0;
  double max_ratio = 0.0;
  double max_iprr_error_over_eps = 0.0;
  bool finite = true;
  std::uint64_t row = 0;
  for (const auto& entry : grid) {
    const BooleanFunction& f = entry.f;
    const int n = f.arity();
    const std::uint64_t seed = ctx.row_seed(row++);
    Rng r(seed);
    CostVector c(static_cast<std::size_t>(n));
    for (auto& v : c) v = static_cast<double>(1 + uniform_below(r, 8)) * ctx.beta;
    const AnalyzerHandle analyzer = make_analyzer(f);
    StrategyConfig sc;
    sc.epsilon = ctx.eps;
    const auto oq = online_query(analyzer, sc);
    const EvalMode mode = EvalMode::monte_carlo(ctx.trials, seed);
    const TrialStats ce = collect(ctx.trials, ctx.cfg.workers, [&](std::uint64_t t) {
      const auto [x, strategy_seed] = trial_setup(mode, n, t);
      const RunRecord rec = run(*oq, f, x, c, ctx.beta, strategy_seed);
      return TrialResult{rec.total_cost, rec.output != f(x), false};
    });
    const Interval opt = opt_avg_eps(f, c, ctx.eps);
    const double bound = online_query_bound(f, ctx.beta, ctx.eps, opt.lower);
    const double ow = opt_worst_eps(f, c, ctx.eps);
    StrategyConfig ic = sc;
    ic.budget = ow > 0.0 ? ow : ctx.beta;
    const auto ip = iprr(analyzer, ic);
    const CostAndError ie = avg_cost_and_error(*ip, f, c, ctx.beta, EvalMode::exhaustive(), {}, ctx.cfg.workers);
    max_error = std::max(max_error, ce.error_rate);
    max_ratio = std::max(max_ratio, ce.mean / bound);
    max_iprr_error_over_eps = std::max(max_iprr_error_over_eps, ie.error / ctx.eps);
    finite = finite && std::isfinite(ce.mean) && ce.step_limit == 0;
    ctx.csv += (Row() << entry.label << n << ctx.eps << ctx.trials << seed << ce.mean << ce.std_error << ce.error_rate
                      << ce.step_limit << opt.lower << opt.upper << bound << ce.mean / bound << ow << *ic.budget
                      << ie.error).str();
  }
  ctx.metrics["instances"] = static_cast<std::uint64_t>(grid.size());
  ctx.metrics["max_error"] = max_error;
  ctx.metrics["max_cost_over_bound"] = max_ratio;
  ctx.metrics["all_costs_finite"] = finite;
  ctx.metrics["max_iprr_error_over_eps"] = max_iprr_error_over_eps;
}

void exp_pruning(Context& ctx) {
  ctx.csv =
      "case,n,seed,eps,tau,avg_depth,pruned_dist,prune_ok,delta_ok,prop62_ok,pruned_error,pruned_cost,thm64_bound,"
      "thm64_ok\n";
  const std::uint64_t cases = ctx.cfg.trials ? ctx.cfg.trials : 200;
  const std::uint64_t base = ctx.row_seed(0);
  struct Outcome {
    std::string row;
    int violations = 0;
  };
  std::vector<Outcome> out(static_cast<std::size_t>(cases));
  parallel_for(out.size(), [&](std::size_t k) {
    const std::uint64_t seed = derive_seed(base, k);
    Rng r(seed);
    const int n = 1 + static_cast<int>(uniform_below(r, 4));
    const TruthTable table = TruthTable::tabulate(n, [&](Input) { return (r() & 1U) != 0; });
    const BooleanFunction f = BooleanFunction::from_table(table);
    const DecisionTree tree = random_consistent_tree(table, r);
    static const double kEps[] = {0.05, 0.1, 0.2, 0.3, 0.5};
    const double eps = kEps[uniform_below(r, 5)];
    CostVector c(static_cast<std::size_t>(n));
    for (auto& v : c) v = static_cast<double>(1 + uniform_below(r, 8)) * ctx.beta;
    const double depth = average_depth(tree);
    const double tau = depth > 0.0 ? eps / depth : 0.0;

    const DecisionTree pruned = prune_unchecked(tree, f, tau);
    const double pruned_dist = distance(tree_function(pruned, n), f);
    const bool prune_ok = is_everywhere_influential(pruned, f, tau).ok && pruned_dist <= tau * depth + 1e-12;

    // Reveal frequencies of follow-the-tree against delta_i(T).
    const auto follow = follow_tree(tree);
    const auto runs = run_trials(*follow, f, c, ctx.beta, EvalMode::exhaustive(), {}, 1);
    std::vector<double> reveals(static_cast<std::size_t>(n), 0.0);
    for (const auto& t : runs) {
      for (const auto& [i, b] : t.record.reveal_order) reveals[static_cast<std::size_t>(i)] += 1.0;
    }
    bool delta_ok = true;
    for (int i = 0; i < n; ++i) {
      delta_ok = delta_ok && std::ldexp(reveals[static_cast<std::size_t>(i)], -n) == query_probability(tree, i);
    }

    const double opt = opt_avg_0(f, c).value;
    bool prop62_ok = true;
    if (tau > 0.0) {
      const CostAndError pc = avg_cost_and_error(*follow_tree(pruned), f, c, ctx.beta, EvalMode::exhaustive(), {}, 1);
      prop62_ok = pc.avg_cost <= ctx.beta * n + opt / tau + 1e-12;
    }
    const CostAndError fp =
        avg_cost_and_error(*follow_pruned_tree(tree, f, eps), f, c, ctx.beta, EvalMode::exhaustive(), {}, 1);
    const double bound = depth > 0.0 ? ctx.beta * n + opt * depth / eps : ctx.beta * n;
    const bool thm64_ok = fp.error <= eps && fp.avg_cost <= bound + 1e-12;
    out[k].violations = !prune_ok + !delta_ok + !prop62_ok + !thm64_ok;
    out[k].row = (Row() << static_cast<std::uint64_t>(k) << n << seed << eps << tau << depth << pruned_dist << prune_ok
                        << delta_ok << prop62_ok << fp.error << fp.avg_cost << bound << thm64_ok)
                     .str();
  }, ctx.cfg.workers);
  int violations = 0;
  for (const auto& o : out) {
    ctx.csv += o.row;
    violations += o.violations;
  }
  ctx.metrics["cases"] = cases;
  ctx.metrics["violations"] = violations;
}

struct CatalogEntry {
  std::string id;
  std::uint64_t trials;
  double beta;
  double eps;
  void (*run)(Context&);
};

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> c = {
      {"exp-and-lb", 10000, 1.0, 0.0, exp_and_lb},
      {"exp-tribes-lb", 1000, 0.125, 0.2, exp_tribes_lb},
      {"exp-symmetric", 0, 0.0625, 0.0, exp_symmetric},
      {"exp-hard-instance", 20000, 1.0 / 64.0, 0.2, exp_hard_instance},
      {"exp-iprr", 10000, 0.25, 0.1, exp_iprr},
      {"exp-pruning", 200, 0.125, 0.0, exp_pruning},
  };
  return c;
}

}  // namespace

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& e : catalog()) v.push_back(e.id);
    return v;
  }();
  return ids;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const auto it = std::find_if(catalog().begin(), catalog().end(), [&](const CatalogEntry& e) { return e.id == config.id; });
  if (it == catalog().end()) throw ConfigError("unknown experiment '" + config.id + "'");
  if (config.beta < 0.0 || config.eps < 0.0 || config.eps > 0.5) throw ConfigError("beta and eps out of range");
  Context ctx;
  ctx.cfg = config;
  ctx.trials = config.trials ? config.trials : it->trials;
  ctx.beta = config.beta > 0.0 ? config.beta : it->beta;
  ctx.eps = config.eps > 0.0 ? config.eps : it->eps;
  it->run(ctx);

  Json cfg;
  cfg["id"] = config.id;
  cfg["seed"] = config.seed;
  cfg["trials"] = ctx.trials;
  cfg["beta"] = ctx.beta;
  cfg["eps"] = ctx.eps;
  ExperimentResult r;
  r.csv = std::move(ctx.csv);
  r.summary["experiment"] = config.id;
  r.summary["version"] = library_version();
  r.summary["config"] = cfg;
  r.summary["config_hash"] = fnv1a_hex(cfg.dump());
  r.summary["seeds"] = ctx.seeds;
  r.summary["metrics"] = ctx.metrics;
  return r;
}

double warmup_iprr_bound(const BooleanFunction& f, double beta, double eps, double opt_w0) {
  return beta * f.arity() + opt_w0 / eps * sum_inf_log(f);
}

double online_query_bound(const BooleanFunction& f, double beta, double eps, double opt) {
  const double inner = std::max(1.0, std::log2(std::max(1.0, opt))) / eps;
  const double log_factor = std::max(1.0, std::log2(inner));
  return beta * f.arity() + opt / (eps * eps * eps) * log_factor * sum_inf_log(f);
}

std::vector<Instance> random_small_instances(std::size_t count, std::uint64_t seed, double beta) {
  std::vector<Instance> out;
  for (std::size_t k = 0; k < count; ++k) {
    const std::uint64_t s = derive_seed(seed, k);
    Rng r(s);
    const int n = 1 + static_cast<int>(uniform_below(r, 4));
    TruthTable t = TruthTable::tabulate(n, [&](Input) { return (r() & 1U) != 0; });
    CostVector c(static_cast<std::size_t>(n));
    for (auto& v : c) v = static_cast<double>(1 + uniform_below(r, 8)) * beta;
    out.push_back({BooleanFunction::from_table(std::move(t)), std::move(c), "random-n" + std::to_string(n), s});
  }
  return out;
}

DecisionTree random_consistent_tree(const TruthTable& table, Rng& rng) {
  const int n = table.arity();
  std::function<DecisionTree(Restriction)> build = [&](Restriction pi) {
    const TruthTable sub = table.compact(pi);
    const std::uint64_t ones = sub.count_ones();
    if (ones == 0 || ones == sub.points()) return DecisionTree::leaf(ones != 0);
    std::vector<int> free;
    for (int i = 0; i < n; ++i) {
      if (!pi.fixes(i)) free.push_back(i);
    }
    const int v = free[uniform_below(rng, free.size())];
    DecisionTree lo = build(pi.with(v, false));
    DecisionTree hi = build(pi.with(v, true));
    return DecisionTree::query(v, lo, hi);
  };
  return build(Restriction());
}

}  // namespace uql
