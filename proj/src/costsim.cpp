#include "uql/costsim.hpp"

#include <cmath>
#include <string>

#include "uql/parallel.hpp"

namespace uql {

void validate_costs(const CostVector& c, int n) {
  if (static_cast<int>(c.size()) != n) {
    throw ConfigError("cost vector has " + std::to_string(c.size()) + " entries for arity " + std::to_string(n));
  }
  for (double v : c) {
    if (std::isnan(v) || v < 0.0) throw ConfigError("costs must be nonnegative");
  }
}

InvestmentState::InvestmentState(int n, double beta_)
    : beta(beta_),
      steps(static_cast<std::size_t>(n), 0),
      revealed(static_cast<std::size_t>(n)),
      reveal_cost(static_cast<std::size_t>(n)) {
  if (!(beta_ > 0.0) || !std::isfinite(beta_)) throw ConfigError("beta must be positive and finite");
}

double InvestmentState::total() const {
  std::int64_t s = 0;
  for (auto v : steps) s += v;
  return static_cast<double>(s) * beta;
}

std::optional<RevealEvent> invest(InvestmentState& state, int i, Input x, const CostVector& c) {
  if (i < 0 || i >= state.arity()) throw ConfigError("invest: coordinate out of range");
  const auto k = static_cast<std::size_t>(i);
  ++state.steps[k];
  if (state.revealed[k]) return std::nullopt;
  const double theta = state.theta(i);
  if (theta >= c[k]) {
    const bool b = bit_of(x, i);
    state.revealed[k] = b;
    state.reveal_cost[k] = theta;
    return RevealEvent{i, b, theta};
  }
  return std::nullopt;
}

class RunContext {
 public:
  RunContext(int n, double beta, Input x_, CostVector c_, RunOptions opts)
      : state(n, beta), x(x_), c(std::move(c_)), options(opts) {}

  void count_work() {
    if (!alive) throw ContractViolation("session used after the run halted");
    if (++work_steps > options.step_limit) {
      throw StepLimitExceeded("step limit of " + std::to_string(options.step_limit) + " invest steps exceeded");
    }
  }

  std::optional<RevealEvent> raise(int i) {
    auto ev = invest(state, i, x, c);
    if (ev) {
      restriction = restriction.with(i, ev->bit);
      reveal_order.emplace_back(i, ev->bit);
    }
    return ev;
  }

  InvestmentState state;
  Input x;
  CostVector c;
  RunOptions options;
  Restriction restriction;
  std::vector<std::pair<int, bool>> reveal_order;
  std::vector<std::pair<int, double>> trajectory;
  std::int64_t work_steps = 0;
  std::int64_t wasted = 0;
  bool approximate = false;
  bool alive = true;
};

struct NestedState {
  std::optional<Input> sample;  // nullopt: the real hidden input
  std::vector<std::int64_t> steps;
  std::vector<std::optional<bool>> revealed;
  std::vector<std::optional<double>> reveal_theta;
  Restriction restriction;
};

Session::Session(std::shared_ptr<RunContext> ctx, std::shared_ptr<NestedState> nested)
    : ctx_(std::move(ctx)), nested_(std::move(nested)) {}

int Session::arity() const { return ctx_->state.arity(); }

double Session::beta() const { return ctx_->state.beta; }

std::int64_t Session::steps(int i) const {
  const auto k = static_cast<std::size_t>(i);
  return nested_ ? nested_->steps.at(k) : ctx_->state.steps.at(k);
}

std::optional<bool> Session::revealed(int i) const {
  const auto k = static_cast<std::size_t>(i);
  return nested_ ? nested_->revealed.at(k) : ctx_->state.revealed.at(k);
}

std::optional<double> Session::reveal_theta(int i) const {
  const auto k = static_cast<std::size_t>(i);
  return nested_ ? nested_->reveal_theta.at(k) : ctx_->state.reveal_cost.at(k);
}

const Restriction& Session::restriction() const {
  return nested_ ? nested_->restriction : ctx_->restriction;
}

std::optional<RevealEvent> Session::invest(int i) {
  if (i < 0 || i >= arity()) throw ConfigError("invest: coordinate out of range");
  ctx_->count_work();
  const auto k = static_cast<std::size_t>(i);
  if (!nested_) {
    if (ctx_->state.revealed[k]) ++ctx_->wasted;
    return ctx_->raise(i);
  }
  NestedState& ns = *nested_;
  ++ns.steps[k];
  if (ns.revealed[k]) {
    ++ctx_->wasted;
    return std::nullopt;
  }
  const double theta = static_cast<double>(ns.steps[k]) * beta();
  bool fire = false;
  if (ctx_->state.revealed[k]) {
    // Case 1: the cost is known up to the grid; use the recorded reveal level.
    fire = theta >= *ctx_->state.reveal_cost[k];
  } else if (ns.steps[k] > ctx_->state.steps[k]) {
    // Case 3: raise the real investment to the simulated level.
    while (ctx_->state.steps[k] < ns.steps[k] && !ctx_->state.revealed[k]) ctx_->raise(i);
    fire = ctx_->state.revealed[k].has_value();
  }
  // Case 2 (simulated level not above the real one) charges nothing.
  if (!fire) return std::nullopt;
  const bool b = bit_of(ns.sample ? *ns.sample : ctx_->x, i);
  ns.revealed[k] = b;
  ns.reveal_theta[k] = theta;
  ns.restriction = ns.restriction.with(i, b);
  return RevealEvent{i, b, theta};
}

Session Session::simulate(Input sample) {
  if (!ctx_->alive) throw ContractViolation("session used after the run halted");
  if ((sample & ~low_mask(arity())) != 0) throw ConfigError("sample input has bits beyond the arity");
  auto ns = std::make_shared<NestedState>();
  ns->sample = sample;
  ns->steps.assign(static_cast<std::size_t>(arity()), 0);
  ns->revealed.resize(static_cast<std::size_t>(arity()));
  ns->reveal_theta.resize(static_cast<std::size_t>(arity()));
  return Session(ctx_, ns);
}

Session Session::replay() {
  if (!ctx_->alive) throw ContractViolation("session used after the run halted");
  auto ns = std::make_shared<NestedState>();
  ns->steps.assign(static_cast<std::size_t>(arity()), 0);
  ns->revealed.resize(static_cast<std::size_t>(arity()));
  ns->reveal_theta.resize(static_cast<std::size_t>(arity()));
  return Session(ctx_, ns);
}

void Session::record_influence(int i, double influence) {
  if (!nested_ && ctx_->options.record_trajectory) ctx_->trajectory.emplace_back(i, influence);
}

void Session::mark_approximate() { ctx_->approximate = true; }

RunRecord run_session(const Strategy& strategy, const BooleanFunction& f, Input x, const CostVector& c,
                      double beta, std::uint64_t seed, const RunOptions& options) {
  const int n = f.arity();
  validate_costs(c, n);
  if ((x & ~low_mask(n)) != 0) throw ConfigError("input has bits beyond the arity");
  auto ctx = std::make_shared<RunContext>(n, beta, x, c, options);
  Session root(ctx, nullptr);
  Rng rng(seed);
  bool output;
  try {
    output = strategy.execute(root, rng);
  } catch (...) {
    ctx->alive = false;
    throw;
  }
  ctx->alive = false;
  RunRecord r;
  r.output = output;
  std::int64_t total_steps = 0;
  r.per_variable_theta.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    total_steps += ctx->state.steps[static_cast<std::size_t>(i)];
    r.per_variable_theta[static_cast<std::size_t>(i)] = ctx->state.theta(i);
  }
  r.total_cost = static_cast<double>(total_steps) * beta;
  r.reveal_order = std::move(ctx->reveal_order);
  r.has_trajectory = options.record_trajectory;
  r.influence_trajectory = std::move(ctx->trajectory);
  r.steps = total_steps;
  r.work_steps = ctx->work_steps;
  r.wasted_invests = ctx->wasted;
  r.approximate = ctx->approximate;
  return r;
}

std::pair<Input, std::uint64_t> trial_setup(const EvalMode& mode, int n, std::uint64_t t) {
  if (mode.exact) return {static_cast<Input>(t), derive_seed(mode.seed, t)};
  Rng r(derive_seed(mode.seed, t));
  const Input x = uniform_input(r, n);
  return {x, r()};
}

namespace {

std::uint64_t trial_count(const Strategy& strategy, const BooleanFunction& f, const EvalMode& mode) {
  if (mode.exact) {
    if (f.arity() > kEnumerationCap) throw ConfigError("exact evaluation beyond the enumeration cap");
    if (strategy.randomized()) throw ConfigError("exact evaluation requires a deterministic strategy");
    return std::uint64_t{1} << f.arity();
  }
  if (mode.trials == 0) throw ConfigError("Monte Carlo evaluation needs at least one trial");
  return mode.trials;
}

}  // namespace

std::vector<TrialOutcome> run_trials(const Strategy& strategy, const BooleanFunction& f, const CostVector& c,
                                     double beta, const EvalMode& mode, const RunOptions& options, int workers) {
  const std::uint64_t count = trial_count(strategy, f, mode);
  std::vector<TrialOutcome> out(static_cast<std::size_t>(count));
  parallel_for(static_cast<std::size_t>(count), [&](std::size_t t) {
    auto [x, seed] = trial_setup(mode, f.arity(), t);
    TrialOutcome& o = out[t];
    o.trial = t;
    o.input = x;
    o.expected = f(x);
    try {
      o.record = run(strategy, f, x, c, beta, seed, options);
    } catch (const StepLimitExceeded&) {
      o.step_limit = true;
    }
  }, workers);
  return out;
}

CostAndError avg_cost_and_error(const Strategy& strategy, const BooleanFunction& f, const CostVector& c,
                                double beta, const EvalMode& mode, const RunOptions& options, int workers) {
  const std::uint64_t count = trial_count(strategy, f, mode);
  constexpr std::uint64_t kChunk = 1024;
  const std::uint64_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<double> cost(static_cast<std::size_t>(chunks), 0.0);
  std::vector<std::uint64_t> errors(static_cast<std::size_t>(chunks), 0);
  parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t k) {
    const std::uint64_t end = std::min<std::uint64_t>(count, (k + 1) * kChunk);
    for (std::uint64_t t = k * kChunk; t < end; ++t) {
      auto [x, seed] = trial_setup(mode, f.arity(), t);
      const RunRecord r = run(strategy, f, x, c, beta, seed, options);
      cost[k] += r.total_cost;
      errors[k] += r.output != f(x);
    }
  }, workers);
  CostAndError out;
  std::uint64_t err = 0;
  for (std::size_t k = 0; k < cost.size(); ++k) {
    out.avg_cost += cost[k];
    err += errors[k];
  }
  out.avg_cost /= static_cast<double>(count);
  out.error = static_cast<double>(err) / static_cast<double>(count);
  return out;
}

}  // namespace uql
