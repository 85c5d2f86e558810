#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uql/boolfn.hpp"
#include "uql/random.hpp"

namespace uql {

// Cost that no finite investment reaches.
inline constexpr double kNeverReveals = std::numeric_limits<double>::infinity();

using CostVector = std::vector<double>;

void validate_costs(const CostVector& c, int n);

struct RevealEvent {
  int coordinate = -1;
  bool bit = false;
  double theta = 0.0;
};

// theta_i is stored as an integer count of beta steps.
struct InvestmentState {
  double beta = kDefaultBeta;
  std::vector<std::int64_t> steps;
  std::vector<std::optional<bool>> revealed;
  std::vector<std::optional<double>> reveal_cost;

  InvestmentState(int n, double beta);
  int arity() const { return static_cast<int>(steps.size()); }
  double theta(int i) const { return static_cast<double>(steps[static_cast<std::size_t>(i)]) * beta; }
  double total() const;
};

// One beta step on coordinate i against hidden (x, c).
std::optional<RevealEvent> invest(InvestmentState& state, int i, Input x, const CostVector& c);

struct RunRecord {
  bool output = false;
  double total_cost = 0.0;
  std::vector<double> per_variable_theta;
  std::vector<std::pair<int, bool>> reveal_order;
  bool has_trajectory = false;
  std::vector<std::pair<int, double>> influence_trajectory;
  std::int64_t steps = 0;           // direct invest steps on the real state
  std::int64_t work_steps = 0;      // all invest calls, nested sessions included
  std::int64_t wasted_invests = 0;  // invests on already revealed coordinates
  bool approximate = false;
};

struct RunOptions {
  std::int64_t step_limit = kDefaultStepLimit;
  bool record_trajectory = false;
};

class RunContext;
struct NestedState;
class Strategy;

// What a strategy sees of a run: arity, beta, its own investments and the
// revealed bits. Costs and unrevealed input bits are not reachable from here.
class Session {
 public:
  int arity() const;
  double beta() const;
  std::int64_t steps(int i) const;
  double theta(int i) const { return static_cast<double>(steps(i)) * beta(); }
  std::optional<bool> revealed(int i) const;
  // theta_i at which coordinate i was revealed in this session.
  std::optional<double> reveal_theta(int i) const;
  const Restriction& restriction() const;
  bool nested() const { return nested_ != nullptr; }

  std::optional<RevealEvent> invest(int i);

  // Nested session simulating a run on a known sample input. Investments
  // charge the real state only where they exceed it (per-coordinate maximum).
  Session simulate(Input sample);
  // Nested session on the real hidden input with the same accounting.
  Session replay();

  void record_influence(int i, double influence);
  void mark_approximate();

 private:
  friend RunRecord run_session(const Strategy&, const BooleanFunction&, Input, const CostVector&, double,
                               std::uint64_t, const RunOptions&);
  Session(std::shared_ptr<RunContext> ctx, std::shared_ptr<NestedState> nested);

  std::shared_ptr<RunContext> ctx_;
  std::shared_ptr<NestedState> nested_;
};

class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual std::string name() const = 0;
  virtual bool randomized() const { return false; }
  // Drives the session to completion and returns the output bit.
  virtual bool execute(Session& session, Rng& rng) const = 0;
};

RunRecord run_session(const Strategy& strategy, const BooleanFunction& f, Input x, const CostVector& c,
                      double beta, std::uint64_t seed, const RunOptions& options);

inline RunRecord run(const Strategy& strategy, const BooleanFunction& f, Input x, const CostVector& c,
                     double beta, std::uint64_t seed = 0, const RunOptions& options = {}) {
  return run_session(strategy, f, x, c, beta, seed, options);
}

struct EvalMode {
  bool exact = true;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;

  static EvalMode exhaustive() { return {}; }
  static EvalMode monte_carlo(std::uint64_t trials, std::uint64_t seed) { return {false, trials, seed}; }
};

struct TrialOutcome {
  std::uint64_t trial = 0;
  Input input = 0;
  bool expected = false;
  bool step_limit = false;
  RunRecord record;
};

// Input and strategy seed of trial t. Exact mode enumerates inputs in order.
std::pair<Input, std::uint64_t> trial_setup(const EvalMode& mode, int n, std::uint64_t t);

std::vector<TrialOutcome> run_trials(const Strategy& strategy, const BooleanFunction& f, const CostVector& c,
                                     double beta, const EvalMode& mode, const RunOptions& options = {},
                                     int workers = 0);

struct CostAndError {
  double avg_cost = 0.0;
  double error = 0.0;
};

CostAndError avg_cost_and_error(const Strategy& strategy, const BooleanFunction& f, const CostVector& c,
                                double beta, const EvalMode& mode, const RunOptions& options = {},
                                int workers = 0);

}  // namespace uql
