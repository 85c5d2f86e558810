#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "uql/analyzer.hpp"
#include "uql/costsim.hpp"
#include "uql/dtree.hpp"

namespace uql {

enum class TieBreak { LowestIndex, HighestIndex };

struct StrategyConfig {
  double epsilon = 0.1;
  std::optional<double> budget;
  // Online-Query: m_i = ceil(sample_constant / eps * ln((i+1)/eps)), pass if
  // the empirical error is at most error_multiplier * eps.
  double sample_constant = 8.0;
  double error_multiplier = 3.0;
  int max_rounds = 40;
  TieBreak tie_break = TieBreak::LowestIndex;

  void validate() const;
};

using AnalyzerHandle = std::shared_ptr<const RestrictionAnalyzer>;

AnalyzerHandle make_analyzer(const BooleanFunction& f, StatsOptions options = {});

// Coordinate maximizing Inf_i / theta_i over unrevealed coordinates of the
// session; theta_i = 0 counts as +inf when Inf_i > 0 and never wins when
// Inf_i = 0. Returns -1 when every unrevealed influence is 0.
int influence_argmax(const Session& s, const std::vector<double>& influence, TieBreak tie);

// Runs IPRR(eps, B) in a session and returns its output.
bool iprr_in_session(Session& s, const RestrictionAnalyzer& analyzer, double eps, double budget, TieBreak tie);

std::unique_ptr<Strategy> warmup_iprr(AnalyzerHandle analyzer, StrategyConfig config);
std::unique_ptr<Strategy> iprr(AnalyzerHandle analyzer, StrategyConfig config);
std::unique_ptr<Strategy> online_query(AnalyzerHandle analyzer, StrategyConfig config);
std::unique_ptr<Strategy> follow_tree(DecisionTree tree);
// Prunes with tau = eps / Delta(T) (tau = 0 when Delta(T) = 0), then follows.
std::unique_ptr<Strategy> follow_pruned_tree(const DecisionTree& tree, const BooleanFunction& f, double eps);
// Offline baseline: visits coordinates in ascending cost (ties by index),
// skipping those irrelevant to the current restriction, until f_pi is constant.
std::unique_ptr<Strategy> cheapest_first_offline(AnalyzerHandle analyzer, CostVector costs);
std::unique_ptr<Strategy> round_robin(AnalyzerHandle analyzer, StrategyConfig config);

// Parses "warmup-iprr", "iprr", "online-query", "follow-tree",
// "follow-pruned-tree", "cheapest-first", "round-robin".
struct StrategyRequest {
  std::string name;
  StrategyConfig config;
  std::optional<DecisionTree> tree;
};

std::unique_ptr<Strategy> make_strategy(const StrategyRequest& request, const BooleanFunction& f,
                                        const CostVector& costs, AnalyzerHandle analyzer = nullptr);

}  // namespace uql
