#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uql/io.hpp"

namespace uql {

std::string library_version();

// Zero trials, beta or eps select the catalog default of the experiment.
struct ExperimentConfig {
  std::string id;
  std::uint64_t seed = 1;
  std::uint64_t trials = 0;
  double beta = 0.0;
  double eps = 0.0;
  int workers = 0;
};

struct ExperimentResult {
  std::string csv;
  // experiment, version, config, config_hash, seeds, metrics
  Json summary;
};

// exp-and-lb, exp-tribes-lb, exp-symmetric, exp-hard-instance, exp-iprr,
// exp-pruning.
const std::vector<std::string>& experiment_ids();
ExperimentResult run_experiment(const ExperimentConfig& config);

// beta n + (opt_w0 / eps) sum_i Inf_i (1 + ln(1/Inf_i)).
double warmup_iprr_bound(const BooleanFunction& f, double beta, double eps, double opt_w0);

// beta n + opt (1/eps^3) max(1, log2(max(1, log2 opt) / eps)) sum_i Inf_i (1 + ln(1/Inf_i)).
double online_query_bound(const BooleanFunction& f, double beta, double eps, double opt);

// Random (f, c) pairs with 1 <= n <= 4, costs in {1..8} * beta.
std::vector<Instance> random_small_instances(std::size_t count, std::uint64_t seed, double beta);

// Decision tree computing the table, querying a uniformly random free
// coordinate (relevant or not) at every node until the restriction is constant.
DecisionTree random_consistent_tree(const TruthTable& table, Rng& rng);

}  // namespace uql
