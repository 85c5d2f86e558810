#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uql/experiments.hpp"
#include "uql/io.hpp"
#include "uql/strategies.hpp"

namespace {

using uql::ConfigError;
using uql::Json;

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
  } else {
    uql::write_text_file(out, text);
  }
}

// Instance file, bare function spec file, or a named function ("maj(5)").
uql::Instance load_instance(const std::string& arg) {
  if (std::filesystem::exists(arg)) {
    const Json doc = uql::read_json_file(arg);
    if (doc.contains("function")) return uql::instance_from_json(doc);
    uql::BooleanFunction f = uql::function_from_json(doc);
    const int n = f.arity();
    return {std::move(f), uql::CostVector(static_cast<std::size_t>(n), 1.0), "", 0};
  }
  uql::BooleanFunction f = uql::named_function(arg);
  const int n = f.arity();
  return {std::move(f), uql::CostVector(static_cast<std::size_t>(n), 1.0), arg, 0};
}

// "name" or "name:key=value,key=value" with keys eps, B, tree, tie.
uql::StrategyRequest parse_strategy(const std::string& text, double eps, std::optional<double> budget) {
  uql::StrategyRequest req;
  req.config.epsilon = eps;
  req.config.budget = budget;
  const auto colon = text.find(':');
  req.name = text.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string kv = rest.substr(0, comma);
    rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("strategy parameter '" + kv + "' needs key=value");
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    try {
      if (key == "eps") {
        req.config.epsilon = std::stod(value);
      } else if (key == "B") {
        req.config.budget = std::stod(value);
      } else if (key == "tree") {
        req.tree = uql::tree_from_json(uql::read_json_file(value));
      } else if (key == "tie") {
        if (value != "lowest" && value != "highest") throw ConfigError("tie must be lowest or highest");
        req.config.tie_break = value == "highest" ? uql::TieBreak::HighestIndex : uql::TieBreak::LowestIndex;
      } else {
        throw ConfigError("unknown strategy parameter '" + key + "'");
      }
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const ConfigError*>(&e)) throw;
      throw ConfigError("bad value for strategy parameter '" + key + "'");
    }
  }
  return req;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Priced-query strategy laboratory"};
  app.require_subcommand(1);

  std::string instance;
  std::string strategy;
  std::string tree;
  std::string out;
  std::string summary;
  std::string id;
  double eps = 0.1;
  double beta = uql::kDefaultBeta;
  std::optional<double> budget;
  std::vector<double> eps_list;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  bool exact = false;

  auto* analyze = app.add_subcommand("analyze", "Influence and bias report of a function");
  analyze->add_option("--instance", instance, "Instance or function file, or a named function")->required();
  analyze->add_option("--out", out, "Output path (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Run a strategy and write one CSV row per trial");
  simulate->add_option("--instance", instance, "Instance or function file, or a named function")->required();
  simulate->add_option("--strategy", strategy, "Strategy name, optionally name:key=value,...")->required();
  simulate->add_option("--eps", eps, "Accuracy parameter");
  simulate->add_option("--budget", budget, "IPRR budget B");
  simulate->add_option("--beta", beta, "Unit investment");
  simulate->add_option("--trials", trials, "Monte Carlo trials");
  simulate->add_option("--seed", seed, "Base seed");
  simulate->add_option("--tree", tree, "Tree document for follow-tree strategies");
  simulate->add_flag("--exact", exact, "Enumerate all inputs instead of sampling");
  simulate->add_option("--out", out, "Output path (default stdout)");

  auto* bench = app.add_subcommand("benchmark", "Exact offline benchmarks as JSON");
  bench->add_option("--instance", instance, "Instance or function file, or a named function")->required();
  bench->add_option("--eps", eps_list, "Accuracy levels")->expected(0, -1);
  bench->add_option("--out", out, "Output path (default stdout)");

  auto* experiment = app.add_subcommand("experiment", "Run a catalog experiment");
  experiment->add_option("id", id, "Experiment id")->required();
  experiment->add_option("--seed", seed, "Base seed");
  auto* trials_opt = experiment->add_option("--trials", trials, "Trials (default: catalog)");
  auto* beta_opt = experiment->add_option("--beta", beta, "Unit investment (default: catalog)");
  auto* eps_opt = experiment->add_option("--eps", eps, "Accuracy (default: catalog)");
  experiment->add_option("--out", out, "CSV path (default stdout)");
  experiment->add_option("--summary", summary, "Summary JSON path (default: CSV path with .summary.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (analyze->parsed()) {
    const uql::Instance inst = load_instance(instance);
    const auto profile = uql::influence_profile(inst.function);
    Json j;
    j["function"] = uql::function_to_json(inst.function);
    j["n"] = inst.function.arity();
    j["influence"] = profile.per_coordinate;
    j["total_influence"] = profile.total;
    j["expectation"] = uql::expectation(inst.function);
    j["bias"] = uql::bias(inst.function);
    emit(j.dump(2) + "\n", out);
  } else if (simulate->parsed()) {
    const uql::Instance inst = load_instance(instance);
    uql::StrategyRequest req = parse_strategy(strategy, eps, budget);
    if (!tree.empty()) req.tree = uql::tree_from_json(uql::read_json_file(tree));
    const auto s = uql::make_strategy(req, inst.function, inst.costs);
    const uql::EvalMode mode = exact ? uql::EvalMode{true, 0, seed} : uql::EvalMode::monte_carlo(trials, seed);
    const auto results = uql::run_trials(*s, inst.function, inst.costs, beta, mode);
    emit(uql::trials_csv(results, inst.function.arity()), out);
  } else if (bench->parsed()) {
    const uql::Instance inst = load_instance(instance);
    const auto result = uql::benchmark(inst.function, inst.costs, eps_list);
    emit(uql::benchmark_to_json(result).dump(2) + "\n", out);
  } else if (experiment->parsed()) {
    uql::ExperimentConfig cfg;
    cfg.id = id;
    cfg.seed = seed;
    if (trials_opt->count() > 0) cfg.trials = trials;
    if (beta_opt->count() > 0) cfg.beta = beta;
    if (eps_opt->count() > 0) cfg.eps = eps;
    if ((trials_opt->count() > 0 && trials == 0) || (beta_opt->count() > 0 && !(beta > 0.0)) ||
        (eps_opt->count() > 0 && !(eps > 0.0))) {
      throw ConfigError("trials, beta and eps must be positive");
    }
    const uql::ExperimentResult r = uql::run_experiment(cfg);
    emit(r.csv, out);
    const std::string summary_path =
        !summary.empty() ? summary
                         : (out.empty() ? std::string() : std::filesystem::path(out).replace_extension(".summary.json").string());
    if (summary_path.empty()) {
      std::cerr << r.summary.dump(2) << "\n";
    } else {
      uql::write_text_file(summary_path, r.summary.dump(2) + "\n");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const uql::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const uql::ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
