#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "uql/boolfn.hpp"
#include "uql/costsim.hpp"
#include "uql/dtree.hpp"
#include "uql/instances.hpp"
#include "uql/oracle.hpp"

namespace uql {

using Json = nlohmann::ordered_json;

// Function specification: {"family": ..., family fields}. Throws ConfigError
// on malformed documents.
BooleanFunction function_from_json(const Json& spec);
Json function_to_json(const BooleanFunction& f);

DecisionTree tree_from_json(const Json& doc);
Json tree_to_json(const DecisionTree& t);

Instance instance_from_json(const Json& doc);
Json instance_to_json(const Instance& inst);

Json run_record_to_json(const RunRecord& r);
Json benchmark_to_json(const BenchmarkResult& b);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// "%.12g", used in every CSV.
std::string format_number(double v);
// x_0 first.
std::string input_bits(Input x, int n);
// "i:b|i:b" in reveal order.
std::string reveals_string(const RunRecord& r);

// trial,input,output,correct,total_cost,reveals,status
std::string trials_csv(const std::vector<TrialOutcome>& trials, int n);

}  // namespace uql
