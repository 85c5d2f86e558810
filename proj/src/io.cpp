#include "uql/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "uql/families.hpp"

namespace uql {

namespace {

template <class T>
T field(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad field '") + key + "': " + e.what());
  }
}

int node_ref(const Json& v) {
  if (!v.is_number_integer()) throw ConfigError("tree node references must be integers");
  return v.get<int>();
}

Json policy_to_json(const Policy& p) {
  // One character per lattice state: '.' stop with 0, '!' stop with 1, else
  // the queried coordinate in hex.
  std::string table;
  table.reserve(p.action.size());
  for (std::size_t s = 0; s < p.action.size(); ++s) {
    const int a = p.action[s];
    table += a < 0 ? (p.output[s] ? '!' : '.') : "0123456789abcdef"[a];
  }
  Json j;
  j["n"] = p.n;
  j["encoding"] = "base-3 state index, digit i: 0 free, 1 x_i=0, 2 x_i=1";
  j["table"] = table;
  return j;
}

}  // namespace

BooleanFunction function_from_json(const Json& spec) {
  const auto family = field<std::string>(spec, "family");
  if (family == "truth_table") {
    const int n = field<int>(spec, "n");
    if (n < 0 || n > kEnumerationCap) throw ConfigError("truth table arity out of range");
    return BooleanFunction::from_table(TruthTable::from_hex(n, field<std::string>(spec, "bits")));
  }
  if (family == "symmetric") {
    std::vector<std::uint8_t> p;
    for (int v : field<std::vector<int>>(spec, "profile")) {
      if (v != 0 && v != 1) throw ConfigError("symmetric profile entries must be 0 or 1");
      p.push_back(static_cast<std::uint8_t>(v));
    }
    return symmetric_function(std::move(p));
  }
  if (family == "tribes") return tribes_function(field<int>(spec, "w"));
  if (family == "address") return address_function(field<int>(spec, "k"));
  if (family == "hard_instance") return hard_instance_function(field<int>(spec, "k"));
  if (family == "tree") {
    const int n = field<int>(spec, "n");
    if (n < 0 || n > kEnumerationCap) throw ConfigError("tree function arity out of range");
    if (!spec.contains("tree")) throw ConfigError("missing field 'tree'");
    return tree_function(tree_from_json(spec.at("tree")), n).with_spec(spec.dump());
  }
  throw ConfigError("unknown function family '" + family + "'");
}

Json function_to_json(const BooleanFunction& f) {
  if (!f.spec().empty()) return Json::parse(f.spec());
  if (f.arity() <= kEnumerationCap) return Json::parse(BooleanFunction::from_table(truth_table(f)).spec());
  throw ConfigError("function has no serializable specification");
}

DecisionTree tree_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("nodes") || !doc.at("nodes").is_array()) {
    throw ConfigError("tree document needs a 'nodes' array");
  }
  std::vector<DecisionTree::Node> nodes;
  for (const auto& n : doc.at("nodes")) {
    DecisionTree::Node node;
    if (n.contains("leaf")) {
      const int v = field<int>(n, "leaf");
      if (v != 0 && v != 1) throw ConfigError("leaf values must be 0 or 1");
      node.value = v == 1;
    } else {
      node.var = field<int>(n, "var");
      if (node.var < 0) throw ConfigError("tree variables must be nonnegative");
      if (!n.contains("lo") || !n.contains("hi")) throw ConfigError("internal nodes need 'lo' and 'hi'");
      node.lo = node_ref(n.at("lo"));
      node.hi = node_ref(n.at("hi"));
    }
    nodes.push_back(node);
  }
  if (!doc.contains("root")) throw ConfigError("missing field 'root'");
  return DecisionTree(std::move(nodes), node_ref(doc.at("root")));
}

Json tree_to_json(const DecisionTree& t) {
  Json nodes = Json::array();
  for (const auto& n : t.nodes()) {
    Json j;
    if (n.leaf()) {
      j["leaf"] = n.value ? 1 : 0;
    } else {
      j["var"] = n.var;
      j["lo"] = n.lo;
      j["hi"] = n.hi;
    }
    nodes.push_back(j);
  }
  Json doc;
  doc["nodes"] = nodes;
  doc["root"] = t.root();
  return doc;
}

Instance instance_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("function")) throw ConfigError("instance needs a 'function' field");
  Instance inst{function_from_json(doc.at("function")), field<CostVector>(doc, "costs"), "", 0};
  validate_costs(inst.costs, inst.function.arity());
  if (doc.contains("label")) inst.label = field<std::string>(doc, "label");
  if (doc.contains("seed")) inst.seed = field<std::uint64_t>(doc, "seed");
  return inst;
}

Json instance_to_json(const Instance& inst) {
  Json doc;
  doc["function"] = function_to_json(inst.function);
  doc["costs"] = inst.costs;
  doc["label"] = inst.label;
  doc["seed"] = inst.seed;
  return doc;
}

Json run_record_to_json(const RunRecord& r) {
  Json j;
  j["output"] = r.output ? 1 : 0;
  j["total_cost"] = r.total_cost;
  j["per_variable_theta"] = r.per_variable_theta;
  Json order = Json::array();
  for (const auto& [i, b] : r.reveal_order) order.push_back(Json::array({i, b ? 1 : 0}));
  j["reveal_order"] = order;
  if (r.has_trajectory) {
    Json traj = Json::array();
    for (const auto& [i, v] : r.influence_trajectory) traj.push_back(Json::array({i, v}));
    j["influence_trajectory"] = traj;
  } else {
    j["influence_trajectory"] = nullptr;
  }
  j["steps"] = r.steps;
  j["work_steps"] = r.work_steps;
  j["wasted_invests"] = r.wasted_invests;
  j["approximate"] = r.approximate;
  return j;
}

Json benchmark_to_json(const BenchmarkResult& b) {
  Json j;
  j["opt_avg_0"] = b.opt_avg_0;
  j["opt_worst_0"] = b.opt_worst_0;
  j["certificate_lower_bound"] = b.certificate_lower_bound;
  Json frontier = Json::array();
  for (const auto& p : b.pareto) {
    frontier.push_back({{"lambda", p.lambda}, {"error", p.error}, {"cost", p.cost}, {"value", p.value}});
  }
  j["pareto"] = frontier;
  Json eps = Json::array();
  for (const auto& e : b.per_eps) {
    Json row;
    row["eps"] = e.eps;
    row["opt_avg_lower"] = e.opt_avg.lower;
    row["opt_avg_upper"] = e.opt_avg.upper;
    row["opt_worst"] = e.opt_worst ? Json(*e.opt_worst) : Json(nullptr);
    eps.push_back(row);
  }
  j["per_eps"] = eps;
  j["opt_worst_eps_scope"] = "deterministic strategies";
  j["witness"] = policy_to_json(b.witness);
  return j;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string input_bits(Input x, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int i = 0; i < n; ++i) {
    if (bit_of(x, i)) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

std::string reveals_string(const RunRecord& r) {
  std::string s;
  for (const auto& [i, b] : r.reveal_order) {
    if (!s.empty()) s += '|';
    s += std::to_string(i) + ':' + (b ? '1' : '0');
  }
  return s;
}

std::string trials_csv(const std::vector<TrialOutcome>& trials, int n) {
  std::ostringstream out;
  out << "trial,input,output,correct,total_cost,reveals,status\n";
  for (const auto& t : trials) {
    out << t.trial << ',' << input_bits(t.input, n) << ',';
    if (t.step_limit) {
      out << ",,,,step_limit\n";
      continue;
    }
    out << (t.record.output ? 1 : 0) << ',' << (t.record.output == t.expected ? 1 : 0) << ','
        << format_number(t.record.total_cost) << ',' << reveals_string(t.record) << ",ok\n";
  }
  return out.str();
}

}  // namespace uql
