#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "uql/boolfn.hpp"
#include "uql/costsim.hpp"

namespace uql {

// All restrictions of an n-variable function (n <= kDpCap), indexed in base 3:
// digit i is 0 when x_i is free, 1 when fixed to 0, 2 when fixed to 1.
class RestrictionLattice {
 public:
  explicit RestrictionLattice(const BooleanFunction& f);

  int arity() const { return n_; }
  std::size_t size() const { return ones_.size(); }
  std::size_t index(const Restriction& pi) const;
  Restriction restriction(std::size_t s) const;
  int digit(std::size_t s, int i) const { return static_cast<int>((s / pow3_[static_cast<std::size_t>(i)]) % 3); }
  std::size_t child(std::size_t s, int i, bool b) const { return s + (b ? 2U : 1U) * pow3_[static_cast<std::size_t>(i)]; }
  std::uint32_t ones(std::size_t s) const { return ones_[s]; }
  int free_count(std::size_t s) const { return free_[s]; }
  std::uint32_t cube(std::size_t s) const { return std::uint32_t{1} << free_[s]; }
  bool constant(std::size_t s) const { return ones_[s] == 0 || ones_[s] == cube(s); }
  double bias(std::size_t s) const;

 private:
  int n_;
  std::vector<std::size_t> pow3_;
  std::vector<std::uint32_t> ones_;
  std::vector<std::uint8_t> free_;
};

// Decision rule per lattice state: the coordinate to query, or -1 to stop
// and output `output[state]`.
struct Policy {
  int n = 0;
  std::vector<std::int8_t> action;
  std::vector<std::uint8_t> output;
};

struct OptResult {
  double value = 0.0;
  Policy policy;
};

OptResult opt_avg_0(const BooleanFunction& f, const CostVector& c);
OptResult opt_worst_0(const BooleanFunction& f, const CostVector& c);

struct ParetoPoint {
  double lambda = 0.0;
  double error = 0.0;
  double cost = 0.0;
  double value = 0.0;  // lambda * error + cost
};

std::vector<double> default_lambda_grid();
ParetoPoint pareto_point(const BooleanFunction& f, const CostVector& c, double lambda, Policy* policy = nullptr);
std::vector<ParetoPoint> pareto_avg(const BooleanFunction& f, const CostVector& c, const std::vector<double>& lambdas);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

// [Lagrangian dual lower bound, best frontier cost with error <= eps], with
// the grid refined by bisection around eps.
Interval opt_avg_eps(const BooleanFunction& f, const CostVector& c, double eps);

// Deterministic strategies only; n <= 4.
double opt_worst_eps(const BooleanFunction& f, const CostVector& c, double eps);

double certificate_lower_bound(const BooleanFunction& f, const CostVector& c);

// Pr[tau = t] for t = 0..n, revealing in ascending cost order.
struct SymmetricStopTimes {
  std::vector<double> tau0;
  std::vector<double> tau_eps;
};

SymmetricStopTimes symmetric_stop_times(const BooleanFunction& f, double eps);

struct SymmetricOpt {
  double opt = 0.0;
  // beta n + sum_i c_(i) [Pr(tau_eps >= i) + (n - i) Pr(tau_eps = i)]
  double warmup_bound = 0.0;
  SymmetricStopTimes times;
};

SymmetricOpt symmetric_opt(const BooleanFunction& f, const CostVector& c, double eps = 0.0, double beta = 0.0);

// E[tau_0] * log2(1/eps) / n; requires bias(f) >= eps.
double empirical_stop_time_check(const BooleanFunction& f, double eps);

// Offline strategy replaying a DP policy.
std::unique_ptr<Strategy> policy_strategy(Policy policy);

struct EpsBenchmark {
  double eps = 0.0;
  Interval opt_avg;
  std::optional<double> opt_worst;
};

struct BenchmarkResult {
  double opt_avg_0 = 0.0;
  double opt_worst_0 = 0.0;
  double certificate_lower_bound = 0.0;
  std::vector<ParetoPoint> pareto;
  std::vector<EpsBenchmark> per_eps;
  Policy witness;  // opt_avg_0 policy
};

BenchmarkResult benchmark(const BooleanFunction& f, const CostVector& c, const std::vector<double>& eps_list);

}  // namespace uql
