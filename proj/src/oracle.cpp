#include "uql/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace uql {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dp_input(const BooleanFunction& f, const CostVector& c, int cap) {
  if (f.arity() > cap) {
    throw ConfigError("DP cap exceeded: arity " + std::to_string(f.arity()) + " > " + std::to_string(cap));
  }
  validate_costs(c, f.arity());
}

// Shared zero-error DP; worst selects max over branches instead of average.
OptResult zero_error_dp(const BooleanFunction& f, const CostVector& c, bool worst) {
  check_dp_input(f, c, kDpCap);
  const RestrictionLattice lat(f);
  const int n = f.arity();
  std::vector<double> v(lat.size(), 0.0);
  OptResult r;
  r.policy.n = n;
  r.policy.action.assign(lat.size(), -1);
  r.policy.output.assign(lat.size(), 0);
  for (std::size_t s = lat.size(); s-- > 0;) {
    if (lat.constant(s)) {
      r.policy.output[s] = lat.ones(s) > 0 ? 1 : 0;
      continue;
    }
    double best = kInf;
    int arg = -1;
    for (int i = 0; i < n; ++i) {
      if (lat.digit(s, i) != 0) continue;
      const double a = v[lat.child(s, i, false)];
      const double b = v[lat.child(s, i, true)];
      const double val = c[static_cast<std::size_t>(i)] + (worst ? std::max(a, b) : 0.5 * (a + b));
      if (val < best) {
        best = val;
        arg = i;
      }
    }
    v[s] = best;
    r.policy.action[s] = static_cast<std::int8_t>(arg);
    r.policy.output[s] = 2 * lat.ones(s) >= lat.cube(s) ? 1 : 0;
  }
  r.value = v[0];
  return r;
}

class PolicyStrategy final : public Strategy {
 public:
  explicit PolicyStrategy(Policy p) : policy_(std::move(p)) {}
  std::string name() const override { return "policy"; }

  bool execute(Session& s, Rng&) const override {
    if (s.arity() != policy_.n) throw ConfigError("policy arity mismatch");
    for (;;) {
      const Restriction& pi = s.restriction();
      std::size_t state = 0;
      std::size_t p = 1;
      for (int i = 0; i < policy_.n; ++i, p *= 3) {
        if (pi.fixes(i)) state += (bit_of(pi.values(), i) ? 2 : 1) * p;
      }
      const int a = policy_.action[state];
      if (a < 0) return policy_.output[state] != 0;
      while (!s.invest(a)) {
      }
    }
  }

 private:
  Policy policy_;
};

}  // namespace

RestrictionLattice::RestrictionLattice(const BooleanFunction& f) : n_(f.arity()) {
  if (n_ > kDpCap) throw ConfigError("restriction lattice beyond the DP cap");
  pow3_.resize(static_cast<std::size_t>(n_) + 1);
  pow3_[0] = 1;
  for (int i = 1; i <= n_; ++i) pow3_[static_cast<std::size_t>(i)] = pow3_[static_cast<std::size_t>(i) - 1] * 3;
  const std::size_t size = pow3_[static_cast<std::size_t>(n_)];
  ones_.assign(size, 0);
  free_.assign(size, 0);
  const TruthTable table = truth_table(f);
  for (std::size_t s = size; s-- > 0;) {
    int first_free = -1;
    int free = 0;
    Input x = 0;
    std::size_t rest = s;
    for (int i = 0; i < n_; ++i, rest /= 3) {
      const auto d = rest % 3;
      if (d == 0) {
        if (first_free < 0) first_free = i;
        ++free;
      } else if (d == 2) {
        x |= Input{1} << i;
      }
    }
    free_[s] = static_cast<std::uint8_t>(free);
    if (first_free < 0) {
      ones_[s] = table.get(x) ? 1 : 0;
    } else {
      ones_[s] = ones_[child(s, first_free, false)] + ones_[child(s, first_free, true)];
    }
  }
}

std::size_t RestrictionLattice::index(const Restriction& pi) const {
  std::size_t s = 0;
  for (int i = 0; i < n_; ++i) {
    if (pi.fixes(i)) s += (bit_of(pi.values(), i) ? 2U : 1U) * pow3_[static_cast<std::size_t>(i)];
  }
  return s;
}

Restriction RestrictionLattice::restriction(std::size_t s) const {
  Restriction pi;
  for (int i = 0; i < n_; ++i) {
    const int d = digit(s, i);
    if (d != 0) pi = pi.with(i, d == 2);
  }
  return pi;
}

double RestrictionLattice::bias(std::size_t s) const {
  const std::uint32_t o = ones_[s];
  return std::ldexp(static_cast<double>(std::min(o, cube(s) - o)), -free_[s]);
}

OptResult opt_avg_0(const BooleanFunction& f, const CostVector& c) { return zero_error_dp(f, c, false); }

OptResult opt_worst_0(const BooleanFunction& f, const CostVector& c) { return zero_error_dp(f, c, true); }

std::vector<double> default_lambda_grid() {
  std::vector<double> g;
  for (int e = -10; e <= 20; ++e) g.push_back(std::ldexp(1.0, e));
  return g;
}

ParetoPoint pareto_point(const BooleanFunction& f, const CostVector& c, double lambda, Policy* policy) {
  check_dp_input(f, c, kDpCap);
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be nonnegative");
  const RestrictionLattice lat(f);
  const int n = f.arity();
  std::vector<double> v(lat.size()), err(lat.size()), cost(lat.size());
  if (policy) {
    policy->n = n;
    policy->action.assign(lat.size(), -1);
    policy->output.assign(lat.size(), 0);
  }
  for (std::size_t s = lat.size(); s-- > 0;) {
    const double stop = lambda * lat.bias(s);
    double best = kInf;
    int arg = -1;
    for (int i = 0; i < n; ++i) {
      if (lat.digit(s, i) != 0) continue;
      const double val = c[static_cast<std::size_t>(i)] + 0.5 * (v[lat.child(s, i, false)] + v[lat.child(s, i, true)]);
      if (val < best) {
        best = val;
        arg = i;
      }
    }
    if (policy) policy->output[s] = 2 * lat.ones(s) >= lat.cube(s) ? 1 : 0;
    if (stop <= best) {
      v[s] = stop;
      err[s] = lat.bias(s);
      cost[s] = 0.0;
    } else {
      const auto s0 = lat.child(s, arg, false);
      const auto s1 = lat.child(s, arg, true);
      v[s] = best;
      err[s] = 0.5 * (err[s0] + err[s1]);
      cost[s] = c[static_cast<std::size_t>(arg)] + 0.5 * (cost[s0] + cost[s1]);
      if (policy) policy->action[s] = static_cast<std::int8_t>(arg);
    }
  }
  return {lambda, err[0], cost[0], v[0]};
}

std::vector<ParetoPoint> pareto_avg(const BooleanFunction& f, const CostVector& c, const std::vector<double>& lambdas) {
  std::vector<ParetoPoint> out;
  out.reserve(lambdas.size());
  for (double l : lambdas) out.push_back(pareto_point(f, c, l));
  return out;
}

Interval opt_avg_eps(const BooleanFunction& f, const CostVector& c, double eps) {
  if (!(eps >= 0.0)) throw ConfigError("eps must be nonnegative");
  Interval r;
  r.upper = opt_avg_0(f, c).value;
  r.lower = 0.0;
  auto absorb = [&](const ParetoPoint& p) {
    if (p.error <= eps) r.upper = std::min(r.upper, p.cost);
    r.lower = std::max(r.lower, p.value - p.lambda * eps);
  };
  const auto grid = default_lambda_grid();
  std::vector<ParetoPoint> pts;
  for (double l : grid) {
    pts.push_back(pareto_point(f, c, l));
    absorb(pts.back());
  }
  for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
    if (pts[j].error > eps && pts[j + 1].error <= eps) {
      double lo = pts[j].lambda;
      double hi = pts[j + 1].lambda;
      for (int it = 0; it < 40; ++it) {
        const double mid = std::sqrt(lo * hi);
        const ParetoPoint p = pareto_point(f, c, mid);
        absorb(p);
        if (p.error > eps) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      break;
    }
  }
  r.lower = std::min(r.lower, r.upper);
  return r;
}

double opt_worst_eps(const BooleanFunction& f, const CostVector& c, double eps) {
  check_dp_input(f, c, 4);
  if (!(eps >= 0.0)) throw ConfigError("eps must be nonnegative");
  const RestrictionLattice lat(f);
  const int n = f.arity();
  const auto budget = static_cast<std::size_t>(std::floor(eps * std::ldexp(1.0, n)));
  const std::size_t kmax = std::min<std::size_t>(budget, std::size_t{1} << n);
  std::vector<std::vector<double>> v(lat.size(), std::vector<double>(kmax + 1, 0.0));
  for (std::size_t s = lat.size(); s-- > 0;) {
    const std::uint32_t wrong = std::min(lat.ones(s), lat.cube(s) - lat.ones(s));
    for (std::size_t k = 0; k <= kmax; ++k) {
      if (wrong <= k) {
        v[s][k] = 0.0;
        continue;
      }
      double best = kInf;
      for (int i = 0; i < n; ++i) {
        if (lat.digit(s, i) != 0) continue;
        const auto& a = v[lat.child(s, i, false)];
        const auto& b = v[lat.child(s, i, true)];
        double split = kInf;
        for (std::size_t k0 = 0; k0 <= k; ++k0) split = std::min(split, std::max(a[k0], b[k - k0]));
        best = std::min(best, c[static_cast<std::size_t>(i)] + split);
      }
      v[s][k] = best;
    }
  }
  return v[0][kmax];
}

double certificate_lower_bound(const BooleanFunction& f, const CostVector& c) {
  validate_costs(c, f.arity());
  const auto p = influence_profile(f);
  double s = 0.0;
  for (int i = 0; i < f.arity(); ++i) s += c[static_cast<std::size_t>(i)] * p.per_coordinate[static_cast<std::size_t>(i)];
  return s;
}

SymmetricStopTimes symmetric_stop_times(const BooleanFunction& f, double eps) {
  if (f.family() != Family::Symmetric) throw ConfigError("symmetric stop times need a symmetric function");
  const auto& prof = f.symmetric_profile();
  const int n = f.arity();
  auto constant_from = [&](int r, int m) {
    for (int k = 1; k <= m; ++k) {
      if (prof[static_cast<std::size_t>(r + k)] != prof[static_cast<std::size_t>(r)]) return false;
    }
    return true;
  };
  auto restricted_bias = [&](int r, int m) {
    double e = 0.0;
    double binom = 1.0;  // C(m, k)
    for (int k = 0; k <= m; ++k) {
      if (prof[static_cast<std::size_t>(r + k)] != 0) e += binom;
      binom = binom * (m - k) / (k + 1);
    }
    e = std::ldexp(e, -m);
    return std::min(e, 1.0 - e);
  };
  SymmetricStopTimes out;
  out.tau0.assign(static_cast<std::size_t>(n) + 1, 0.0);
  out.tau_eps.assign(static_cast<std::size_t>(n) + 1, 0.0);
  for (int which = 0; which < 2; ++which) {
    auto& dist = which == 0 ? out.tau0 : out.tau_eps;
    std::vector<double> mass(1, 1.0);  // mass[r]: not stopped after t reveals with r ones
    for (int t = 0; t <= n; ++t) {
      const int m = n - t;
      std::vector<double> next(static_cast<std::size_t>(t) + 2, 0.0);
      for (int r = 0; r <= t; ++r) {
        const double p = mass[static_cast<std::size_t>(r)];
        if (p == 0.0) continue;
        const bool stop = which == 0 ? constant_from(r, m) : !(restricted_bias(r, m) > eps);
        if (stop || m == 0) {
          dist[static_cast<std::size_t>(t)] += p;
        } else {
          next[static_cast<std::size_t>(r)] += 0.5 * p;
          next[static_cast<std::size_t>(r) + 1] += 0.5 * p;
        }
      }
      mass = std::move(next);
    }
  }
  return out;
}

SymmetricOpt symmetric_opt(const BooleanFunction& f, const CostVector& c, double eps, double beta) {
  validate_costs(c, f.arity());
  const int n = f.arity();
  SymmetricOpt out;
  out.times = symmetric_stop_times(f, eps);
  CostVector sorted = c;
  std::sort(sorted.begin(), sorted.end());
  auto tail = [&](const std::vector<double>& d, int i) {
    double s = 0.0;
    for (int t = i; t <= n; ++t) s += d[static_cast<std::size_t>(t)];
    return s;
  };
  out.warmup_bound = beta * n;
  for (int i = 1; i <= n; ++i) {
    const double ci = sorted[static_cast<std::size_t>(i) - 1];
    out.opt += ci * tail(out.times.tau0, i);
    out.warmup_bound += ci * (tail(out.times.tau_eps, i) + (n - i) * out.times.tau_eps[static_cast<std::size_t>(i)]);
  }
  return out;
}

double empirical_stop_time_check(const BooleanFunction& f, double eps) {
  if (!(eps > 0.0) || eps >= 1.0) throw ConfigError("eps must lie in (0, 1)");
  if (bias(f) < eps) throw ConfigError("empirical stop time check needs bias(f) >= eps");
  const auto times = symmetric_stop_times(f, eps);
  double mean = 0.0;
  for (std::size_t t = 0; t < times.tau0.size(); ++t) mean += static_cast<double>(t) * times.tau0[t];
  return mean * std::log2(1.0 / eps) / f.arity();
}

std::unique_ptr<Strategy> policy_strategy(Policy policy) { return std::make_unique<PolicyStrategy>(std::move(policy)); }

BenchmarkResult benchmark(const BooleanFunction& f, const CostVector& c, const std::vector<double>& eps_list) {
  BenchmarkResult r;
  auto avg = opt_avg_0(f, c);
  r.opt_avg_0 = avg.value;
  r.witness = std::move(avg.policy);
  r.opt_worst_0 = opt_worst_0(f, c).value;
  r.certificate_lower_bound = certificate_lower_bound(f, c);
  r.pareto = pareto_avg(f, c, default_lambda_grid());
  for (double eps : eps_list) {
    EpsBenchmark e;
    e.eps = eps;
    e.opt_avg = opt_avg_eps(f, c, eps);
    if (f.arity() <= 4) e.opt_worst = opt_worst_eps(f, c, eps);
    r.per_eps.push_back(e);
  }
  return r;
}

}  // namespace uql
