#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "uql/boolfn.hpp"

namespace uql {

// Memoized restricted_stats for one function. Values are a pure function of
// the restriction, so sharing one analyzer across concurrent runs does not
// affect results.
class RestrictionAnalyzer {
 public:
  explicit RestrictionAnalyzer(BooleanFunction f, StatsOptions options = {});

  const BooleanFunction& function() const { return f_; }
  int arity() const { return f_.arity(); }
  std::shared_ptr<const RestrictionStats> stats(const Restriction& pi) const;

 private:
  struct KeyHash {
    std::size_t operator()(const std::pair<Input, Input>& k) const;
  };

  BooleanFunction f_;
  StatsOptions options_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::pair<Input, Input>, std::shared_ptr<const RestrictionStats>, KeyHash> cache_;
};

}  // namespace uql
