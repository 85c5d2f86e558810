#include "uql/analyzer.hpp"

#include "uql/random.hpp"

namespace uql {

namespace {
constexpr std::size_t kMaxCachedRestrictions = std::size_t{1} << 20;
}

std::size_t RestrictionAnalyzer::KeyHash::operator()(const std::pair<Input, Input>& k) const {
  return static_cast<std::size_t>(splitmix64(k.first) ^ (k.second * 0x9e3779b97f4a7c15ULL));
}

RestrictionAnalyzer::RestrictionAnalyzer(BooleanFunction f, StatsOptions options)
    : f_(std::move(f)), options_(options) {}

std::shared_ptr<const RestrictionStats> RestrictionAnalyzer::stats(const Restriction& pi) const {
  const std::pair<Input, Input> key{pi.mask(), pi.values()};
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto value = std::make_shared<const RestrictionStats>(restricted_stats(f_, pi, options_));
  std::lock_guard lock(mu_);
  if (cache_.size() >= kMaxCachedRestrictions) cache_.clear();
  return cache_.emplace(key, std::move(value)).first->second;
}

}  // namespace uql
