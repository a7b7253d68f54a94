#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "embstab/error.hpp"
#include "embstab/graph/labels.hpp"
#include "embstab/util/rng.hpp"

namespace embstab {

struct SplitSpec {
  std::vector<NodeId> train_idx;  // ascending node ids
  std::vector<NodeId> test_idx;
  std::uint64_t seed = 0;
  double fraction = 0.0;
  bool stratified = false;
  bool stratification_fallback = false;  // asked for stratified, had to degrade
};

/// Train/test split over the labeled nodes. Single-label data is stratified
/// per class with largest-remainder rounding toward ceil(fraction * total)
/// train nodes overall; a class with fewer than 2 members forces a plain
/// shuffled split instead (flagged). Multi-label data always splits plain.
inline SplitSpec make_split(const NodeLabels& labels, double fraction,
                            std::uint64_t seed) {
  if (!(fraction > 0.0) || !(fraction < 1.0))
    throw ConfigError("split fraction must lie in (0, 1)");

  std::vector<NodeId> labeled;
  for (NodeId v = 0; v < labels.assignments.size(); ++v)
    if (labels.has_labels(v)) labeled.push_back(v);
  if (labeled.size() < 2)
    throw InsufficientDataError("a split needs at least two labeled nodes");

  SplitSpec out;
  out.seed = seed;
  out.fraction = fraction;
  const auto total_train = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(labeled.size())));

  bool stratify = !labels.multi_label;
  std::map<std::uint32_t, std::vector<NodeId>> by_class;
  if (stratify) {
    for (NodeId v : labeled) by_class[labels.assignments[v][0]].push_back(v);
    for (const auto& [cls, members] : by_class) {
      if (members.size() < 2) {
        stratify = false;
        out.stratification_fallback = true;
        break;
      }
    }
  }
  out.stratified = stratify;

  Rng rng(seed);
  std::vector<std::uint8_t> in_train(labels.assignments.size(), 0);
  if (stratify) {
    // Integer quotas per class, remainders settled largest first.
    std::vector<std::pair<double, std::uint32_t>> remainders;
    std::map<std::uint32_t, std::size_t> quota;
    std::size_t assigned = 0;
    for (const auto& [cls, members] : by_class) {
      const double exact =
          fraction * static_cast<double>(members.size());
      quota[cls] = static_cast<std::size_t>(std::floor(exact));
      assigned += quota[cls];
      remainders.push_back({exact - std::floor(exact), cls});
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [rem, cls] : remainders) {
      if (assigned >= total_train) break;
      if (quota[cls] < by_class[cls].size()) {
        ++quota[cls];
        ++assigned;
      }
    }
    for (auto& [cls, members] : by_class) {
      rng.shuffle(members);
      for (std::size_t i = 0; i < quota[cls]; ++i) in_train[members[i]] = 1;
    }
  } else {
    std::vector<NodeId> pool = labeled;
    rng.shuffle(pool);
    for (std::size_t i = 0; i < total_train && i < pool.size(); ++i)
      in_train[pool[i]] = 1;
  }

  for (NodeId v : labeled)
    (in_train[v] ? out.train_idx : out.test_idx).push_back(v);
  if (out.train_idx.empty() || out.test_idx.empty())
    throw InsufficientDataError("split left one side empty; adjust the fraction");
  return out;
}

}  // namespace embstab
