#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "embstab/downstream/classifier.hpp"
#include "embstab/downstream/predictions.hpp"
#include "embstab/error.hpp"
#include "embstab/util/parallel.hpp"
#include "embstab/util/rng.hpp"

namespace embstab {

struct CvResult {
  std::vector<double> micro_f1;  // folds x reps values
  double mean = 0.0;
  double stdev = 0.0;  // sample standard deviation
  bool stratified = false;
  int folds = 0;
  int reps = 0;
};

/// Repeated k-fold cross-validation of one embedding. Folds are stratified
/// per class when every class has at least `folds` members, plain otherwise.
/// Each (rep, fold) fit gets its own derived classifier seed.
inline CvResult cross_validate(const Embedding& emb, const NodeLabels& labels,
                               const ClassifierParams& params, int folds, int reps,
                               std::uint64_t seed, std::size_t workers = 1) {
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (reps < 1) throw ConfigError("cross-validation needs at least 1 repetition");

  std::vector<NodeId> labeled;
  for (NodeId v = 0; v < labels.assignments.size(); ++v)
    if (labels.has_labels(v)) labeled.push_back(v);
  if (labeled.size() < static_cast<std::size_t>(folds))
    throw InsufficientDataError("fewer labeled nodes than folds");

  bool stratify = !labels.multi_label;
  if (stratify) {
    std::map<std::uint32_t, std::size_t> counts;
    for (NodeId v : labeled) ++counts[labels.assignments[v][0]];
    for (const auto& [cls, c] : counts)
      if (c < static_cast<std::size_t>(folds)) {
        stratify = false;
        break;
      }
  }

  CvResult out;
  out.stratified = stratify;
  out.folds = folds;
  out.reps = reps;

  // fold_of[rep][i] is labeled[i]'s fold in that repetition.
  std::vector<std::vector<int>> fold_of(static_cast<std::size_t>(reps),
                                        std::vector<int>(labeled.size(), 0));
  {
    Rng rng(derive_seed(seed, 0x63762e666f6c6473ULL));
    std::map<std::uint32_t, std::vector<std::size_t>> groups;
    if (stratify) {
      for (std::size_t i = 0; i < labeled.size(); ++i)
        groups[labels.assignments[labeled[i]][0]].push_back(i);
    } else {
      for (std::size_t i = 0; i < labeled.size(); ++i) groups[0].push_back(i);
    }
    for (int rep = 0; rep < reps; ++rep) {
      int next_fold = 0;  // deal members round-robin, continuing across classes
      for (auto& [cls, members] : groups) {
        rng.shuffle(members);
        for (std::size_t m : members) {
          fold_of[static_cast<std::size_t>(rep)][m] = next_fold;
          next_fold = (next_fold + 1) % folds;
        }
      }
    }
  }

  struct Job {
    int rep;
    int fold;
  };
  std::vector<Job> jobs;
  for (int rep = 0; rep < reps; ++rep)
    for (int fold = 0; fold < folds; ++fold) jobs.push_back({rep, fold});
  out.micro_f1.assign(jobs.size(), 0.0);

  parallel_for(jobs.size(), workers, [&](std::size_t j) {
    const auto [rep, fold] = jobs[j];
    SplitSpec split;
    split.stratified = stratify;
    split.fraction = 1.0 - 1.0 / static_cast<double>(folds);
    for (std::size_t i = 0; i < labeled.size(); ++i) {
      if (fold_of[static_cast<std::size_t>(rep)][i] == fold)
        split.test_idx.push_back(labeled[i]);
      else
        split.train_idx.push_back(labeled[i]);
    }
    if (split.test_idx.empty() || split.train_idx.empty())
      throw InsufficientDataError("a cross-validation fold came up empty");
    const std::uint64_t cls_seed =
        derive_seed(seed, 0x63762e666974ULL + static_cast<std::uint64_t>(j));
    const ClassifierModel model =
        train_classifier(emb, labels, split, params, cls_seed);
    out.micro_f1[j] = micro_f1(predict(model, emb, split.test_idx), labels);
  });

  for (double v : out.micro_f1) out.mean += v;
  out.mean /= static_cast<double>(out.micro_f1.size());
  double ss = 0.0;
  for (double v : out.micro_f1) ss += (v - out.mean) * (v - out.mean);
  out.stdev = out.micro_f1.size() > 1
                  ? std::sqrt(ss / static_cast<double>(out.micro_f1.size() - 1))
                  : 0.0;
  return out;
}

}  // namespace embstab
