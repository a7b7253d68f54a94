#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "embstab/downstream/classifier.hpp"
#include "embstab/embed/embedding.hpp"
#include "embstab/error.hpp"
#include "embstab/graph/labels.hpp"

namespace embstab {

/// Predicted labels on a fixed node list. Multiclass rows hold exactly one
/// entry (argmax); multilabel rows hold every class whose sigmoid clears 1/2.
struct PredictionRun {
  std::vector<NodeId> nodes;
  std::vector<std::vector<std::uint32_t>> predicted;  // sorted per node
  ClassifierMode mode{};
  std::uint64_t classifier_seed = 0;
  std::uint64_t embedding_seed = 0;
};

inline PredictionRun predict(const ClassifierModel& model, const Embedding& emb,
                             const std::vector<NodeId>& nodes) {
  PredictionRun out;
  out.nodes = nodes;
  out.mode = model.mode;
  out.classifier_seed = model.train_seed;
  out.embedding_seed = emb.seed;
  out.predicted.resize(nodes.size());
  const Index l = model.weights.cols();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Eigen::RowVectorXd logits =
        emb.matrix.row(static_cast<Index>(nodes[i])) * model.weights + model.bias;
    auto& row = out.predicted[i];
    if (model.mode == ClassifierMode::multiclass_softmax) {
      Index best = 0;  // ties resolve to the lowest label id
      for (Index j = 1; j < l; ++j)
        if (logits(j) > logits(best)) best = j;
      row.push_back(static_cast<std::uint32_t>(best));
    } else {
      for (Index j = 0; j < l; ++j)
        if (logits(j) > 0.0) row.push_back(static_cast<std::uint32_t>(j));
    }
  }
  return out;
}

namespace detail {

struct F1Counts {
  std::vector<std::size_t> tp, fp, fn;  // per class

  explicit F1Counts(std::size_t classes) : tp(classes, 0), fp(classes, 0), fn(classes, 0) {}
};

inline F1Counts count_errors(const PredictionRun& run, const NodeLabels& labels) {
  F1Counts c(labels.label_count);
  for (std::size_t i = 0; i < run.nodes.size(); ++i) {
    const auto& pred = run.predicted[i];
    const auto& truth = labels.assignments[run.nodes[i]];
    // Both sides sorted: walk them together.
    std::size_t a = 0, b = 0;
    while (a < pred.size() || b < truth.size()) {
      if (b >= truth.size() || (a < pred.size() && pred[a] < truth[b])) {
        ++c.fp[pred[a]];
        ++a;
      } else if (a >= pred.size() || truth[b] < pred[a]) {
        ++c.fn[truth[b]];
        ++b;
      } else {
        ++c.tp[pred[a]];
        ++a;
        ++b;
      }
    }
  }
  return c;
}

inline double f1_from(std::size_t tp, std::size_t fp, std::size_t fn) {
  const double denom = static_cast<double>(2 * tp + fp + fn);
  return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
}

}  // namespace detail

/// Micro-F1: pool true/false positives and negatives over all classes first.
/// For single-label prediction this equals plain accuracy.
inline double micro_f1(const PredictionRun& run, const NodeLabels& labels) {
  if (run.nodes.empty()) throw InsufficientDataError("f1 over an empty node list");
  const auto c = detail::count_errors(run, labels);
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t j = 0; j < labels.label_count; ++j) {
    tp += c.tp[j];
    fp += c.fp[j];
    fn += c.fn[j];
  }
  return detail::f1_from(tp, fp, fn);
}

/// Macro-F1: unweighted mean of per-class F1 over all classes.
inline double macro_f1(const PredictionRun& run, const NodeLabels& labels) {
  if (run.nodes.empty()) throw InsufficientDataError("f1 over an empty node list");
  if (labels.label_count == 0) throw InsufficientDataError("no classes defined");
  const auto c = detail::count_errors(run, labels);
  double total = 0.0;
  for (std::size_t j = 0; j < labels.label_count; ++j)
    total += detail::f1_from(c.tp[j], c.fp[j], c.fn[j]);
  return total / static_cast<double>(labels.label_count);
}

}  // namespace embstab
