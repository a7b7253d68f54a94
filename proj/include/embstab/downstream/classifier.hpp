#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "embstab/downstream/split.hpp"
#include "embstab/embed/embedding.hpp"
#include "embstab/error.hpp"
#include "embstab/graph/labels.hpp"
#include "embstab/linalg/matrix.hpp"
#include "embstab/util/rng.hpp"

namespace embstab {

enum class ClassifierMode { multiclass_softmax, multilabel_ovr };

struct ClassifierParams {
  int epochs = 100;
  int batch_size = 64;
  double lr = 0.1;
  double l2 = 1e-4;  // on weights, not bias
};

struct ClassifierModel {
  Matrix weights;  // d x L
  Eigen::RowVectorXd bias;
  ClassifierMode mode{};
  std::uint64_t train_seed = 0;
};

struct TrainTrace {
  std::vector<double> epoch_mean_loss;
};

/// Mean loss over the given rows plus the L2 term, and (optionally) the
/// gradients. Softmax cross-entropy for single-label data, per-class sigmoid
/// cross-entropy for multi-label. Shared by training and the gradient tests.
inline double classifier_loss(const Matrix& weights, const Eigen::RowVectorXd& bias,
                              ClassifierMode mode, const Matrix& x,
                              const std::vector<std::vector<std::uint32_t>>& targets,
                              double l2, Matrix* grad_w = nullptr,
                              Eigen::RowVectorXd* grad_b = nullptr) {
  const Index b = x.rows();
  const Index l = weights.cols();
  if (b == 0) throw InsufficientDataError("classifier loss over an empty batch");
  if (targets.size() != static_cast<std::size_t>(b))
    throw DimensionError("targets disagree with batch rows");

  Matrix logits = x * weights;          // b x L
  logits.rowwise() += bias;
  Matrix residual(b, l);                // dLoss/dLogits, scaled by 1/b later
  double data_loss = 0.0;

  if (mode == ClassifierMode::multiclass_softmax) {
    for (Index i = 0; i < b; ++i) {
      const auto& t = targets[static_cast<std::size_t>(i)];
      if (t.size() != 1)
        throw ConfigError("softmax mode needs exactly one label per node");
      const double mx = logits.row(i).maxCoeff();
      const Eigen::RowVectorXd shifted = logits.row(i).array() - mx;
      const Eigen::RowVectorXd expd = shifted.array().exp();
      const double z = expd.sum();
      residual.row(i) = expd / z;
      residual(i, static_cast<Index>(t[0])) -= 1.0;
      data_loss -= shifted(static_cast<Index>(t[0])) - std::log(z);
    }
  } else {
    for (Index i = 0; i < b; ++i) {
      Eigen::RowVectorXd y = Eigen::RowVectorXd::Zero(l);
      for (std::uint32_t c : targets[static_cast<std::size_t>(i)])
        y(static_cast<Index>(c)) = 1.0;
      for (Index j = 0; j < l; ++j) {
        const double z = logits(i, j);
        residual(i, j) = 1.0 / (1.0 + std::exp(-z)) - y(j);
        // Stable binary cross-entropy: max(z,0) - y z + log(1 + exp(-|z|)).
        data_loss += std::max(z, 0.0) - y(j) * z + std::log1p(std::exp(-std::abs(z)));
      }
    }
  }
  data_loss /= static_cast<double>(b);
  const double reg = 0.5 * l2 * weights.squaredNorm();

  if (grad_w) {
    *grad_w = x.transpose() * residual / static_cast<double>(b) + l2 * weights;
    if (grad_b) *grad_b = residual.colwise().sum() / static_cast<double>(b);
  }
  return data_loss + reg;
}

/// Seeded logistic regression on the train rows of one embedding: Gaussian
/// weight init, per-epoch reshuffled minibatches, fixed-step gradient
/// descent. The seed is the only source of run-to-run variation.
inline ClassifierModel train_classifier(const Embedding& emb, const NodeLabels& labels,
                                        const SplitSpec& split,
                                        const ClassifierParams& params,
                                        std::uint64_t seed,
                                        TrainTrace* trace = nullptr) {
  if (params.epochs < 1) throw ConfigError("classifier needs epochs >= 1");
  if (params.batch_size < 1) throw ConfigError("classifier needs batch_size >= 1");
  if (!(params.lr > 0.0)) throw ConfigError("classifier learning rate must be positive");
  if (params.l2 < 0.0) throw ConfigError("classifier l2 must be non-negative");
  if (split.train_idx.empty()) throw InsufficientDataError("empty training split");
  if (labels.label_count < 2)
    throw InsufficientDataError("classification needs at least two classes");

  const Index d = emb.matrix.cols();
  const auto l = static_cast<Index>(labels.label_count);
  ClassifierModel model;
  model.mode = labels.multi_label ? ClassifierMode::multilabel_ovr
                                  : ClassifierMode::multiclass_softmax;
  model.train_seed = seed;

  Rng rng(derive_seed(seed, 0x636c66ULL));
  model.weights.resize(d, l);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < l; ++j) model.weights(i, j) = 0.01 * rng.gaussian();
  model.bias = Eigen::RowVectorXd::Zero(l);

  const std::size_t n = split.train_idx.size();
  Matrix xtrain(static_cast<Index>(n), d);
  std::vector<std::vector<std::uint32_t>> ytrain(n);
  for (std::size_t i = 0; i < n; ++i) {
    xtrain.row(static_cast<Index>(i)) =
        emb.matrix.row(static_cast<Index>(split.train_idx[i]));
    ytrain[i] = labels.assignments[split.train_idx[i]];
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Matrix grad_w;
  Eigen::RowVectorXd grad_b;
  Matrix xbatch;
  std::vector<std::vector<std::uint32_t>> ybatch;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n;
         start += static_cast<std::size_t>(params.batch_size)) {
      const std::size_t stop =
          std::min(n, start + static_cast<std::size_t>(params.batch_size));
      const auto bs = static_cast<Index>(stop - start);
      xbatch.resize(bs, d);
      ybatch.assign(static_cast<std::size_t>(bs), {});
      for (std::size_t i = start; i < stop; ++i) {
        xbatch.row(static_cast<Index>(i - start)) =
            xtrain.row(static_cast<Index>(order[i]));
        ybatch[i - start] = ytrain[order[i]];
      }
      const double loss = classifier_loss(model.weights, model.bias, model.mode,
                                          xbatch, ybatch, params.l2, &grad_w, &grad_b);
      if (!std::isfinite(loss))
        throw NumericError("classifier loss diverged; lower the learning rate");
      model.weights -= params.lr * grad_w;
      model.bias -= params.lr * grad_b;
      epoch_loss += loss;
      ++batches;
    }
    if (trace)
      trace->epoch_mean_loss.push_back(epoch_loss / static_cast<double>(batches));
  }
  return model;
}

}  // namespace embstab
