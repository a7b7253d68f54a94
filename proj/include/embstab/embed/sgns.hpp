#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "embstab/error.hpp"
#include "embstab/linalg/matrix.hpp"
#include "embstab/util/alias.hpp"
#include "embstab/util/rng.hpp"

namespace embstab {

/// Skip-gram with negative sampling, shared by node2vec and LINE.
struct SgnsOptions {
  int negatives = 5;
  double initial_lr = 0.025;
  double noise_exponent = 0.75;      // noise distribution is weights^exponent
  double lr_floor_fraction = 1e-4;   // lr never drops below initial_lr * this
  bool shared_table = false;         // contexts live in the input table (LINE-1)
};

struct SgnsStats {
  double early_mean_loss = 0.0;  // mean loss over the first tenth of pairs
  double late_mean_loss = 0.0;   // mean loss over the last tenth
  std::size_t pair_count = 0;
};

struct SgnsResult {
  Matrix input;
  Matrix context;
  SgnsStats stats;
};

namespace detail {
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double safe_log(double x) { return std::log(std::max(x, 1e-300)); }
constexpr std::uint64_t kSgnsInitTag = 0x736e67692e696e69ULL;
constexpr std::uint64_t kSgnsNegTag = 0x736e67692e6e6567ULL;
}  // namespace detail

/// Loss of one training pair under the current tables, without updating them.
/// Negative draws that collide with the positive context are skipped (the
/// draw is consumed but contributes nothing); with a shared table, draws that
/// collide with the center are skipped too, since updating them would alias
/// the center row mid-update.
inline double sgns_pair_loss(const Matrix& input, const Matrix& context,
                             std::uint32_t center, std::uint32_t positive,
                             std::span<const std::uint32_t> negatives,
                             bool shared_table) {
  const auto in = input.row(center);
  double loss = -detail::safe_log(detail::sigmoid(in.dot(context.row(positive))));
  for (std::uint32_t neg : negatives) {
    if (neg == positive) continue;
    if (shared_table && neg == center) continue;
    loss -= detail::safe_log(1.0 - detail::sigmoid(in.dot(context.row(neg))));
  }
  return loss;
}

/// One gradient step on a (center, positive, negatives) example, in the
/// classic reference order: every context row is updated against the stale
/// center vector, whose own update is accumulated and applied last. Returns
/// the example's loss under the pre-update tables.
inline double sgns_pair_update(Matrix& input, Matrix& context, std::uint32_t center,
                               std::uint32_t positive,
                               std::span<const std::uint32_t> negatives, double lr,
                               bool shared_table, Eigen::RowVectorXd& scratch) {
  auto in = input.row(center);
  scratch.setZero();
  double loss = 0.0;

  {
    auto ctx = context.row(positive);
    const double f = detail::sigmoid(in.dot(ctx));
    loss -= detail::safe_log(f);
    const double g = (1.0 - f) * lr;
    scratch += g * ctx;
    ctx += g * in;
  }
  for (std::uint32_t neg : negatives) {
    if (neg == positive) continue;
    if (shared_table && neg == center) continue;
    auto ctx = context.row(neg);
    const double f = detail::sigmoid(in.dot(ctx));
    loss -= detail::safe_log(1.0 - f);
    const double g = -f * lr;
    scratch += g * ctx;
    ctx += g * in;
  }
  in += scratch;
  return loss;
}

/// Streams `total_pairs` training pairs from `next_pair` through SGNS.
///
/// next_pair(center, context_node) must produce pair t on its t-th call; the
/// engine owns everything else: table init (input uniform in
/// [-0.5/dim, 0.5/dim], context zeros), the noise alias table over
/// noise_weights^noise_exponent, negative draws, and the linear learning-rate
/// decay from initial_lr down to its floor across total_pairs.
///
/// Randomness splits into fixed per-purpose substreams of `seed`, so init
/// draws never shift negative draws. Single-threaded by construction: the
/// update order is part of the contract (same seed, same tables, bit for bit).
template <typename PairSource>
SgnsResult sgns_train(std::size_t node_count, Index dim, std::size_t total_pairs,
                      PairSource&& next_pair, std::span<const double> noise_weights,
                      const SgnsOptions& opt, std::uint64_t seed) {
  if (node_count == 0) throw ConfigError("sgns needs at least one node");
  if (dim < 1) throw ConfigError("sgns dimension must be positive");
  if (opt.negatives < 0) throw ConfigError("sgns negative count must be non-negative");
  if (!(opt.initial_lr > 0.0)) throw ConfigError("sgns learning rate must be positive");
  if (noise_weights.size() != node_count)
    throw DimensionError("noise weights must cover every node");

  SgnsResult out;
  {
    Rng init_rng(derive_seed(seed, detail::kSgnsInitTag));
    out.input.resize(static_cast<Index>(node_count), dim);
    const double span = 0.5 / static_cast<double>(dim);
    for (Index i = 0; i < out.input.rows(); ++i)
      for (Index j = 0; j < dim; ++j) out.input(i, j) = init_rng.uniform(-span, span);
  }
  if (opt.shared_table) {
    out.context.resize(0, 0);
  } else {
    out.context = Matrix::Zero(static_cast<Index>(node_count), dim);
  }
  Matrix& context = opt.shared_table ? out.input : out.context;

  std::vector<double> transformed(noise_weights.size());
  for (std::size_t i = 0; i < noise_weights.size(); ++i) {
    if (!(noise_weights[i] >= 0.0) || !std::isfinite(noise_weights[i]))
      throw ConfigError("noise weights must be finite and non-negative");
    transformed[i] = std::pow(noise_weights[i], opt.noise_exponent);
  }
  const AliasTable noise(transformed);
  Rng neg_rng(derive_seed(seed, detail::kSgnsNegTag));

  const double lr_floor = opt.initial_lr * opt.lr_floor_fraction;
  const std::size_t tenth = (total_pairs + 9) / 10;
  double early_sum = 0.0, late_sum = 0.0;
  std::size_t early_n = 0, late_n = 0;

  Eigen::RowVectorXd scratch(dim);
  std::vector<std::uint32_t> negs(static_cast<std::size_t>(opt.negatives));
  for (std::size_t t = 0; t < total_pairs; ++t) {
    const double progress = static_cast<double>(t) / static_cast<double>(total_pairs);
    const double lr = std::max(opt.initial_lr * (1.0 - progress), lr_floor);

    std::uint32_t center = 0, ctx_node = 0;
    next_pair(center, ctx_node);
    if (center >= node_count || ctx_node >= node_count)
      throw DimensionError("training pair references a node out of range");
    for (auto& n : negs) n = noise.sample(neg_rng);

    const double loss = sgns_pair_update(out.input, context, center, ctx_node, negs,
                                         lr, opt.shared_table, scratch);
    if (!std::isfinite(loss))
      throw NumericError("sgns loss diverged; lower the learning rate");
    if (t < tenth) {
      early_sum += loss;
      ++early_n;
    }
    if (t + tenth >= total_pairs) {
      late_sum += loss;
      ++late_n;
    }
  }
  out.stats.pair_count = total_pairs;
  if (total_pairs > 0) {
    // Zero pairs is legal and leaves the seeded initialization untouched.
    out.stats.early_mean_loss = early_sum / static_cast<double>(early_n);
    out.stats.late_mean_loss = late_sum / static_cast<double>(late_n);
  }
  if (opt.shared_table) out.context = out.input;
  return out;
}

}  // namespace embstab
