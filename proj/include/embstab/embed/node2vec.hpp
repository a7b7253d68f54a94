#pragma once

#include <cstdint>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "embstab/embed/embedding.hpp"
#include "embstab/embed/sgns.hpp"
#include "embstab/error.hpp"
#include "embstab/graph/graph.hpp"
#include "embstab/util/alias.hpp"
#include "embstab/util/digest.hpp"
#include "embstab/util/rng.hpp"

namespace embstab {

struct Node2vecConfig {
  double p = 1.0;  // return bias: 1/p weight for stepping back to the previous node
  double q = 1.0;  // in-out bias: 1/q weight for leaving the previous node's circle
  int walks_per_node = 10;
  int walk_length = 80;
  int window = 10;  // actual context width per center is drawn uniform in [1, window]
  int epochs = 1;
  SgnsOptions sgns;
};

inline void validate(const Node2vecConfig& c) {
  if (!(c.p > 0.0) || !(c.q > 0.0))
    throw ConfigError("node2vec p and q must be positive");
  if (c.walks_per_node < 1) throw ConfigError("node2vec needs walks_per_node >= 1");
  if (c.walk_length < 1) throw ConfigError("node2vec needs walk_length >= 1");
  if (c.window < 1) throw ConfigError("node2vec needs window >= 1");
  if (c.window > c.walk_length)
    throw ConfigError("node2vec window must not exceed walk_length");
  if (c.window > 0xffff) throw ConfigError("node2vec window too large");
  if (c.epochs < 1) throw ConfigError("node2vec needs epochs >= 1");
}

struct WalkCorpus {
  std::vector<NodeId> nodes;          // all walks, concatenated
  std::vector<std::size_t> offsets;   // walk w spans [offsets[w], offsets[w+1])

  std::size_t walk_count() const { return offsets.size() - 1; }
  std::span<const NodeId> walk(std::size_t w) const {
    return {nodes.data() + offsets[w], offsets[w + 1] - offsets[w]};
  }
};

/// Unnormalized second-order transition weights out of `cur` given the walk
/// arrived from `prev`, aligned with g.neighbors(cur): edge weight times 1/p
/// for returning, 1 for staying within prev's neighborhood, 1/q otherwise.
inline std::vector<double> node2vec_transition_weights(const Graph& g, NodeId prev,
                                                       NodeId cur, double p, double q) {
  const auto nbrs = g.neighbors(cur);
  const auto ws = g.weights(cur);
  std::vector<double> out(nbrs.size());
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    double bias;
    if (nbrs[i] == prev)
      bias = 1.0 / p;
    else if (g.has_edge(prev, nbrs[i]))
      bias = 1.0;
    else
      bias = 1.0 / q;
    out[i] = bias * ws[i];
  }
  return out;
}

/// walks_per_node rounds of second-order biased walks. Each round visits all
/// nodes in a freshly shuffled order; a walk stops early only at a node with
/// no outgoing edges, so isolated nodes emit length-1 walks. Per-(prev, cur)
/// alias tables are built lazily; the unbiased p == q == 1 case skips them
/// and reuses the per-node first-step tables.
inline WalkCorpus random_walks(const Graph& g, const Node2vecConfig& cfg,
                               std::uint64_t seed) {
  validate(cfg);
  const std::size_t n = g.node_count();
  if (n == 0) throw ConfigError("random walks need a non-empty graph");

  std::vector<AliasTable> node_table(n);
  for (NodeId v = 0; v < n; ++v)
    if (g.degree(v) > 0) node_table[v] = AliasTable(g.weights(v));

  const bool unbiased = cfg.p == 1.0 && cfg.q == 1.0;
  std::unordered_map<std::uint64_t, AliasTable> edge_table;
  auto step_table = [&](NodeId prev, NodeId cur) -> const AliasTable& {
    if (unbiased) return node_table[cur];
    const std::uint64_t key = (static_cast<std::uint64_t>(prev) << 32) | cur;
    auto it = edge_table.find(key);
    if (it == edge_table.end()) {
      const auto w = node2vec_transition_weights(g, prev, cur, cfg.p, cfg.q);
      it = edge_table.emplace(key, AliasTable(w)).first;
    }
    return it->second;
  };

  Rng rng(seed);
  WalkCorpus corpus;
  corpus.nodes.reserve(n * static_cast<std::size_t>(cfg.walks_per_node) *
                       static_cast<std::size_t>(cfg.walk_length));
  corpus.offsets.reserve(n * static_cast<std::size_t>(cfg.walks_per_node) + 1);
  corpus.offsets.push_back(0);

  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int round = 0; round < cfg.walks_per_node; ++round) {
    rng.shuffle(order);
    for (NodeId start : order) {
      corpus.nodes.push_back(start);
      NodeId cur = start;
      NodeId prev = start;
      for (int step = 1; step < cfg.walk_length; ++step) {
        const auto nbrs = g.neighbors(cur);
        if (nbrs.empty()) break;
        const auto& table = step == 1 ? node_table[cur] : step_table(prev, cur);
        const NodeId nxt = nbrs[table.sample(rng)];
        prev = cur;
        cur = nxt;
        corpus.nodes.push_back(cur);
      }
      corpus.offsets.push_back(corpus.nodes.size());
    }
  }
  return corpus;
}

namespace detail {

constexpr std::uint64_t kWalkTag = 0x6e32762e776c6b73ULL;
constexpr std::uint64_t kWindowTag = 0x6e32762e77696e64ULL;
constexpr std::uint64_t kSgnsTag = 0x6e32762e73676e73ULL;

/// Streams skip-gram pairs from a walk corpus in deterministic order:
/// epoch by epoch, walk by walk, center by center, context left to right.
/// widths[epoch * positions + pos] is that center's sampled half-window.
class WalkPairSource {
 public:
  WalkPairSource(const WalkCorpus& corpus, const std::vector<std::uint16_t>& widths,
                 int epochs)
      : corpus_(corpus), widths_(widths), epochs_(epochs) {
    walk_end_ = corpus_.offsets[1];
    load_window();
  }

  void operator()(std::uint32_t& center, std::uint32_t& context) {
    while (!has_pair()) advance_center();
    center = corpus_.nodes[pos_];
    context = corpus_.nodes[j_];
    ++j_;
    if (j_ == pos_) ++j_;
  }

 private:
  bool has_pair() const { return window_valid_ && j_ <= hi_; }

  void advance_center() {
    ++pos_;
    while (pos_ >= walk_end_) {
      ++walk_;
      if (walk_ == corpus_.walk_count()) {
        ++epoch_;
        if (epoch_ >= epochs_)
          throw Error("walk pair source exhausted");  // pair count mismatch
        walk_ = 0;
      }
      pos_ = corpus_.offsets[walk_];
      walk_end_ = corpus_.offsets[walk_ + 1];
    }
    load_window();
  }

  void load_window() {
    const std::size_t wb = corpus_.offsets[walk_];
    const std::size_t b =
        widths_[static_cast<std::size_t>(epoch_) * corpus_.nodes.size() + pos_];
    lo_ = pos_ >= wb + b ? pos_ - b : wb;
    hi_ = std::min(pos_ + b, walk_end_ - 1);
    window_valid_ = hi_ > lo_;  // more than just the center in the window
    j_ = lo_ == pos_ ? lo_ + 1 : lo_;
  }

  const WalkCorpus& corpus_;
  const std::vector<std::uint16_t>& widths_;
  int epochs_;
  int epoch_ = 0;
  std::size_t walk_ = 0;
  std::size_t pos_ = 0;
  std::size_t walk_end_ = 0;
  std::size_t lo_ = 0;
  std::size_t hi_ = 0;  // inclusive
  std::size_t j_ = 0;
  bool window_valid_ = false;
};

}  // namespace detail

/// node2vec: biased second-order random walks fed through SGNS. All
/// randomness (walks, per-center window draws, table init, negative draws)
/// comes from per-purpose substreams of the single run seed.
inline Embedding node2vec_embed(const Graph& g, Index d, const Node2vecConfig& cfg,
                                std::uint64_t seed) {
  validate(cfg);
  if (d < 1) throw ConfigError("node2vec dimension must be positive");
  if (g.node_count() == 0) throw ConfigError("node2vec needs a non-empty graph");
  if (g.edge_count() == 0)
    throw InsufficientDataError("node2vec needs at least one edge to walk");

  const WalkCorpus corpus = random_walks(g, cfg, derive_seed(seed, detail::kWalkTag));

  // Pass one: draw every center's half-window up front and count the exact
  // number of training pairs, so the lr schedule sees the true total.
  const std::size_t positions = corpus.nodes.size();
  std::vector<std::uint16_t> widths(positions * static_cast<std::size_t>(cfg.epochs));
  {
    Rng wrng(derive_seed(seed, detail::kWindowTag));
    for (auto& w : widths)
      w = static_cast<std::uint16_t>(1 + wrng.below(static_cast<std::uint64_t>(cfg.window)));
  }
  std::size_t total_pairs = 0;
  for (int e = 0; e < cfg.epochs; ++e) {
    const std::size_t base = static_cast<std::size_t>(e) * positions;
    for (std::size_t w = 0; w < corpus.walk_count(); ++w) {
      const std::size_t wb = corpus.offsets[w], we = corpus.offsets[w + 1];
      for (std::size_t pos = wb; pos < we; ++pos) {
        const std::size_t b = widths[base + pos];
        const std::size_t lo = pos >= wb + b ? pos - b : wb;
        const std::size_t hi = std::min(pos + b, we - 1);
        total_pairs += hi - lo;
      }
    }
  }
  if (total_pairs == 0)
    throw InsufficientDataError("walk corpus produced no training pairs");

  std::vector<double> frequency(g.node_count(), 0.0);
  for (NodeId v : corpus.nodes) frequency[v] += 1.0;

  detail::WalkPairSource source(corpus, widths, cfg.epochs);
  SgnsResult trained =
      sgns_train(g.node_count(), d, total_pairs, source, frequency, cfg.sgns,
                 derive_seed(seed, detail::kSgnsTag));

  Embedding out;
  out.matrix = std::move(trained.input);
  out.algorithm = Algorithm::node2vec;
  out.seed = seed;
  {
    Digest dg;
    dg.str("node2vec");
    dg.pod(static_cast<std::int64_t>(d));
    dg.pod(cfg.p);
    dg.pod(cfg.q);
    dg.pod(static_cast<std::int64_t>(cfg.walks_per_node));
    dg.pod(static_cast<std::int64_t>(cfg.walk_length));
    dg.pod(static_cast<std::int64_t>(cfg.window));
    dg.pod(static_cast<std::int64_t>(cfg.epochs));
    dg.pod(static_cast<std::int64_t>(cfg.sgns.negatives));
    dg.pod(cfg.sgns.initial_lr);
    dg.pod(cfg.sgns.noise_exponent);
    out.config_digest = dg.hex();
  }
  return out;
}

}  // namespace embstab
