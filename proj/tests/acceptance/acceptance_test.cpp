#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "embstab/cli/pipeline.hpp"
#include "support/oracles.hpp"

using namespace embstab;
namespace fs = std::filesystem;

// Every test prints one [PASS]/[FAIL] line so the binary doubles as a
// checklist when run on its own.
namespace {

class CriterionPrinter : public Catch::EventListenerBase {
 public:
  using Catch::EventListenerBase::EventListenerBase;
  void testCaseEnded(const Catch::TestCaseStats& stats) override {
    std::printf("[%s] %s\n", stats.totals.assertions.allOk() ? "PASS" : "FAIL",
                stats.testInfo->name.c_str());
    std::fflush(stdout);
  }
};

struct WallTimer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

struct SetMeans {
  double aligned = 0.0;
  double jaccard = 0.0;
  double second = 0.0;
};

// Grand means over every unordered run pair, computed the same way the
// compare stage does it: per-run normalization and knn tables, then one
// score set per pair, aggregated across pairs.
SetMeans set_means(const std::vector<Matrix>& runs, int k, std::size_t workers) {
  const std::size_t r = runs.size();
  std::vector<RowNormalized> normals(r);
  parallel_for(r, workers,
               [&](std::size_t i) { normals[i] = row_normalize(runs[i]); });
  std::vector<KnnTable> tables(r);
  parallel_for(r, workers, [&](std::size_t i) {
    tables[i] = knn_from_normalized(normals[i].matrix, normals[i].zero_row, k);
  });

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t l = 0; l < r; ++l)
    for (std::size_t m = l + 1; m < r; ++m) pairs.push_back({l, m});

  std::vector<PairwiseNodeScores> al(pairs.size()), ja(pairs.size()),
      so(pairs.size());
  parallel_for(pairs.size(), workers, [&](std::size_t p) {
    const auto [l, m] = pairs[p];
    al[p] = aligned_cosine_similarity(runs[l], runs[m], false);
    ja[p] = knn_jaccard(tables[l], tables[m]);
    so[p] = second_order_cosine(normals[l].matrix, normals[l].zero_row,
                                normals[m].matrix, normals[m].zero_row,
                                tables[l], tables[m]);
  });

  SetMeans out;
  out.aligned = aggregate(al).grand_mean;
  out.jaccard = aggregate(ja).grand_mean;
  out.second = aggregate(so).grand_mean;
  return out;
}

double aligned_mean_all_pairs(const std::vector<Matrix>& runs,
                              std::size_t workers) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t l = 0; l < runs.size(); ++l)
    for (std::size_t m = l + 1; m < runs.size(); ++m) pairs.push_back({l, m});
  std::vector<PairwiseNodeScores> scores(pairs.size());
  parallel_for(pairs.size(), workers, [&](std::size_t p) {
    const auto [l, m] = pairs[p];
    scores[p] = aligned_cosine_similarity(runs[l], runs[m], false);
  });
  return aggregate(scores).grand_mean;
}

double pair_mean(const PairwiseNodeScores& s) {
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < s.values.size(); ++i)
    if (!s.flagged[i]) {
      total += s.values[i];
      ++used;
    }
  REQUIRE(used > 0);
  return total / static_cast<double>(used);
}

double sample_stdev(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double sq = 0.0;
  for (double x : v) sq += (x - mean) * (x - mean);
  return v.size() > 1 ? std::sqrt(sq / static_cast<double>(v.size() - 1)) : 0.0;
}

NodeLabels half_labels(std::size_t n) {
  NodeLabels l;
  l.label_count = 2;
  l.assignments.resize(n);
  for (std::size_t v = 0; v < n; ++v) l.assignments[v] = {v < n / 2 ? 0u : 1u};
  return l;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("embstab_accept_" + tag + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
};

}  // namespace

CATCH_REGISTER_LISTENER(CriterionPrinter)

TEST_CASE("similarity measures match independent oracles",
          "[oracle_equivalence]") {
  WallTimer t;
  Rng rng(20240801);

  std::size_t knn_mismatches = 0;
  double worst_grid_gap = -1e9;
  double worst_second = 0.0;

  for (int iter = 0; iter < 20; ++iter) {
    const Index n = static_cast<Index>(30 + rng.below(271));   // up to 300
    const Index d = static_cast<Index>(2 + rng.below(15));     // up to 16
    const int k = static_cast<int>(std::min<Index>(10, n - 1));
    const Matrix z1 = oracle::gaussian_matrix(n, d, rng.next());
    const Matrix z2 = oracle::gaussian_matrix(n, d, rng.next());

    // Exact nearest neighbours against the quadratic reference.
    const KnnTable lib1 = knn(z1, k);
    const auto ref1 = oracle::brute_knn(z1, k);
    for (Index v = 0; v < n; ++v)
      if (lib1.neighbors[static_cast<std::size_t>(v)] !=
          ref1[static_cast<std::size_t>(v)])
        ++knn_mismatches;

    // The closed-form alignment must do at least as well as an exhaustive
    // two-dimensional sweep over rotations and reflections.
    const Matrix a2 = oracle::gaussian_matrix(n, 2, rng.next());
    const Matrix b2 = oracle::gaussian_matrix(n, 2, rng.next());
    const RowNormalized an = row_normalize(a2);
    const RowNormalized bn = row_normalize(b2);
    const ProcrustesResult pr = procrustes_align(an.matrix, bn.matrix);
    const double lib_res = (an.matrix * pr.q - bn.matrix).norm();
    const Eigen::Matrix2d grid_q = oracle::grid_procrustes_2d(an.matrix, bn.matrix);
    const double grid_res = (an.matrix * grid_q - bn.matrix).norm();
    worst_grid_gap = std::max(worst_grid_gap, lib_res - grid_res);

    // Second-order scores against the direct profile formula over the
    // ascending-id union of the two neighbour sets.
    const PairwiseNodeScores so = second_order_cosine(z1, z2, k);
    const auto ref2 = oracle::brute_knn(z2, k);
    for (Index v = 0; v < n; ++v) {
      const auto sv = static_cast<std::size_t>(v);
      if (so.flagged[sv]) continue;
      std::set<std::uint32_t> ids(ref1[sv].begin(), ref1[sv].end());
      ids.insert(ref2[sv].begin(), ref2[sv].end());
      const std::vector<std::uint32_t> union_ids(ids.begin(), ids.end());
      const double direct = oracle::second_order_direct(z1, z2, v, union_ids);
      worst_second = std::max(worst_second, std::abs(so.values[sv] - direct));
    }
  }

  std::printf("  knn mismatches %zu, alignment residual gap %.3e, "
              "second-order max error %.3e, %.1f s\n",
              knn_mismatches, worst_grid_gap, worst_second, t.seconds());
  CHECK(knn_mismatches == 0);
  CHECK(worst_grid_gap <= 1e-3);
  CHECK(worst_second <= 1e-9);
  CHECK(t.seconds() < 60.0);
}

TEST_CASE("similarity measures are rotation invariant", "[rotation_invariance]") {
  WallTimer t;
  const Index n = 500, d = 16;
  const Matrix z = oracle::gaussian_matrix(n, d, 99);

  // A random orthogonal map mixing rotation and reflection.
  const Matrix g = oracle::gaussian_matrix(d, d, 100);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g.transpose());
  const Eigen::MatrixXd q = qr.householderQ();
  const Matrix z2 = z * q;

  const PairwiseNodeScores al = aligned_cosine_similarity(z, z2, false);
  double min_aligned = 1.0;
  for (std::size_t v = 0; v < al.values.size(); ++v) {
    REQUIRE_FALSE(al.flagged[v]);
    min_aligned = std::min(min_aligned, al.values[v]);
  }

  const PairwiseNodeScores ja = knn_jaccard(z, z2, 20);
  double min_jaccard = 1.0;
  for (std::size_t v = 0; v < ja.values.size(); ++v) {
    REQUIRE_FALSE(ja.flagged[v]);
    min_jaccard = std::min(min_jaccard, ja.values[v]);
  }

  const PairwiseNodeScores so = second_order_cosine(z, z2, 20);
  double min_second = 1.0;
  for (std::size_t v = 0; v < so.values.size(); ++v) {
    REQUIRE_FALSE(so.flagged[v]);
    min_second = std::min(min_second, so.values[v]);
  }

  std::printf("  per-node minima: aligned %.9f, jaccard %.9f, second %.9f, "
              "%.1f s\n",
              min_aligned, min_jaccard, min_second, t.seconds());
  CHECK(min_aligned >= 1.0 - 1e-6);
  CHECK(min_jaccard == 1.0);
  CHECK(min_second >= 1.0 - 1e-6);
  CHECK(t.seconds() < 60.0);
}

TEST_CASE("independent random embeddings score at the null level",
          "[null_baseline]") {
  WallTimer t;
  const Index n = 2000, d = 128;
  const std::size_t workers = 4;

  // Ten disjoint pairs of independent Gaussian embeddings.
  std::vector<double> aligned_pairs(10), jaccard_pairs(10);
  parallel_for(10, workers, [&](std::size_t p) {
    const Matrix a = oracle::gaussian_matrix(n, d, 1000 + 2 * p);
    const Matrix b = oracle::gaussian_matrix(n, d, 1001 + 2 * p);
    aligned_pairs[p] = pair_mean(aligned_cosine_similarity(a, b, false));
    jaccard_pairs[p] = pair_mean(knn_jaccard(a, b, 20));
  });
  double aligned_mean = 0.0, jaccard_mean = 0.0;
  for (std::size_t p = 0; p < 10; ++p) {
    aligned_mean += aligned_pairs[p] / 10.0;
    jaccard_mean += jaccard_pairs[p] / 10.0;
  }

  // The pass band is a Monte-Carlo estimate of the same statistic on twenty
  // fresh independent pairs; a fixed literal band would not track N and d.
  // The aligned mean of independent Gaussians concentrates near
  // 0.8488 * sqrt(d / N), about 0.21 here, not near zero.
  std::vector<double> mc(20);
  parallel_for(20, workers, [&](std::size_t j) {
    const Matrix a = oracle::gaussian_matrix(n, d, 9000 + 2 * j);
    const Matrix b = oracle::gaussian_matrix(n, d, 9001 + 2 * j);
    mc[j] = pair_mean(aligned_cosine_similarity(a, b, false));
  });
  double mu = 0.0;
  for (double v : mc) mu += v / 20.0;
  const double sd = std::max(sample_stdev(mc), 1e-3);

  std::printf("  aligned mean %.6f vs null band %.6f +- %.6f, jaccard mean "
              "%.6f, %.1f s\n",
              aligned_mean, mu, 5.0 * sd, jaccard_mean, t.seconds());
  CHECK(aligned_mean >= mu - 5.0 * sd);
  CHECK(aligned_mean <= mu + 5.0 * sd);
  CHECK(jaccard_mean < 0.05);
  CHECK(t.seconds() < 300.0);
}

TEST_CASE("hope runs are near deterministic", "[hope_determinism]") {
  WallTimer t;
  const Graph g = generate_watts_strogatz(1000, 0.01, 0.1, 7).graph;

  std::vector<Matrix> runs(10);
  parallel_for(runs.size(), 4, [&](std::size_t i) {
    runs[i] = hope_embed(g, 32, HopeConfig{}, 1 + i).matrix;
  });
  const SetMeans m = set_means(runs, 20, 4);

  std::printf("  aligned %.6f, jaccard %.6f, second %.6f, %.1f s\n", m.aligned,
              m.jaccard, m.second, t.seconds());
  CHECK(m.aligned >= 0.99);
  CHECK(m.jaccard >= 0.95);
  CHECK(m.second >= 0.99);
  CHECK(t.seconds() < 600.0);
}

TEST_CASE("algorithms order by stability on a ring lattice graph",
          "[stability_ordering]") {
  WallTimer t;
  const Index d = 128;
  const Graph g = generate_watts_strogatz(4000, 0.01, 0.1, 7).graph;
  const std::size_t workers = 4;

  std::vector<Matrix> hope_runs(10), n2v_runs(10), line_runs(10);
  parallel_for(hope_runs.size(), workers, [&](std::size_t i) {
    hope_runs[i] = hope_embed(g, d, HopeConfig{}, 1 + i).matrix;
  });
  std::printf("  hope runs done at %.1f s\n", t.seconds());
  parallel_for(n2v_runs.size(), workers, [&](std::size_t i) {
    n2v_runs[i] = node2vec_embed(g, d, Node2vecConfig{}, 1 + i).matrix;
  });
  std::printf("  node2vec runs done at %.1f s\n", t.seconds());
  parallel_for(line_runs.size(), workers, [&](std::size_t i) {
    line_runs[i] = line_embed(g, d, LineConfig{}, 1 + i).matrix;
  });
  std::printf("  line runs done at %.1f s\n", t.seconds());

  const SetMeans hope_m = set_means(hope_runs, 20, workers);
  const SetMeans n2v_m = set_means(n2v_runs, 20, workers);
  const SetMeans line_m = set_means(line_runs, 20, workers);

  // Independent Gaussian pairs of the same shape give the chance floor.
  std::vector<Matrix> null_runs(8);
  parallel_for(null_runs.size(), workers, [&](std::size_t i) {
    null_runs[i] = oracle::gaussian_matrix(4000, d, 7700 + i);
  });
  const double null_aligned = aligned_mean_all_pairs(null_runs, workers);

  std::printf("  aligned: hope %.4f > node2vec %.4f >= line %.4f > null %.4f\n",
              hope_m.aligned, n2v_m.aligned, line_m.aligned, null_aligned);
  std::printf("  second order: node2vec %.4f, line %.4f; %.1f s total\n",
              n2v_m.second, line_m.second, t.seconds());

  CHECK(hope_m.aligned > n2v_m.aligned);
  CHECK(n2v_m.aligned >= line_m.aligned);
  CHECK(n2v_m.aligned >= 0.6);
  CHECK(n2v_m.aligned <= 0.99);
  CHECK(line_m.aligned >= 0.6);
  CHECK(line_m.aligned <= 0.99);
  CHECK(hope_m.aligned > null_aligned);
  CHECK(n2v_m.aligned > null_aligned);
  CHECK(line_m.aligned > null_aligned);
  CHECK(n2v_m.second >= 0.95);
  CHECK(line_m.second >= 0.95);
  CHECK(t.seconds() < 7200.0);
}

TEST_CASE("denser graphs give node2vec more stable embeddings",
          "[density_trend]") {
  WallTimer t;
  const Index d = 128;
  const std::size_t workers = 4;

  auto aligned_at = [&](double density, std::uint64_t graph_seed) {
    const Graph g = generate_watts_strogatz(2000, density, 0.1, graph_seed).graph;
    std::vector<Matrix> runs(5);
    parallel_for(runs.size(), workers, [&](std::size_t i) {
      runs[i] = node2vec_embed(g, d, Node2vecConfig{}, 1 + i).matrix;
    });
    return aligned_mean_all_pairs(runs, workers);
  };

  const double sparse = aligned_at(0.001, 7);
  const double dense = aligned_at(0.1, 8);

  std::printf("  aligned at density 0.1: %.4f, at 0.001: %.4f, %.1f s\n", dense,
              sparse, t.seconds());
  CHECK(dense > sparse);
  CHECK(t.seconds() < 3600.0);
}

TEST_CASE("analytic gradients match finite differences", "[gradient_checks]") {
  WallTimer t;
  Rng rng(4242);
  const double h = 1e-6;
  double worst = 0.0;
  auto record = [&](double analytic, double fd) {
    const double err = std::abs(analytic - fd) /
                       std::max({1.0, std::abs(analytic), std::abs(fd)});
    worst = std::max(worst, err);
  };

  // Skip-gram pair updates: the post-update tables encode the exact gradient
  // at the pre-update point, so (before - after) / lr must match central
  // differences of the pair loss.
  for (int cfg = 0; cfg < 12; ++cfg) {
    const std::uint32_t nodes = 5 + static_cast<std::uint32_t>(rng.below(20));
    const Index dim = static_cast<Index>(2 + rng.below(14));
    const bool shared = cfg % 2 == 1;
    Matrix input = 0.4 * oracle::gaussian_matrix(nodes, dim, rng.next());
    Matrix context = 0.4 * oracle::gaussian_matrix(nodes, dim, rng.next());

    const auto center = static_cast<std::uint32_t>(rng.below(nodes));
    std::uint32_t positive = static_cast<std::uint32_t>(rng.below(nodes));
    while (positive == center)
      positive = static_cast<std::uint32_t>(rng.below(nodes));
    std::vector<std::uint32_t> negatives;
    for (std::size_t i = 0; i < 1 + rng.below(4); ++i) {
      std::uint32_t neg = static_cast<std::uint32_t>(rng.below(nodes));
      while (neg == center || neg == positive ||
             std::find(negatives.begin(), negatives.end(), neg) != negatives.end())
        neg = static_cast<std::uint32_t>(rng.below(nodes));
      negatives.push_back(neg);
    }
    if (cfg == 3) negatives.push_back(positive);  // skipped draw, zero gradient

    const Matrix in0 = input, ctx0 = context;
    const double lr = 0.37;
    Eigen::RowVectorXd scratch(dim);
    sgns_pair_update(input, context, center, positive, negatives, lr, shared,
                     scratch);
    const Matrix grad_in = (in0 - input) / lr;
    const Matrix grad_ctx = (ctx0 - context) / lr;

    auto loss_at = [&](const Matrix& in, const Matrix& ctx) {
      return sgns_pair_loss(in, ctx, center, positive, negatives, shared);
    };
    std::vector<std::uint32_t> rows = negatives;
    rows.push_back(positive);
    for (Index c = 0; c < dim; ++c) {
      Matrix in_hi = in0, in_lo = in0;
      in_hi(center, c) += h;
      in_lo(center, c) -= h;
      record(grad_in(center, c),
             (loss_at(in_hi, ctx0) - loss_at(in_lo, ctx0)) / (2 * h));
      for (std::uint32_t r : rows) {
        Matrix ctx_hi = ctx0, ctx_lo = ctx0;
        ctx_hi(r, c) += h;
        ctx_lo(r, c) -= h;
        record(grad_ctx(r, c),
               (loss_at(in0, ctx_hi) - loss_at(in0, ctx_lo)) / (2 * h));
      }
    }
  }

  // Classifier loss gradients in both modes.
  for (int cfg = 0; cfg < 12; ++cfg) {
    const Index b = static_cast<Index>(3 + rng.below(10));
    const Index dim = static_cast<Index>(2 + rng.below(6));
    const Index classes = static_cast<Index>(2 + rng.below(4));
    const ClassifierMode mode = cfg % 2 == 0 ? ClassifierMode::multiclass_softmax
                                             : ClassifierMode::multilabel_ovr;
    const double l2 = cfg % 3 == 0 ? 0.0 : (cfg % 3 == 1 ? 1e-3 : 0.1);

    const Matrix x = oracle::gaussian_matrix(b, dim, rng.next());
    const Matrix w0 = 0.5 * oracle::gaussian_matrix(dim, classes, rng.next());
    Eigen::RowVectorXd b0(classes);
    for (Index j = 0; j < classes; ++j) b0(j) = 0.3 * rng.gaussian();

    std::vector<std::vector<std::uint32_t>> targets(static_cast<std::size_t>(b));
    for (auto& tset : targets) {
      if (mode == ClassifierMode::multiclass_softmax) {
        tset = {static_cast<std::uint32_t>(rng.below(classes))};
      } else {
        for (std::uint32_t c = 0; c < classes; ++c)
          if (rng.uniform() < 0.5) tset.push_back(c);
      }
    }

    Matrix grad_w(dim, classes);
    Eigen::RowVectorXd grad_b(classes);
    classifier_loss(w0, b0, mode, x, targets, l2, &grad_w, &grad_b);

    auto loss_at = [&](const Matrix& w, const Eigen::RowVectorXd& bias) {
      return classifier_loss(w, bias, mode, x, targets, l2);
    };
    for (Index i = 0; i < dim; ++i)
      for (Index j = 0; j < classes; ++j) {
        Matrix hi = w0, lo = w0;
        hi(i, j) += h;
        lo(i, j) -= h;
        record(grad_w(i, j), (loss_at(hi, b0) - loss_at(lo, b0)) / (2 * h));
      }
    for (Index j = 0; j < classes; ++j) {
      Eigen::RowVectorXd hi = b0, lo = b0;
      hi(j) += h;
      lo(j) -= h;
      record(grad_b(j), (loss_at(w0, hi) - loss_at(w0, lo)) / (2 * h));
    }
  }

  std::printf("  worst relative gradient error %.3e over 24 configs, %.1f s\n",
              worst, t.seconds());
  CHECK(worst <= 1e-6);
  CHECK(t.seconds() < 60.0);
}

TEST_CASE("stable core separates prediction agreement from f1 spread",
          "[stable_core]") {
  WallTimer t;
  const ClassifierParams params;

  // Identical embeddings and a fixed classifier seed must agree everywhere.
  {
    const Graph g = generate_watts_strogatz(300, 0.04, 0.05, 3).graph;
    const Embedding base = hope_embed(g, 16, HopeConfig{}, 1);
    std::vector<Embedding> copies;
    for (std::uint64_t s = 1; s <= 3; ++s) {
      Embedding e = base;
      e.seed = s;
      copies.push_back(std::move(e));
    }
    const EmbeddingSet set = EmbeddingSet::from_runs(std::move(copies), g.digest());
    const NodeLabels labels = half_labels(300);
    const SplitSpec split = make_split(labels, 0.75, 11);
    const StableCoreReport rep =
        stability_experiment(set, labels, split, params, 2, 3, 123, 2);
    std::printf("  identical embeddings, fixed seed: core %.6f\n",
                rep.mode_ii_core);
    CHECK(rep.mode_ii_core == 1.0);

    // One embedding under ten classifier seeds: a valid share, bit-stable
    // across reruns.
    std::vector<Embedding> two;
    for (std::uint64_t s = 1; s <= 2; ++s) {
      Embedding e = base;
      e.seed = s;
      two.push_back(std::move(e));
    }
    const EmbeddingSet set2 = EmbeddingSet::from_runs(std::move(two), g.digest());
    const StableCoreReport once =
        stability_experiment(set2, labels, split, params, 1, 10, 77, 1);
    const StableCoreReport again =
        stability_experiment(set2, labels, split, params, 1, 10, 77, 4);
    std::printf("  ten classifier seeds: core %.6f (rerun %.6f)\n",
                once.mode_i_cores[0], again.mode_i_cores[0]);
    CHECK(once.mode_i_cores[0] >= 0.0);
    CHECK(once.mode_i_cores[0] <= 1.0);
    CHECK(once.mode_i_cores[0] == again.mode_i_cores[0]);
    CHECK(once.mode_i_mean == again.mode_i_mean);
  }

  // Planted communities: accuracy barely moves across retrained embeddings
  // while the agreeing core stays short of everything.
  {
    const auto pp = oracle::planted_partition(3, 120, 0.05, 0.01, 9);
    std::vector<Embedding> runs(6);
    parallel_for(runs.size(), 3, [&](std::size_t i) {
      runs[i] = node2vec_embed(pp.graph, 16, Node2vecConfig{}, 1 + i);
    });
    const EmbeddingSet set =
        EmbeddingSet::from_runs(std::move(runs), pp.graph.digest());
    const SplitSpec split = make_split(pp.labels, 0.75, 21);
    const StableCoreReport rep =
        stability_experiment(set, pp.labels, split, params, 3, 5, 31, 2);

    const double f1_sd = sample_stdev(rep.mode_ii_micro_f1);
    double f1_mean = 0.0;
    for (double v : rep.mode_ii_micro_f1)
      f1_mean += v / static_cast<double>(rep.mode_ii_micro_f1.size());
    std::printf("  planted partition: micro-f1 %.4f +- %.4f, core %.4f, %.1f s\n",
                f1_mean, f1_sd, rep.mode_ii_core, t.seconds());
    CHECK(f1_sd < 0.05);
    CHECK(rep.mode_ii_core < 1.0);
  }
  CHECK(t.seconds() < 1800.0);
}

TEST_CASE("similarity search and compare stage meet their time budgets",
          "[performance]") {
  // Exact 20-nearest-neighbour search over ten thousand nodes, one worker.
  const Matrix z = oracle::gaussian_matrix(10000, 128, 424);
  WallTimer knn_timer;
  const KnnTable table = knn(z, 20);
  const double knn_seconds = knn_timer.seconds();
  REQUIRE(table.neighbors[0].size() == 20);
  std::printf("  knn over 10000 nodes: %.1f s (budget 60)\n", knn_seconds);
  CHECK(knn_seconds < 60.0);

  // Full compare stage: ten runs of 4000 x 128, 45 pairs, all measures,
  // four workers.
  TempDir tmp("perf");
  TempDir ext("perf_runs");
  for (int i = 0; i < 10; ++i) {
    Embedding e;
    e.matrix = oracle::gaussian_matrix(4000, 128, 6000 + i);
    std::ostringstream body;
    save_embedding(e, body, EmbeddingFormat::binary);
    std::ofstream out(ext.path / ("run" + std::to_string(i) + ".emb"),
                      std::ios::binary);
    out << body.str();
  }
  Json j;
  j["out_dir"] = tmp.str();
  j["workers"] = 4;
  j["graph"] = {{"generator", "ws"}, {"n", 4000}, {"density", 0.01}, {"seed", 7}};
  const ExperimentConfig cfg = parse_config(j);

  WallTimer compare_timer;
  REQUIRE(cmd_compare(cfg, ext.str()) == 0);
  const double compare_seconds = compare_timer.seconds();
  std::printf("  compare stage, 45 pairs of 4000x128: %.1f s (budget 600)\n",
              compare_seconds);
  CHECK(compare_seconds < 600.0);
}
