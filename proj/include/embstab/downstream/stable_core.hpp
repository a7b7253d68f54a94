#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "embstab/downstream/classifier.hpp"
#include "embstab/downstream/predictions.hpp"
#include "embstab/downstream/split.hpp"
#include "embstab/embed/embedding.hpp"
#include "embstab/error.hpp"
#include "embstab/util/parallel.hpp"
#include "embstab/util/rng.hpp"

namespace embstab {

/// Fraction of test nodes predicted identically by every run. Multilabel
/// agreement means exact set equality.
inline double stable_core(const std::vector<PredictionRun>& runs) {
  if (runs.size() < 2)
    throw InsufficientDataError("a stable core needs at least two prediction runs");
  const auto& base = runs[0];
  for (const auto& r : runs)
    if (r.nodes != base.nodes)
      throw DimensionError("prediction runs cover different node lists");
  if (base.nodes.empty()) throw InsufficientDataError("empty prediction runs");

  std::size_t stable = 0;
  for (std::size_t i = 0; i < base.nodes.size(); ++i) {
    bool same = true;
    for (std::size_t r = 1; r < runs.size() && same; ++r)
      same = runs[r].predicted[i] == base.predicted[i];
    stable += same;
  }
  return static_cast<double>(stable) / static_cast<double>(base.nodes.size());
}

/// The two prediction-variability protocols on one embedding family.
///
/// Mode (i) isolates classifier randomness: a handful of sampled embeddings,
/// each fitted `reps` times with different classifier seeds, one core per
/// embedding. Mode (ii) isolates embedding randomness: every run fitted once
/// with one fixed classifier seed, a single core across embeddings.
struct StableCoreReport {
  std::vector<std::size_t> mode_i_embeddings;  // indices into the set
  std::vector<double> mode_i_cores;            // one per sampled embedding
  double mode_i_mean = 0.0;
  double mode_ii_core = 0.0;
  std::vector<double> mode_ii_micro_f1;  // per run, same order as the set
  std::uint64_t fixed_classifier_seed = 0;
  std::size_t reps = 0;
};

namespace detail {
constexpr std::uint64_t kModeITag = 0x73746162692e3169ULL;
constexpr std::uint64_t kModeIITag = 0x73746162692e3269ULL;
constexpr std::uint64_t kSampleTag = 0x73746162692e736dULL;
}  // namespace detail

/// When `collect_runs` is given it receives every prediction run in slot
/// order: sample_count * reps mode (i) runs (sample-major), then one fixed-seed
/// mode (ii) run per embedding.
inline StableCoreReport stability_experiment(const EmbeddingSet& set,
                                             const NodeLabels& labels,
                                             const SplitSpec& split,
                                             const ClassifierParams& params,
                                             std::size_t sample_count, std::size_t reps,
                                             std::uint64_t seed,
                                             std::size_t workers = 1,
                                             std::vector<PredictionRun>* collect_runs = nullptr) {
  if (set.run_count() < 2)
    throw InsufficientDataError("stability experiment needs at least two embeddings");
  if (sample_count < 1 || sample_count > set.run_count())
    throw ConfigError("sample_count must lie in [1, run count]");
  if (reps < 2) throw ConfigError("mode (i) needs at least two repetitions");

  StableCoreReport out;
  out.reps = reps;
  out.fixed_classifier_seed = derive_seed(seed, detail::kModeIITag);

  // Sample embeddings for mode (i) without replacement.
  {
    std::vector<std::size_t> pool(set.run_count());
    std::iota(pool.begin(), pool.end(), 0);
    Rng rng(derive_seed(seed, detail::kSampleTag));
    rng.shuffle(pool);
    out.mode_i_embeddings.assign(pool.begin(),
                                 pool.begin() + static_cast<std::ptrdiff_t>(sample_count));
    std::sort(out.mode_i_embeddings.begin(), out.mode_i_embeddings.end());
  }

  // Every (embedding, classifier seed) fit is independent; parallelize over
  // fits, then reduce in deterministic order.
  struct Job {
    std::size_t emb_index;
    std::uint64_t cls_seed;
    std::size_t slot;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < sample_count; ++s)
    for (std::size_t r = 0; r < reps; ++r)
      jobs.push_back({out.mode_i_embeddings[s],
                      derive_seed(seed, detail::kModeITag + s * 1000003ULL + r),
                      s * reps + r});
  const std::size_t mode_i_jobs = jobs.size();
  for (std::size_t e = 0; e < set.run_count(); ++e)
    jobs.push_back({e, out.fixed_classifier_seed, mode_i_jobs + e});

  std::vector<PredictionRun> results(jobs.size());
  parallel_for(jobs.size(), workers, [&](std::size_t j) {
    const auto& job = jobs[j];
    const auto& emb = set.runs[job.emb_index];
    const ClassifierModel model =
        train_classifier(emb, labels, split, params, job.cls_seed);
    results[job.slot] = predict(model, emb, split.test_idx);
  });

  for (std::size_t s = 0; s < sample_count; ++s) {
    std::vector<PredictionRun> group(results.begin() + static_cast<std::ptrdiff_t>(s * reps),
                                     results.begin() + static_cast<std::ptrdiff_t>((s + 1) * reps));
    out.mode_i_cores.push_back(stable_core(group));
  }
  for (double c : out.mode_i_cores) out.mode_i_mean += c;
  out.mode_i_mean /= static_cast<double>(out.mode_i_cores.size());

  std::vector<PredictionRun> mode_ii(results.begin() + static_cast<std::ptrdiff_t>(mode_i_jobs),
                                     results.end());
  out.mode_ii_core = stable_core(mode_ii);
  for (const auto& run : mode_ii) out.mode_ii_micro_f1.push_back(micro_f1(run, labels));
  if (collect_runs) *collect_runs = std::move(results);
  return out;
}

}  // namespace embstab
