#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "embstab/cli/config.hpp"
#include "embstab/cli/manifest.hpp"
#include "embstab/downstream/cross_validate.hpp"
#include "embstab/downstream/stable_core.hpp"
#include "embstab/embed/embedding_io.hpp"
#include "embstab/embed/hope.hpp"
#include "embstab/embed/line.hpp"
#include "embstab/embed/node2vec.hpp"
#include "embstab/geometry/aggregate.hpp"
#include "embstab/geometry/angles.hpp"
#include "embstab/graph/centrality.hpp"
#include "embstab/graph/edge_list.hpp"
#include "embstab/graph/generators.hpp"
#include "embstab/graph/labels.hpp"
#include "embstab/graph/pair_sampling.hpp"
#include "embstab/util/parallel.hpp"
#include "embstab/util/text.hpp"

namespace embstab {

namespace fs = std::filesystem;

struct GraphBundle {
  Graph graph;
  std::vector<std::string> id_to_token;                 // empty for generated graphs
  std::unordered_map<std::string, NodeId> token_to_id;  // ditto
  GeneratorParams params;                               // valid when generated
  bool generated = false;

  std::string token(NodeId v) const {
    return id_to_token.empty() ? std::to_string(v) : id_to_token[v];
  }
};

namespace detail {

constexpr std::uint64_t kAngleSampleTag = 0x616e676c652e7370ULL;
constexpr std::uint64_t kSplitSeedTag = 0x73706c69742e7364ULL;
constexpr std::uint64_t kStabilityTag = 0x73746162692e7364ULL;
constexpr std::uint64_t kCvSeedTag = 0x63762e7365656400ULL;

inline Json params_json(const GeneratorParams& p) {
  Json j;
  j["model"] = p.model;
  j["n"] = p.n;
  j["target_density"] = p.target_density;
  j["realized_density"] = p.realized_density;
  if (p.model == "ba") j["attachment_m"] = p.attachment_m;
  if (p.model == "ws") {
    j["ring_degree"] = p.ring_degree;
    j["rewire_p"] = p.rewire_p;
  }
  j["seed"] = p.seed;
  return j;
}

inline GeneratedGraph generate_point(const GraphConfig& g, std::size_t n,
                                     double density, std::uint64_t seed) {
  if (g.generator == "ba") return generate_barabasi_albert(n, density, seed);
  return generate_watts_strogatz(n, density, g.rewire_p, seed);
}

inline std::string graph_file_name(const std::string& model, std::size_t n,
                                   double density) {
  return model + "_n" + std::to_string(n) + "_d" + format_double(density) +
         ".edgelist";
}

}  // namespace detail

inline GraphBundle resolve_graph(const ExperimentConfig& cfg) {
  GraphBundle out;
  if (!cfg.graph.edge_list.empty()) {
    std::ifstream in(cfg.graph.edge_list);
    if (!in) throw ConfigError("edge list not found: " + cfg.graph.edge_list);
    EdgeListResult r = load_edge_list(in, cfg.graph.directed, cfg.graph.weighted);
    out.graph = std::move(r.graph);
    out.id_to_token = std::move(r.id_to_token);
    out.token_to_id = std::move(r.token_to_id);
    return out;
  }
  if (!cfg.graph.sweep.empty())
    throw ConfigError("config.graph.sweep only applies to `generate`; point this "
                      "stage at a single graph");
  GeneratedGraph g = detail::generate_point(cfg.graph, cfg.graph.n,
                                            cfg.graph.density, cfg.graph.seed);
  out.graph = std::move(g.graph);
  out.params = g.params;
  out.generated = true;
  return out;
}

// ---------------------------------------------------------------------------
// generate

inline int cmd_generate(const ExperimentConfig& cfg) {
  if (cfg.out_dir.empty()) throw ConfigError("out_dir is required");
  if (cfg.graph.generator.empty())
    throw ConfigError("`generate` needs config.graph.generator");
  const fs::path graphs_dir = fs::path(cfg.out_dir) / "graphs";
  StageTimer timer;

  struct Point {
    std::size_t n;
    double density;
  };
  std::vector<Point> points;
  if (cfg.graph.sweep == "sizes") {
    const auto& sizes = cfg.graph.sweep_sizes.empty() ? default_sweep_sizes()
                                                      : cfg.graph.sweep_sizes;
    for (std::size_t n : sizes) points.push_back({n, cfg.graph.density});
  } else if (cfg.graph.sweep == "densities") {
    const auto& densities = cfg.graph.sweep_densities.empty()
                                ? default_sweep_densities()
                                : cfg.graph.sweep_densities;
    for (double d : densities) points.push_back({cfg.graph.n, d});
  } else {
    points.push_back({cfg.graph.n, cfg.graph.density});
  }

  Json generated = Json::array();
  Json failures = Json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    const std::uint64_t seed = cfg.graph.seed + i;
    const std::string name =
        detail::graph_file_name(cfg.graph.generator, pt.n, pt.density);
    try {
      GeneratedGraph g = detail::generate_point(cfg.graph, pt.n, pt.density, seed);
      atomic_stream(graphs_dir / name,
                    [&](std::ostream& out) { save_edge_list(g.graph, out, false); });
      // Digest the graph as the loader will see it. load_edge_list assigns
      // ids by first appearance, which relabels any graph whose edge order
      // introduces tokens out of numeric order, so the in-memory digest would
      // not match what later stages compute from the file.
      Graph reloaded;
      {
        std::ifstream in(graphs_dir / name);
        reloaded = load_edge_list(in, false, false).graph;
      }
      Json meta = detail::params_json(g.params);
      meta["graph_digest"] = reloaded.digest();
      meta["nodes"] = reloaded.node_count();
      meta["edges"] = reloaded.edge_count();
      meta["file"] = name;
      write_json(graphs_dir / (name + ".meta.json"), meta);
      generated.push_back(meta);
      std::printf("generated graphs/%s (%zu nodes, %zu edges)\n", name.c_str(),
                  reloaded.node_count(), reloaded.edge_count());
    } catch (const std::exception& e) {
      failures.push_back({{"file", name}, {"error", e.what()}});
      std::fprintf(stderr, "point %s failed: %s\n", name.c_str(), e.what());
    }
  }

  RunManifest m;
  m.stage = "generate";
  m.config_digest = cfg.digest();
  m.resolved_config = cfg.resolved();
  m.wall_clock_seconds = timer.seconds();
  m.extra = {{"graphs", generated}, {"failures", failures}};
  write_manifest(m, cfg.out_dir);
  return failures.empty() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// embed

namespace detail {

inline Embedding embed_one(const ExperimentConfig& cfg, const Graph& g,
                           std::uint64_t seed) {
  const auto& e = cfg.embedding;
  if (e.algorithm == "hope") return hope_embed(g, e.dim, e.hope, seed);
  if (e.algorithm == "node2vec") return node2vec_embed(g, e.dim, e.node2vec, seed);
  return line_embed(g, e.dim, e.line, seed);
}

}  // namespace detail

inline int cmd_embed(const ExperimentConfig& cfg) {
  if (cfg.out_dir.empty()) throw ConfigError("out_dir is required");
  StageTimer timer;
  const GraphBundle bundle = resolve_graph(cfg);
  const fs::path emb_dir = fs::path(cfg.out_dir) / "embeddings";

  const std::size_t runs = cfg.embedding.runs;
  std::vector<std::uint64_t> seeds(runs);
  for (std::size_t i = 0; i < runs; ++i) seeds[i] = cfg.embedding.base_seed + i;

  const EmbeddingFormat format = cfg.embedding.format == "text"
                                     ? EmbeddingFormat::text
                                     : EmbeddingFormat::binary;
  std::vector<std::string> errors(runs);
  std::vector<double> run_seconds(runs, 0.0);
  std::vector<std::string> files(runs);
  parallel_for(runs, cfg.workers, [&](std::size_t i) {
    StageTimer run_timer;
    try {
      Embedding e = detail::embed_one(cfg, bundle.graph, seeds[i]);
      run_seconds[i] = run_timer.seconds();
      if (cfg.embedding.run_timeout_seconds > 0.0 &&
          run_seconds[i] > cfg.embedding.run_timeout_seconds)
        throw Error("run exceeded the per-run time budget (" +
                    format_double(run_seconds[i]) + " s > " +
                    format_double(cfg.embedding.run_timeout_seconds) + " s)");
      const std::string name =
          cfg.embedding.algorithm + "_" + std::to_string(seeds[i]) + ".emb";
      std::ostringstream body;
      save_embedding(e, body, format);
      atomic_write(emb_dir / name, body.str());
      files[i] = name;
    } catch (const std::exception& ex) {
      run_seconds[i] = run_timer.seconds();
      errors[i] = ex.what();
    }
  });

  Json run_report = Json::array();
  std::size_t failed = 0;
  for (std::size_t i = 0; i < runs; ++i) {
    Json r;
    r["seed"] = seeds[i];
    r["seconds"] = run_seconds[i];
    if (errors[i].empty()) {
      r["file"] = "embeddings/" + files[i];
      std::printf("run seed=%llu -> embeddings/%s (%.2f s)\n",
                  static_cast<unsigned long long>(seeds[i]), files[i].c_str(),
                  run_seconds[i]);
    } else {
      r["error"] = errors[i];
      ++failed;
      std::fprintf(stderr, "run seed=%llu failed: %s\n",
                   static_cast<unsigned long long>(seeds[i]), errors[i].c_str());
    }
    run_report.push_back(r);
  }

  RunManifest m;
  m.stage = "embed";
  m.config_digest = cfg.digest();
  m.resolved_config = cfg.resolved();
  m.graph_digest = bundle.graph.digest();
  if (bundle.generated) m.generator_params = detail::params_json(bundle.params);
  m.run_seeds = seeds;
  m.wall_clock_seconds = timer.seconds();
  m.extra = {{"runs", run_report}, {"failed", failed}};
  write_manifest(m, cfg.out_dir);
  return failed == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// compare

namespace detail {

struct LoadedRuns {
  EmbeddingSet set;
  std::vector<std::string> files;  // sorted, aligned with set.runs
};

inline LoadedRuns load_embedding_dir(const fs::path& dir, std::size_t expected_nodes,
                                     const std::string& graph_digest) {
  if (!fs::is_directory(dir))
    throw ConfigError("embedding directory not found: " + dir.string());
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".emb")
      names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  if (names.size() < 2)
    throw InsufficientDataError("need at least two .emb files in " + dir.string() +
                                ", found " + std::to_string(names.size()));

  std::vector<Embedding> runs;
  std::map<std::pair<Index, Index>, std::vector<std::string>> shapes;
  for (const auto& name : names) {
    std::ifstream in(dir / name, std::ios::binary);
    if (!in) throw IoError("cannot open " + (dir / name).string());
    Embedding e;
    try {
      e = load_embedding(in);
    } catch (const Error& ex) {
      throw ParseError(name + ": " + ex.what());
    }
    // Native files are called <algorithm>_<seed>.emb; anything else counts
    // as an externally produced run.
    const std::string stem = name.substr(0, name.size() - 4);
    const auto us = stem.rfind('_');
    Algorithm algo = Algorithm::external;
    std::uint64_t seed = runs.size();
    if (us != std::string::npos) {
      const std::string head = stem.substr(0, us);
      std::uint64_t parsed = 0;
      if (parse_u64(stem.substr(us + 1), parsed)) {
        seed = parsed;
        if (head == "hope") algo = Algorithm::hope;
        else if (head == "node2vec") algo = Algorithm::node2vec;
        else if (head == "line") algo = Algorithm::line;
      }
    }
    e.algorithm = algo;
    e.seed = seed;
    e.config_digest.clear();
    shapes[{e.matrix.rows(), e.matrix.cols()}].push_back(name);
    runs.push_back(std::move(e));
  }

  if (shapes.size() > 1) {
    std::string msg = "embedding files disagree on shape:";
    for (const auto& [shape, members] : shapes) {
      msg += " [" + std::to_string(shape.first) + "x" + std::to_string(shape.second) + ":";
      for (const auto& f : members) msg += " " + f;
      msg += "]";
    }
    throw DimensionError(msg);
  }
  const auto rows = static_cast<std::size_t>(runs[0].matrix.rows());
  if (rows != expected_nodes)
    throw DimensionError("embeddings have " + std::to_string(rows) +
                         " rows but the graph has " + std::to_string(expected_nodes) +
                         " nodes");

  // Externally named files may repeat seeds; fall back to file order then.
  {
    std::set<std::uint64_t> distinct;
    for (const auto& r : runs) distinct.insert(r.seed);
    if (distinct.size() != runs.size())
      for (std::size_t i = 0; i < runs.size(); ++i) runs[i].seed = i;
  }
  bool mixed = false;
  for (const auto& r : runs)
    if (r.algorithm != runs[0].algorithm) mixed = true;
  if (mixed)
    for (auto& r : runs) r.algorithm = Algorithm::external;

  LoadedRuns out{EmbeddingSet::from_runs(std::move(runs), graph_digest),
                 std::move(names)};
  return out;
}

inline Json letter_json(const LetterValues& lv) {
  return {{"median", lv.median},
          {"fourth_lo", lv.fourth_lo},     {"fourth_hi", lv.fourth_hi},
          {"eighth_lo", lv.eighth_lo},     {"eighth_hi", lv.eighth_hi},
          {"sixteenth_lo", lv.sixteenth_lo}, {"sixteenth_hi", lv.sixteenth_hi}};
}

inline Json profile_json(const CentralityProfile& p) {
  return {{"window", p.window},
          {"centrality", p.centrality_sorted},
          {"moving_mean", p.moving_mean}};
}

inline Json category_json(const CategoryDeviation& c, std::size_t requested,
                          bool complete) {
  return {{"pairs_requested", requested},
          {"pairs_used", c.pair_mad_degrees.size()},
          {"mean_mad_degrees", c.mean_mad_degrees},
          {"skipped_zero_vector", c.skipped},
          {"sampling_complete", complete}};
}

}  // namespace detail

inline int cmd_compare(const ExperimentConfig& cfg,
                       const std::string& external_dir = "") {
  if (cfg.out_dir.empty()) throw ConfigError("out_dir is required");
  StageTimer timer;
  const GraphBundle bundle = resolve_graph(cfg);
  const std::size_t n = bundle.graph.node_count();

  const fs::path emb_dir = external_dir.empty()
                               ? fs::path(cfg.out_dir) / "embeddings"
                               : fs::path(external_dir);
  detail::LoadedRuns loaded =
      detail::load_embedding_dir(emb_dir, n, bundle.graph.digest());
  const EmbeddingSet& set = loaded.set;
  const std::size_t runs = set.run_count();

  const auto& measures = cfg.compare.measures;
  auto enabled = [&](Measure m) {
    return std::find(measures.begin(), measures.end(), m) != measures.end();
  };
  const bool need_tables = enabled(Measure::knn_jaccard) ||
                           enabled(Measure::second_order_cosine);
  const bool need_normals = enabled(Measure::second_order_cosine) || need_tables;

  // Per-run caches, then one slot per (pair, measure).
  std::vector<RowNormalized> normals(need_normals ? runs : 0);
  if (need_normals)
    parallel_for(runs, cfg.workers, [&](std::size_t r) {
      normals[r] = row_normalize(set.runs[r].matrix);
    });
  std::vector<KnnTable> tables(need_tables ? runs : 0);
  if (need_tables)
    parallel_for(runs, cfg.workers, [&](std::size_t r) {
      tables[r] = knn_from_normalized(normals[r].matrix, normals[r].zero_row,
                                      cfg.compare.k);
    });

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t l = 0; l < runs; ++l)
    for (std::size_t m = l + 1; m < runs; ++m) pairs.push_back({l, m});

  std::map<Measure, std::vector<PairwiseNodeScores>> scores;
  for (Measure m : measures) scores[m].resize(pairs.size());
  parallel_for(pairs.size(), cfg.workers, [&](std::size_t p) {
    const auto [l, m] = pairs[p];
    for (Measure msr : measures) {
      if (msr == Measure::aligned_cosine)
        scores[msr][p] = aligned_cosine_similarity(
            set.runs[l].matrix, set.runs[m].matrix, cfg.compare.center);
      else if (msr == Measure::knn_jaccard)
        scores[msr][p] = knn_jaccard(tables[l], tables[m]);
      else
        scores[msr][p] = second_order_cosine(normals[l].matrix, normals[l].zero_row,
                                             normals[m].matrix, normals[m].zero_row,
                                             tables[l], tables[m]);
    }
  });

  std::map<Measure, StabilityReport> reports;
  for (Measure m : measures) reports.emplace(m, aggregate(scores[m]));
  scores.clear();

  const CentralityScores pr = pagerank(bundle.graph);
  const CentralityScores deg = degree_centrality(bundle.graph);
  const CentralityScores core = coreness(bundle.graph);

  const PairSamples samples = sample_node_pairs(
      bundle.graph, cfg.compare.angle_pairs,
      derive_seed(cfg.graph.seed, detail::kAngleSampleTag));
  const AngleDeviationReport angles = angle_deviation(set, samples);

  // per_node.csv keeps a fixed column set; cells for disabled measures or
  // excluded nodes stay empty.
  std::string csv =
      "node_id,pagerank,degree,coreness,mean_aligned_cos,mean_knn_jaccard,"
      "mean_second_order_cos\n";
  auto cell = [&](Measure m, std::size_t i) -> std::string {
    auto it = reports.find(m);
    if (it == reports.end() || !it->second.node_valid[i]) return "";
    return format_double(it->second.per_node_mean[i]);
  };
  for (std::size_t i = 0; i < n; ++i) {
    csv += bundle.token(static_cast<NodeId>(i));
    csv += ',';
    csv += format_double(pr.values[i]);
    csv += ',';
    csv += format_double(deg.values[i]);
    csv += ',';
    csv += format_double(core.values[i]);
    csv += ',';
    csv += cell(Measure::aligned_cosine, i);
    csv += ',';
    csv += cell(Measure::knn_jaccard, i);
    csv += ',';
    csv += cell(Measure::second_order_cosine, i);
    csv += '\n';
  }
  atomic_write(fs::path(cfg.out_dir) / "per_node.csv", csv);

  Json summary;
  summary["graph"] = {{"digest", bundle.graph.digest()},
                      {"nodes", n},
                      {"edges", bundle.graph.edge_count()},
                      {"density", bundle.graph.density()}};
  if (bundle.generated) summary["graph"]["generator"] = detail::params_json(bundle.params);
  summary["algorithm"] = algorithm_name(set.runs[0].algorithm);
  summary["dim"] = set.dim();
  summary["runs"] = runs;
  summary["pair_count"] = pairs.size();
  summary["k"] = cfg.compare.k;
  summary["center"] = cfg.compare.center;

  Json jm;
  for (const auto& [m, rep] : reports) {
    Json one;
    one["grand_mean"] = rep.grand_mean;
    one["per_node_mean_letter_values"] = detail::letter_json(rep.quantiles);
    one["excluded_nodes"] = rep.excluded_nodes;
    if (m == Measure::aligned_cosine)
      one["degenerate_alignments"] = rep.degenerate_alignments;
    jm[measure_name(m)] = one;
  }
  summary["measures"] = jm;

  summary["angle_deviation"] = {
      {"one_hop", detail::category_json(angles.one_hop, cfg.compare.angle_pairs,
                                        samples.one_hop.complete)},
      {"two_hop", detail::category_json(angles.two_hop, cfg.compare.angle_pairs,
                                        samples.two_hop.complete)},
      {"distant", detail::category_json(angles.distant, cfg.compare.angle_pairs,
                                        samples.distant.complete)}};

  Json profiles;
  for (const auto& [m, rep] : reports) {
    Json per_centrality;
    per_centrality["pagerank"] =
        detail::profile_json(centrality_profile(rep, pr, cfg.compare.window_fraction));
    per_centrality["degree"] =
        detail::profile_json(centrality_profile(rep, deg, cfg.compare.window_fraction));
    per_centrality["coreness"] =
        detail::profile_json(centrality_profile(rep, core, cfg.compare.window_fraction));
    profiles[measure_name(m)] = per_centrality;
  }
  summary["profiles"] = profiles;
  summary["pagerank_converged"] = pr.converged;
  write_json(fs::path(cfg.out_dir) / "summary.json", summary);

  RunManifest man;
  man.stage = "compare";
  man.config_digest = cfg.digest();
  man.resolved_config = cfg.resolved();
  man.graph_digest = bundle.graph.digest();
  if (bundle.generated) man.generator_params = detail::params_json(bundle.params);
  man.wall_clock_seconds = timer.seconds();
  man.extra = {{"embedding_files", loaded.files},
               {"embedding_dir", emb_dir.string()},
               {"pair_count", pairs.size()}};
  write_manifest(man, cfg.out_dir);

  for (const auto& [m, rep] : reports)
    std::printf("%s: grand mean %.6f over %zu pairs (%zu nodes excluded)\n",
                measure_name(m), rep.grand_mean, rep.pair_count, rep.excluded_nodes);
  std::printf("wrote per_node.csv and summary.json in %s\n", cfg.out_dir.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// downstream

namespace detail {

inline NodeLabels load_labels_for(const ExperimentConfig& cfg,
                                  const GraphBundle& bundle) {
  std::ifstream in(cfg.downstream.labels);
  if (!in) throw ConfigError("label file not found: " + cfg.downstream.labels);
  if (!bundle.token_to_id.empty())
    return load_labels(in, cfg.downstream.multi_label, bundle.token_to_id,
                       bundle.graph.node_count());
  std::unordered_map<std::string, NodeId> ids;
  ids.reserve(bundle.graph.node_count());
  for (NodeId v = 0; v < bundle.graph.node_count(); ++v)
    ids.emplace(std::to_string(v), v);
  return load_labels(in, cfg.downstream.multi_label, ids,
                     bundle.graph.node_count());
}

inline std::string prediction_cell(const std::vector<std::uint32_t>& labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(labels[i]);
  }
  return out;
}

}  // namespace detail

inline int cmd_downstream(const ExperimentConfig& cfg) {
  if (cfg.out_dir.empty()) throw ConfigError("out_dir is required");
  if (!cfg.downstream.enabled)
    throw ConfigError("`downstream` needs a downstream block in the config");
  StageTimer timer;
  const GraphBundle bundle = resolve_graph(cfg);
  const NodeLabels labels = detail::load_labels_for(cfg, bundle);

  detail::LoadedRuns loaded = detail::load_embedding_dir(
      fs::path(cfg.out_dir) / "embeddings", bundle.graph.node_count(),
      bundle.graph.digest());
  const EmbeddingSet& set = loaded.set;
  const auto& ds = cfg.downstream;

  const SplitSpec split = make_split(labels, ds.split_fraction,
                                     derive_seed(ds.seed, detail::kSplitSeedTag));

  std::vector<PredictionRun> prediction_runs;
  const StableCoreReport stable = stability_experiment(
      set, labels, split, ds.classifier, ds.sample_count, ds.reps,
      derive_seed(ds.seed, detail::kStabilityTag), cfg.workers,
      ds.dump_predictions ? &prediction_runs : nullptr);

  std::vector<CvResult> cv(set.run_count());
  for (std::size_t e = 0; e < set.run_count(); ++e)
    cv[e] = cross_validate(set.runs[e], labels, ds.classifier, ds.cv_folds,
                           ds.cv_reps,
                           derive_seed(ds.seed, detail::kCvSeedTag + e), cfg.workers);

  Json mode_i;
  {
    Json sampled = Json::array();
    for (std::size_t s = 0; s < stable.mode_i_embeddings.size(); ++s) {
      const std::size_t e = stable.mode_i_embeddings[s];
      sampled.push_back({{"embedding_seed", set.runs[e].seed},
                         {"stable_core", stable.mode_i_cores[s]}});
    }
    mode_i = {{"reps", stable.reps},
              {"sampled", sampled},
              {"mean_stable_core", stable.mode_i_mean}};
  }
  Json mode_ii;
  {
    Json f1s = Json::array();
    for (std::size_t e = 0; e < set.run_count(); ++e)
      f1s.push_back({{"embedding_seed", set.runs[e].seed},
                     {"micro_f1", stable.mode_ii_micro_f1[e]}});
    mode_ii = {{"stable_core", stable.mode_ii_core},
               {"fixed_classifier_seed", stable.fixed_classifier_seed},
               {"per_embedding_micro_f1", f1s}};
  }
  Json dist;
  {
    Json per_emb = Json::array();
    double total = 0.0;
    std::vector<double> all;
    for (std::size_t e = 0; e < set.run_count(); ++e) {
      per_emb.push_back({{"embedding_seed", set.runs[e].seed},
                         {"mean", cv[e].mean},
                         {"stdev", cv[e].stdev},
                         {"stratified", cv[e].stratified}});
      total += cv[e].mean;
      all.insert(all.end(), cv[e].micro_f1.begin(), cv[e].micro_f1.end());
    }
    double overall_mean = 0.0, overall_sq = 0.0;
    for (double v : all) overall_mean += v;
    overall_mean /= static_cast<double>(all.size());
    for (double v : all) overall_sq += (v - overall_mean) * (v - overall_mean);
    const double overall_stdev =
        all.size() > 1 ? std::sqrt(overall_sq / static_cast<double>(all.size() - 1))
                       : 0.0;
    dist = {{"folds", ds.cv_folds},
            {"reps", ds.cv_reps},
            {"per_embedding", per_emb},
            {"mean_of_means", total / static_cast<double>(set.run_count())},
            {"overall_mean", overall_mean},
            {"overall_stdev", overall_stdev}};
  }

  Json out;
  out["graph_digest"] = bundle.graph.digest();
  out["algorithm"] = algorithm_name(set.runs[0].algorithm);
  out["dim"] = set.dim();
  out["runs"] = set.run_count();
  out["labels"] = {{"classes", labels.label_count},
                   {"multi_label", labels.multi_label},
                   {"labeled_nodes", labels.labeled_count()}};
  out["split"] = {{"fraction", split.fraction},
                  {"seed", split.seed},
                  {"train", split.train_idx.size()},
                  {"test", split.test_idx.size()},
                  {"stratified", split.stratified},
                  {"stratification_fallback", split.stratification_fallback}};
  out["mode_i"] = mode_i;
  out["mode_ii"] = mode_ii;
  out["f1_distribution"] = dist;
  write_json(fs::path(cfg.out_dir) / "downstream.json", out);

  std::string f1_csv = "embedding_seed,rep,fold,micro_f1\n";
  for (std::size_t e = 0; e < set.run_count(); ++e)
    for (int r = 0; r < cv[e].reps; ++r)
      for (int f = 0; f < cv[e].folds; ++f) {
        f1_csv += std::to_string(set.runs[e].seed);
        f1_csv += ',';
        f1_csv += std::to_string(r);
        f1_csv += ',';
        f1_csv += std::to_string(f);
        f1_csv += ',';
        f1_csv += format_double(
            cv[e].micro_f1[static_cast<std::size_t>(r * cv[e].folds + f)]);
        f1_csv += '\n';
      }
  atomic_write(fs::path(cfg.out_dir) / "f1.csv", f1_csv);

  if (ds.dump_predictions) {
    // Slot order from the experiment: sample-major mode (i) runs first, then
    // the fixed-seed mode (ii) run of every embedding.
    std::string pred_csv = "node_id,run_id,prediction\n";
    const std::size_t mode_i_count = stable.mode_i_embeddings.size() * stable.reps;
    for (std::size_t j = 0; j < prediction_runs.size(); ++j) {
      const auto& run = prediction_runs[j];
      std::string run_id;
      if (j < mode_i_count) {
        const std::size_t s = j / stable.reps;
        const std::size_t r = j % stable.reps;
        run_id = "mode_i_e" +
                 std::to_string(set.runs[stable.mode_i_embeddings[s]].seed) + "_r" +
                 std::to_string(r);
      } else {
        run_id = "mode_ii_e" +
                 std::to_string(set.runs[j - mode_i_count].seed);
      }
      for (std::size_t t = 0; t < run.nodes.size(); ++t) {
        pred_csv += bundle.token(run.nodes[t]);
        pred_csv += ',';
        pred_csv += run_id;
        pred_csv += ',';
        pred_csv += detail::prediction_cell(run.predicted[t]);
        pred_csv += '\n';
      }
    }
    atomic_write(fs::path(cfg.out_dir) / "predictions.csv", pred_csv);
  }

  RunManifest man;
  man.stage = "downstream";
  man.config_digest = cfg.digest();
  man.resolved_config = cfg.resolved();
  man.graph_digest = bundle.graph.digest();
  if (bundle.generated) man.generator_params = detail::params_json(bundle.params);
  man.wall_clock_seconds = timer.seconds();
  man.extra = {{"embedding_files", loaded.files}};
  write_manifest(man, cfg.out_dir);

  std::printf("mode (i) stable core: %.4f (mean over %zu embeddings)\n",
              stable.mode_i_mean, stable.mode_i_embeddings.size());
  std::printf("mode (ii) stable core: %.4f\n", stable.mode_ii_core);
  std::printf("cross-validated micro-F1: %.4f overall mean\n",
              dist["overall_mean"].get<double>());
  return 0;
}

// ---------------------------------------------------------------------------
// report

namespace detail {

inline std::string csv_field(const Json& j, const char* key) {
  if (!j.contains(key)) return "";
  const auto& v = j.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return "";
}

}  // namespace detail

inline int cmd_report(const std::string& root_dir) {
  if (root_dir.empty()) throw ConfigError("report needs a results directory (--out)");
  const fs::path root(root_dir);
  if (!fs::is_directory(root))
    throw ConfigError("results directory not found: " + root_dir);

  std::vector<fs::path> summaries, downstreams;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().filename() == "summary.json") summaries.push_back(entry.path());
    if (entry.path().filename() == "downstream.json")
      downstreams.push_back(entry.path());
  }
  std::sort(summaries.begin(), summaries.end());
  std::sort(downstreams.begin(), downstreams.end());
  if (summaries.empty() && downstreams.empty())
    throw ConfigError("no summary.json or downstream.json found under " + root_dir);

  auto read_json = [](const fs::path& p) {
    std::ifstream in(p);
    Json j;
    try {
      in >> j;
    } catch (const Json::exception& e) {
      throw ParseError(p.string() + ": " + e.what());
    }
    return j;
  };

  struct Row {
    std::string source, algorithm, model, n, density, runs, dim, measure, value;
    std::string median, fourth_lo, fourth_hi, eighth_lo, eighth_hi;
    std::string sixteenth_lo, sixteenth_hi, excluded;
  };
  std::vector<Row> rows;

  for (const auto& path : summaries) {
    const Json j = read_json(path);
    Row base;
    base.source = fs::relative(path.parent_path(), root).string();
    base.algorithm = detail::csv_field(j, "algorithm");
    base.runs = detail::csv_field(j, "runs");
    base.dim = detail::csv_field(j, "dim");
    if (j.contains("graph")) {
      const Json& g = j.at("graph");
      base.n = detail::csv_field(g, "nodes");
      base.density = detail::csv_field(g, "density");
      if (g.contains("generator"))
        base.model = detail::csv_field(g.at("generator"), "model");
    }
    if (j.contains("measures"))
      for (const auto& [name, m] : j.at("measures").items()) {
        Row r = base;
        r.measure = name;
        r.value = detail::csv_field(m, "grand_mean");
        if (m.contains("per_node_mean_letter_values")) {
          const Json& lv = m.at("per_node_mean_letter_values");
          r.median = detail::csv_field(lv, "median");
          r.fourth_lo = detail::csv_field(lv, "fourth_lo");
          r.fourth_hi = detail::csv_field(lv, "fourth_hi");
          r.eighth_lo = detail::csv_field(lv, "eighth_lo");
          r.eighth_hi = detail::csv_field(lv, "eighth_hi");
          r.sixteenth_lo = detail::csv_field(lv, "sixteenth_lo");
          r.sixteenth_hi = detail::csv_field(lv, "sixteenth_hi");
        }
        r.excluded = detail::csv_field(m, "excluded_nodes");
        rows.push_back(r);
      }
    if (j.contains("angle_deviation"))
      for (const auto& [cat, c] : j.at("angle_deviation").items()) {
        Row r = base;
        r.measure = "angle_mad_" + cat;
        r.value = detail::csv_field(c, "mean_mad_degrees");
        rows.push_back(r);
      }
  }

  for (const auto& path : downstreams) {
    const Json j = read_json(path);
    Row base;
    base.source = fs::relative(path.parent_path(), root).string();
    base.algorithm = detail::csv_field(j, "algorithm");
    base.runs = detail::csv_field(j, "runs");
    base.dim = detail::csv_field(j, "dim");
    auto push = [&](const std::string& measure, const std::string& value) {
      Row r = base;
      r.measure = measure;
      r.value = value;
      rows.push_back(r);
    };
    if (j.contains("mode_i"))
      push("stable_core_mode_i",
           detail::csv_field(j.at("mode_i"), "mean_stable_core"));
    if (j.contains("mode_ii"))
      push("stable_core_mode_ii", detail::csv_field(j.at("mode_ii"), "stable_core"));
    if (j.contains("f1_distribution")) {
      push("micro_f1_mean", detail::csv_field(j.at("f1_distribution"), "overall_mean"));
      push("micro_f1_stdev",
           detail::csv_field(j.at("f1_distribution"), "overall_stdev"));
    }
  }

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.source != b.source ? a.source < b.source : a.measure < b.measure;
  });

  std::string csv =
      "source,algorithm,model,n,density,runs,dim,measure,value,median,fourth_lo,"
      "fourth_hi,eighth_lo,eighth_hi,sixteenth_lo,sixteenth_hi,excluded_nodes\n";
  for (const auto& r : rows) {
    csv += r.source + ',' + r.algorithm + ',' + r.model + ',' + r.n + ',' +
           r.density + ',' + r.runs + ',' + r.dim + ',' + r.measure + ',' +
           r.value + ',' + r.median + ',' + r.fourth_lo + ',' + r.fourth_hi + ',' +
           r.eighth_lo + ',' + r.eighth_hi + ',' + r.sixteenth_lo + ',' +
           r.sixteenth_hi + ',' + r.excluded + '\n';
  }
  atomic_write(root / "report.csv", csv);
  std::printf("report.csv: %zu rows from %zu summaries and %zu downstream files\n",
              rows.size(), summaries.size(), downstreams.size());
  return 0;
}

}  // namespace embstab
