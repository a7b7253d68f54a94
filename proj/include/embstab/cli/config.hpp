#pragma once

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "embstab/downstream/classifier.hpp"
#include "embstab/embed/hope.hpp"
#include "embstab/embed/line.hpp"
#include "embstab/embed/node2vec.hpp"
#include "embstab/error.hpp"
#include "embstab/geometry/measures.hpp"
#include "embstab/util/digest.hpp"

namespace embstab {

using Json = nlohmann::json;

struct GraphConfig {
  std::string edge_list;  // file source; mutually exclusive with generator
  bool directed = false;
  bool weighted = false;
  std::string generator;  // "ba" | "ws"
  std::size_t n = 8000;
  double density = 0.01;
  double rewire_p = 0.1;
  std::uint64_t seed = 7;
  std::string sweep;                     // "", "sizes" or "densities"
  std::vector<std::size_t> sweep_sizes;  // explicit lists override the defaults
  std::vector<double> sweep_densities;
};

struct EmbeddingConfig {
  std::string algorithm = "hope";
  Index dim = 128;
  std::size_t runs = 30;
  std::uint64_t base_seed = 1;
  std::string format = "binary";  // "binary" | "text"
  double run_timeout_seconds = 0.0;  // 0 disables the per-run budget
  HopeConfig hope;
  Node2vecConfig node2vec;
  LineConfig line;
};

struct CompareConfig {
  std::vector<Measure> measures = {Measure::aligned_cosine, Measure::knn_jaccard,
                                   Measure::second_order_cosine};
  int k = 20;
  bool center = false;
  std::size_t angle_pairs = 1000;
  double window_fraction = 0.01;
};

struct DownstreamConfig {
  bool enabled = false;  // true once the config carries a downstream block
  std::string labels;
  bool multi_label = false;
  double split_fraction = 0.75;
  std::uint64_t seed = 1;
  ClassifierParams classifier;
  std::size_t sample_count = 5;
  std::size_t reps = 10;
  int cv_folds = 10;
  int cv_reps = 10;
  bool dump_predictions = false;
};

struct ExperimentConfig {
  int schema_version = 1;
  std::string out_dir;
  std::size_t workers = 1;
  GraphConfig graph;
  EmbeddingConfig embedding;
  CompareConfig compare;
  DownstreamConfig downstream;

  Json resolved() const;
  std::string digest() const {
    Digest d;
    d.str(resolved().dump());
    return d.hex();
  }
};

inline const std::vector<std::size_t>& default_sweep_sizes() {
  static const std::vector<std::size_t> v = {1000, 2000, 4000, 8000,
                                             16000, 32000, 64000};
  return v;
}

inline const std::vector<double>& default_sweep_densities() {
  static const std::vector<double> v = {0.00025, 0.0005, 0.001, 0.002, 0.005,
                                        0.01, 0.02, 0.05, 0.1};
  return v;
}

namespace detail {

[[noreturn]] inline void config_fail(const std::string& where, const std::string& what) {
  throw ConfigError("config: " + where + ": " + what);
}

inline void check_keys(const Json& j, const std::set<std::string>& allowed,
                       const std::string& where) {
  if (!j.is_object()) config_fail(where, "expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) config_fail(where + "." + key, "unknown key");
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    config_fail(where + "." + key, "wrong type");
  }
}

inline Measure parse_measure(const std::string& name, const std::string& where) {
  if (name == "aligned_cosine") return Measure::aligned_cosine;
  if (name == "knn_jaccard") return Measure::knn_jaccard;
  if (name == "second_order_cosine") return Measure::second_order_cosine;
  config_fail(where, "unknown measure '" + name + "'");
}

inline LineOrder parse_line_order(const std::string& name, const std::string& where) {
  if (name == "first") return LineOrder::first;
  if (name == "second") return LineOrder::second;
  if (name == "both") return LineOrder::both;
  config_fail(where, "unknown line order '" + name + "'");
}

inline const char* line_order_name(LineOrder o) {
  switch (o) {
    case LineOrder::first: return "first";
    case LineOrder::second: return "second";
    case LineOrder::both: return "both";
  }
  return "?";
}

}  // namespace detail

inline ExperimentConfig parse_config(const Json& j) {
  using detail::check_keys;
  using detail::config_fail;
  using detail::get_or;

  ExperimentConfig cfg;
  check_keys(j, {"schema_version", "out_dir", "workers", "graph", "embedding",
                 "compare", "downstream"},
             "config");
  cfg.schema_version = get_or(j, "schema_version", 1, "config");
  if (cfg.schema_version != 1)
    config_fail("config.schema_version",
                "unsupported version " + std::to_string(cfg.schema_version));
  cfg.out_dir = get_or<std::string>(j, "out_dir", "", "config");
  cfg.workers = get_or<std::size_t>(j, "workers", 1, "config");
  if (cfg.workers < 1) config_fail("config.workers", "must be at least 1");

  if (!j.contains("graph")) config_fail("config.graph", "required");
  {
    const Json& g = j.at("graph");
    check_keys(g,
               {"edge_list", "directed", "weighted", "generator", "n", "density",
                "rewire_p", "seed", "sweep", "sweep_sizes", "sweep_densities"},
               "config.graph");
    auto& out = cfg.graph;
    out.edge_list = get_or<std::string>(g, "edge_list", "", "config.graph");
    out.directed = get_or(g, "directed", false, "config.graph");
    out.weighted = get_or(g, "weighted", false, "config.graph");
    out.generator = get_or<std::string>(g, "generator", "", "config.graph");
    out.n = get_or<std::size_t>(g, "n", 8000, "config.graph");
    out.density = get_or(g, "density", 0.01, "config.graph");
    out.rewire_p = get_or(g, "rewire_p", 0.1, "config.graph");
    out.seed = get_or<std::uint64_t>(g, "seed", 7, "config.graph");
    out.sweep = get_or<std::string>(g, "sweep", "", "config.graph");
    out.sweep_sizes =
        get_or<std::vector<std::size_t>>(g, "sweep_sizes", {}, "config.graph");
    out.sweep_densities =
        get_or<std::vector<double>>(g, "sweep_densities", {}, "config.graph");

    if (out.edge_list.empty() == out.generator.empty())
      config_fail("config.graph", "set exactly one of edge_list or generator");
    if (!out.generator.empty() && out.generator != "ba" && out.generator != "ws")
      config_fail("config.graph.generator",
                  "unknown generator '" + out.generator + "'");
    if (!out.sweep.empty() && out.sweep != "sizes" && out.sweep != "densities")
      config_fail("config.graph.sweep", "must be 'sizes' or 'densities'");
    if (!out.sweep.empty() && out.generator.empty())
      config_fail("config.graph.sweep", "sweeps need a generator");
    if (!(out.density > 0.0) || out.density >= 1.0)
      config_fail("config.graph.density", "must lie in (0, 1)");
  }

  {
    const Json g = j.contains("embedding") ? j.at("embedding") : Json::object();
    check_keys(g,
               {"algorithm", "dim", "runs", "base_seed", "format",
                "run_timeout_seconds", "hope", "node2vec", "line"},
               "config.embedding");
    auto& out = cfg.embedding;
    out.algorithm = get_or<std::string>(g, "algorithm", "hope", "config.embedding");
    out.dim = get_or<Index>(g, "dim", 128, "config.embedding");
    out.runs = get_or<std::size_t>(g, "runs", 30, "config.embedding");
    out.base_seed = get_or<std::uint64_t>(g, "base_seed", 1, "config.embedding");
    out.format = get_or<std::string>(g, "format", "binary", "config.embedding");
    out.run_timeout_seconds =
        get_or(g, "run_timeout_seconds", 0.0, "config.embedding");
    if (out.algorithm != "hope" && out.algorithm != "node2vec" &&
        out.algorithm != "line")
      config_fail("config.embedding.algorithm",
                  "unknown algorithm '" + out.algorithm +
                      "'; precomputed embedding files can be compared with "
                      "`compare --external-dir <dir>`");
    if (out.dim < 1) config_fail("config.embedding.dim", "must be positive");
    if (out.runs < 2) config_fail("config.embedding.runs", "must be at least 2");
    if (out.format != "binary" && out.format != "text")
      config_fail("config.embedding.format", "must be 'binary' or 'text'");
    if (out.run_timeout_seconds < 0.0)
      config_fail("config.embedding.run_timeout_seconds", "must be non-negative");

    if (g.contains("hope")) {
      const Json& h = g.at("hope");
      check_keys(h,
                 {"beta_factor", "neumann_tol", "neumann_max_terms", "svd_oversample",
                  "svd_power_iters"},
                 "config.embedding.hope");
      out.hope.beta_factor =
          get_or(h, "beta_factor", out.hope.beta_factor, "config.embedding.hope");
      out.hope.neumann_tol =
          get_or(h, "neumann_tol", out.hope.neumann_tol, "config.embedding.hope");
      out.hope.neumann_max_terms = get_or(h, "neumann_max_terms",
                                          out.hope.neumann_max_terms,
                                          "config.embedding.hope");
      out.hope.svd_oversample = get_or(h, "svd_oversample", out.hope.svd_oversample,
                                       "config.embedding.hope");
      out.hope.svd_power_iters = get_or(h, "svd_power_iters", out.hope.svd_power_iters,
                                        "config.embedding.hope");
    }
    if (g.contains("node2vec")) {
      const Json& h = g.at("node2vec");
      check_keys(h,
                 {"p", "q", "walks_per_node", "walk_length", "window", "epochs",
                  "negatives", "initial_lr"},
                 "config.embedding.node2vec");
      auto& n2v = out.node2vec;
      n2v.p = get_or(h, "p", n2v.p, "config.embedding.node2vec");
      n2v.q = get_or(h, "q", n2v.q, "config.embedding.node2vec");
      n2v.walks_per_node =
          get_or(h, "walks_per_node", n2v.walks_per_node, "config.embedding.node2vec");
      n2v.walk_length =
          get_or(h, "walk_length", n2v.walk_length, "config.embedding.node2vec");
      n2v.window = get_or(h, "window", n2v.window, "config.embedding.node2vec");
      n2v.epochs = get_or(h, "epochs", n2v.epochs, "config.embedding.node2vec");
      n2v.sgns.negatives =
          get_or(h, "negatives", n2v.sgns.negatives, "config.embedding.node2vec");
      n2v.sgns.initial_lr =
          get_or(h, "initial_lr", n2v.sgns.initial_lr, "config.embedding.node2vec");
    }
    if (g.contains("line")) {
      const Json& h = g.at("line");
      check_keys(h,
                 {"order", "samples_per_edge", "negatives", "initial_lr", "densify"},
                 "config.embedding.line");
      auto& ln = out.line;
      ln.order = detail::parse_line_order(
          get_or<std::string>(h, "order", "both", "config.embedding.line"),
          "config.embedding.line.order");
      ln.samples_per_edge =
          get_or(h, "samples_per_edge", ln.samples_per_edge, "config.embedding.line");
      ln.sgns.negatives =
          get_or(h, "negatives", ln.sgns.negatives, "config.embedding.line");
      ln.sgns.initial_lr =
          get_or(h, "initial_lr", ln.sgns.initial_lr, "config.embedding.line");
      ln.densify = get_or(h, "densify", ln.densify, "config.embedding.line");
    }
  }

  {
    const Json g = j.contains("compare") ? j.at("compare") : Json::object();
    check_keys(g, {"measures", "k", "center", "angle_pairs", "window_fraction"},
               "config.compare");
    auto& out = cfg.compare;
    if (g.contains("measures")) {
      const auto names =
          get_or<std::vector<std::string>>(g, "measures", {}, "config.compare");
      if (names.empty()) config_fail("config.compare.measures", "must not be empty");
      out.measures.clear();
      for (const auto& name : names) {
        const Measure m = detail::parse_measure(name, "config.compare.measures");
        for (Measure seen : out.measures)
          if (seen == m)
            config_fail("config.compare.measures", "duplicate measure '" + name + "'");
        out.measures.push_back(m);
      }
    }
    out.k = get_or(g, "k", 20, "config.compare");
    out.center = get_or(g, "center", false, "config.compare");
    out.angle_pairs = get_or<std::size_t>(g, "angle_pairs", 1000, "config.compare");
    out.window_fraction = get_or(g, "window_fraction", 0.01, "config.compare");
    if (out.k < 1) config_fail("config.compare.k", "must be positive");
    if (out.angle_pairs < 1) config_fail("config.compare.angle_pairs", "must be positive");
    if (!(out.window_fraction > 0.0) || out.window_fraction > 1.0)
      config_fail("config.compare.window_fraction", "must lie in (0, 1]");
  }

  if (j.contains("downstream")) {
    const Json& g = j.at("downstream");
    check_keys(g,
               {"labels", "multi_label", "split_fraction", "seed", "epochs",
                "batch_size", "lr", "l2", "sample_count", "reps", "cv_folds",
                "cv_reps", "dump_predictions"},
               "config.downstream");
    auto& out = cfg.downstream;
    out.enabled = true;
    out.labels = get_or<std::string>(g, "labels", "", "config.downstream");
    out.multi_label = get_or(g, "multi_label", false, "config.downstream");
    out.split_fraction = get_or(g, "split_fraction", 0.75, "config.downstream");
    out.seed = get_or<std::uint64_t>(g, "seed", 1, "config.downstream");
    out.classifier.epochs = get_or(g, "epochs", 100, "config.downstream");
    out.classifier.batch_size = get_or(g, "batch_size", 64, "config.downstream");
    out.classifier.lr = get_or(g, "lr", 0.1, "config.downstream");
    out.classifier.l2 = get_or(g, "l2", 1e-4, "config.downstream");
    out.sample_count = get_or<std::size_t>(g, "sample_count", 5, "config.downstream");
    out.reps = get_or<std::size_t>(g, "reps", 10, "config.downstream");
    out.cv_folds = get_or(g, "cv_folds", 10, "config.downstream");
    out.cv_reps = get_or(g, "cv_reps", 10, "config.downstream");
    out.dump_predictions = get_or(g, "dump_predictions", false, "config.downstream");
    if (out.labels.empty()) config_fail("config.downstream.labels", "required");
    if (!(out.split_fraction > 0.0) || !(out.split_fraction < 1.0))
      config_fail("config.downstream.split_fraction", "must lie in (0, 1)");
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  return parse_config(j);
}

inline Json ExperimentConfig::resolved() const {
  Json j;
  j["schema_version"] = schema_version;
  j["out_dir"] = out_dir;
  j["workers"] = workers;

  Json g;
  if (!graph.edge_list.empty()) {
    g["edge_list"] = graph.edge_list;
    g["directed"] = graph.directed;
    g["weighted"] = graph.weighted;
  } else {
    g["generator"] = graph.generator;
    g["n"] = graph.n;
    g["density"] = graph.density;
    if (graph.generator == "ws") g["rewire_p"] = graph.rewire_p;
    g["seed"] = graph.seed;
    if (!graph.sweep.empty()) g["sweep"] = graph.sweep;
    if (!graph.sweep_sizes.empty()) g["sweep_sizes"] = graph.sweep_sizes;
    if (!graph.sweep_densities.empty()) g["sweep_densities"] = graph.sweep_densities;
  }
  j["graph"] = g;

  Json e;
  e["algorithm"] = embedding.algorithm;
  e["dim"] = embedding.dim;
  e["runs"] = embedding.runs;
  e["base_seed"] = embedding.base_seed;
  e["format"] = embedding.format;
  e["run_timeout_seconds"] = embedding.run_timeout_seconds;
  if (embedding.algorithm == "hope") {
    e["hope"] = {{"beta_factor", embedding.hope.beta_factor},
                 {"neumann_tol", embedding.hope.neumann_tol},
                 {"neumann_max_terms", embedding.hope.neumann_max_terms},
                 {"svd_oversample", embedding.hope.svd_oversample},
                 {"svd_power_iters", embedding.hope.svd_power_iters}};
  } else if (embedding.algorithm == "node2vec") {
    e["node2vec"] = {{"p", embedding.node2vec.p},
                     {"q", embedding.node2vec.q},
                     {"walks_per_node", embedding.node2vec.walks_per_node},
                     {"walk_length", embedding.node2vec.walk_length},
                     {"window", embedding.node2vec.window},
                     {"epochs", embedding.node2vec.epochs},
                     {"negatives", embedding.node2vec.sgns.negatives},
                     {"initial_lr", embedding.node2vec.sgns.initial_lr}};
  } else if (embedding.algorithm == "line") {
    e["line"] = {{"order", detail::line_order_name(embedding.line.order)},
                 {"samples_per_edge", embedding.line.samples_per_edge},
                 {"negatives", embedding.line.sgns.negatives},
                 {"initial_lr", embedding.line.sgns.initial_lr},
                 {"densify", embedding.line.densify}};
  }
  j["embedding"] = e;

  Json c;
  Json names = Json::array();
  for (Measure m : compare.measures) names.push_back(measure_name(m));
  c["measures"] = names;
  c["k"] = compare.k;
  c["center"] = compare.center;
  c["angle_pairs"] = compare.angle_pairs;
  c["window_fraction"] = compare.window_fraction;
  j["compare"] = c;

  if (downstream.enabled) {
    Json d;
    d["labels"] = downstream.labels;
    d["multi_label"] = downstream.multi_label;
    d["split_fraction"] = downstream.split_fraction;
    d["seed"] = downstream.seed;
    d["epochs"] = downstream.classifier.epochs;
    d["batch_size"] = downstream.classifier.batch_size;
    d["lr"] = downstream.classifier.lr;
    d["l2"] = downstream.classifier.l2;
    d["sample_count"] = downstream.sample_count;
    d["reps"] = downstream.reps;
    d["cv_folds"] = downstream.cv_folds;
    d["cv_reps"] = downstream.cv_reps;
    d["dump_predictions"] = downstream.dump_predictions;
    j["downstream"] = d;
  }
  return j;
}

}  // namespace embstab
