#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "embstab/cli/config.hpp"
#include "embstab/cli/pipeline.hpp"
#include "embstab/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"node embedding stability toolkit"};
  app.set_version_flag("--version", embstab::kVersion);
  app.fallthrough();  // global flags may follow the subcommand
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string external_dir;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  auto* opt_config =
      app.add_option("--config", config_path, "experiment config (JSON)");
  auto* opt_seed =
      app.add_option("--seed", seed, "override the embedding base seed");
  auto* opt_workers = app.add_option("--workers", workers, "worker thread count");
  auto* opt_out =
      app.add_option("--out", out_dir, "output directory (report: results root)");

  auto* c_generate =
      app.add_subcommand("generate", "write graphs from the config's generator");
  auto* c_embed = app.add_subcommand("embed", "train one embedding per seed");
  auto* c_compare =
      app.add_subcommand("compare", "stability measures over all run pairs");
  c_compare->add_option("--external-dir", external_dir,
                        "read .emb files from this directory instead of out_dir");
  auto* c_downstream = app.add_subcommand(
      "downstream", "classifier stability and F1 spread over the runs");
  app.add_subcommand("report", "collect result files under --out into report.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.get_subcommand("report")->parsed()) {
      std::string root = out_dir;
      if (root.empty() && opt_config->count())
        root = embstab::load_config(config_path).out_dir;
      return embstab::cmd_report(root);
    }

    if (!opt_config->count())
      throw embstab::ConfigError("--config is required for this command");
    embstab::ExperimentConfig cfg = embstab::load_config(config_path);
    if (opt_seed->count()) cfg.embedding.base_seed = seed;
    if (opt_workers->count()) {
      if (workers < 1) throw embstab::ConfigError("--workers must be at least 1");
      cfg.workers = workers;
    }
    if (opt_out->count()) cfg.out_dir = out_dir;

    if (c_generate->parsed()) return embstab::cmd_generate(cfg);
    if (c_embed->parsed()) return embstab::cmd_embed(cfg);
    if (c_compare->parsed()) return embstab::cmd_compare(cfg, external_dir);
    if (c_downstream->parsed()) return embstab::cmd_downstream(cfg);
    throw embstab::ConfigError("no command given");
  } catch (const embstab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const embstab::ParseError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
