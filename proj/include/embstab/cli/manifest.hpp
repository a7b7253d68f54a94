#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "embstab/error.hpp"
#include "embstab/version.hpp"

namespace embstab {

// ISO 8601 UTC, second resolution. Manifests are the only outputs that
// carry a timestamp; everything else must be byte-identical across reruns.
inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Writes via a temp file in the same directory, then renames into place,
// so readers never observe a half-written file.
inline void atomic_write(const std::filesystem::path& path, const std::string& body) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    out.flush();
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

// Same contract as atomic_write for content produced by a stream writer,
// without first buffering it in memory.
template <typename Fn>
void atomic_stream(const std::filesystem::path& path, Fn&& write_body) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    write_body(out);
    out.flush();
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  atomic_write(path, j.dump(2) + "\n");
}

struct RunManifest {
  std::string stage;
  std::string config_digest;
  nlohmann::json resolved_config;
  std::string graph_digest;              // empty when the stage has no graph
  nlohmann::json generator_params;       // null for file-sourced graphs
  std::vector<std::uint64_t> run_seeds;  // empty when the stage has no runs
  double wall_clock_seconds = 0.0;
  nlohmann::json extra;                  // stage-specific details

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["stage"] = stage;
    j["toolkit_version"] = kVersion;
    j["timestamp"] = utc_timestamp();
    j["config_digest"] = config_digest;
    j["resolved_config"] = resolved_config;
    if (!graph_digest.empty()) j["graph_digest"] = graph_digest;
    if (!generator_params.is_null()) j["generator_params"] = generator_params;
    if (!run_seeds.empty()) j["run_seeds"] = run_seeds;
    j["wall_clock_seconds"] = wall_clock_seconds;
    if (!extra.is_null()) j["details"] = extra;
    return j;
  }
};

inline void write_manifest(const RunManifest& m, const std::filesystem::path& dir) {
  write_json(dir / (m.stage + "_manifest.json"), m.to_json());
}

class StageTimer {
 public:
  StageTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace embstab
