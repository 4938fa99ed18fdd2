#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "loopgrating/parallel.hpp"
#include "loopgrating/sweep/config.hpp"

namespace loopgrating::sweep {

inline constexpr const char* kToolVersion = "1.0.0";

struct FileDigest {
  std::string name;    // relative to the output directory
  std::string sha256;  // lowercase hex
};

struct RunManifest {
  std::string scenario;
  std::string tool_version = kToolVersion;
  std::string timestamp;  // UTC, ISO 8601
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<FileDigest> files;
};

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// Runs the configured scenario into out_dir (created if missing), writing
/// data tables, a gnuplot script per table and manifest.txt. Data files
/// depend only on the configuration.
RunManifest run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir, Parallel par = {});

/// One `key = value` line per entry; emitted files as `file.<name> = <sha256>`.
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace loopgrating::sweep
