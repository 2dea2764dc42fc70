#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace granreg::tools {

/// Record of one CLI run: resolved configuration, every file written, and
/// enough context to reproduce the run exactly.
struct RunManifest {
  std::string subcommand;
  std::map<std::string, std::string> config;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  std::string version;
  double duration_seconds = 0.0;
  bool verifications_passed = true;

  void add_output(const std::filesystem::path& p) { outputs.push_back(p.string()); }
};

/// Writes out_dir/manifest.json (and lists it among the outputs).
void write_manifest(RunManifest manifest, const std::filesystem::path& out_dir);

/// Scope timer filling manifest.duration_seconds on destruction.
class ManifestTimer {
 public:
  explicit ManifestTimer(RunManifest& manifest)
      : manifest_(manifest), start_(std::chrono::steady_clock::now()) {}
  ~ManifestTimer() {
    const auto end = std::chrono::steady_clock::now();
    manifest_.duration_seconds = std::chrono::duration<double>(end - start_).count();
  }

 private:
  RunManifest& manifest_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace granreg::tools
