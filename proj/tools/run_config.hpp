#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "granreg/synthetic.hpp"

namespace granreg::tools {

/// Flat `key = value` config file. Blank lines and `#` comments allowed;
/// unknown keys are rejected so typos fail loudly.
class RunConfig {
 public:
  static RunConfig parse_file(const std::filesystem::path& path);
  static RunConfig parse_string(const std::string& text);

  std::optional<std::string> get(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool contains(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Generator settings from a config file. Recognized keys: n_stays, n_codes,
/// alpha, d_mean, d_max, beta_scale, beta0, seed, and exactly one of
/// noise_sigma or target_r2 (target_r2 runs the noise calibration).
struct GenSettings {
  GeneratorConfig config;
  std::optional<double> target_r2;
};
GenSettings parse_generator_config(const RunConfig& cfg);

}  // namespace granreg::tools
