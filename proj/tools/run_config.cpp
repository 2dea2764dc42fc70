#include "run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "granreg/errors.hpp"

namespace granreg::tools {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

RunConfig RunConfig::parse_string(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line is not 'key = value'", line_no);
    }
    const std::string key = trim(trimmed.substr(0, eq));
    const std::string value = trim(trimmed.substr(eq + 1));
    if (key.empty()) throw ParseError("config line has empty key", line_no);
    cfg.values_[key] = value;
  }
  return cfg;
}

RunConfig RunConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str());
}

std::optional<std::string> RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    const double parsed = std::stod(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("trailing characters");
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + *v + "' is not a number");
  }
}

std::uint64_t RunConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    const unsigned long long parsed = std::stoull(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("trailing characters");
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + *v + "' is not an integer");
  }
}

GenSettings parse_generator_config(const RunConfig& cfg) {
  static const std::set<std::string> known = {"n_stays", "n_codes", "alpha",      "d_mean",
                                              "d_max",   "beta_scale", "beta0",   "seed",
                                              "noise_sigma", "target_r2"};
  for (const auto& [key, _] : cfg.values()) {
    if (!known.count(key)) throw ConfigError("unknown generator config key '" + key + "'");
  }

  GenSettings settings;
  GeneratorConfig& g = settings.config;
  g.n_stays = static_cast<std::size_t>(cfg.get_u64("n_stays", g.n_stays));
  g.n_codes = static_cast<std::size_t>(cfg.get_u64("n_codes", g.n_codes));
  g.alpha = cfg.get_double("alpha", g.alpha);
  g.d_mean = cfg.get_double("d_mean", g.d_mean);
  g.d_max = static_cast<int>(cfg.get_u64("d_max", static_cast<std::uint64_t>(g.d_max)));
  g.beta_scale = cfg.get_double("beta_scale", g.beta_scale);
  g.beta0 = cfg.get_double("beta0", g.beta0);
  g.seed = cfg.get_u64("seed", g.seed);

  if (cfg.contains("noise_sigma") && cfg.contains("target_r2")) {
    throw ConfigError("generator config: give either noise_sigma or target_r2, not both");
  }
  if (cfg.contains("target_r2")) {
    settings.target_r2 = cfg.get_double("target_r2", 0.0);
  } else {
    g.noise_sigma = cfg.get_double("noise_sigma", g.noise_sigma);
  }
  if (!(g.alpha > 1.0)) {
    throw ConfigError("generator config: alpha must exceed 1 (field 'alpha')");
  }
  return settings;
}

}  // namespace granreg::tools
