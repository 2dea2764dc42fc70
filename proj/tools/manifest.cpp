#include "manifest.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "granreg/errors.hpp"

namespace granreg::tools {

void write_manifest(RunManifest manifest, const std::filesystem::path& out_dir) {
  const auto path = out_dir / "manifest.json";
  manifest.outputs.push_back(path.string());

  nlohmann::json j;
  j["subcommand"] = manifest.subcommand;
  j["config"] = manifest.config;
  j["inputs"] = manifest.inputs;
  j["outputs"] = manifest.outputs;
  j["seed"] = manifest.seed;
  j["version"] = manifest.version;
  j["duration_seconds"] = manifest.duration_seconds;
  j["verifications_passed"] = manifest.verifications_passed;

  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
}

}  // namespace granreg::tools
