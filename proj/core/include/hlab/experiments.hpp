#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hlab/control_set.hpp"
#include "hlab/density.hpp"

namespace hlab {

/// Experiment kinds accepted in the "kind" field of a config.
inline constexpr const char* kExperimentKinds[] = {"spectral-scan", "bernstein-check", "covering",
                                                   "dissipation",   "control-run",     "singular-space"};

struct Diagnostic {
  std::string field;  ///< JSON path such as "params.epsilon"
  std::string message;
};

/// Reads a JSON config. Syntax errors raise kConfigError naming line and column.
nlohmann::json load_config(const std::filesystem::path& path);
nlohmann::json parse_config(std::string_view text);

/// Every problem that would stop the config from running; empty iff runnable.
std::vector<Diagnostic> validate_config(const nlohmann::json& config);

ControlSet control_set_from_json(const nlohmann::json& j, int dim, std::uint64_t seed);
DensityFn density_from_json(const nlohmann::json& j);
Box box_from_json(const nlohmann::json& j);

struct AcceptanceCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct RunManifest {
  std::string kind;
  std::string config_hash;
  std::string tool_version;
  std::string started;
  std::string finished;
  std::uint64_t seed = 1;
  std::vector<std::string> files;
  std::vector<AcceptanceCheck> checks;
  bool passed = true;
};

struct RunOptions {
  std::filesystem::path out_dir;       ///< overrides config "output_dir" when non-empty
  std::optional<std::uint64_t> seed;   ///< overrides config "seed"
  int threads = 1;
  /// When set, the kind must match the config (CLI subcommand consistency).
  std::optional<std::string> expected_kind;
};

/// Validates, runs, writes outputs and plot scripts, then writes manifest.json
/// last through a temporary file and rename. On failure every file written
/// by this run is removed and the error is rethrown.
RunManifest run_experiment(const nlohmann::json& config, const RunOptions& options = {});

nlohmann::json to_json(const RunManifest& manifest);

/// 64-bit FNV-1a as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// printf "%.17g"
std::string format_double(double value);

const char* version_string();

}  // namespace hlab
