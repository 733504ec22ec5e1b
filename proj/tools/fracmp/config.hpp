#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fracmp/experiments.hpp"

namespace fracmp::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Mode { experiment, operator_only };
enum class OutputFormat { csv, json };

struct RunConfig {
  Mode mode = Mode::experiment;
  SweepConfig sweep;
  /// Interval and resolution; folded into sweep.grid by validation.
  double a = -1.0;
  double b = 1.0;
  int n = 128;
  std::string nonlinearity = "canonical";
  std::filesystem::path table_path;
  /// Single lambda for solve-mp / solve-monotone; <= 0 locates lambda* first.
  double lambda = 0.0;
  std::filesystem::path output_dir = "fracmp_out";
  OutputFormat format = OutputFormat::csv;
  std::uint64_t seed = 7;
};

/// Environment variable that overrides output_dir.
inline constexpr const char* kOutputDirEnv = "FRACMP_OUTPUT_DIR";

/// Flat "key = value" document, '#' comments. Unknown keys, sections and
/// dotted keys are rejected. Errors name the offending key.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text);

/// Defaults with the environment override applied.
RunConfig default_config();

/// Checks every constraint and fills derived fields (grid, nonlinearity).
void finalize(RunConfig& cfg);

/// Resolved key/value pairs in a fixed order, for provenance headers.
std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& cfg);

}  // namespace fracmp::cli
