#pragma once

#include <map>
#include <string>
#include <vector>

#include "entrofunc/simulation.hpp"
#include "entrofunc/types.hpp"

namespace entrofunc {

// CSV sample files: one observation per row, d numeric columns, optional
// single header row (auto-detected when the first row is non-numeric).
// Discrete mode requires integer-parsable cells. Throws InputError.
Sample read_sample_csv(const std::string& path, Mode mode);

// Writes with 17 significant digits so a round-trip reproduces the sample
// bit-exactly.
void write_sample_csv(const std::string& path, const Sample& sample);

// "%.17g" with LF-stable formatting; used for every real in CSV output.
std::string format_real(double value);

// Parsed `key = value` / `[section]` configuration text; keys outside any
// section land in the "" section. '#' starts a comment line.
using ConfigMap = std::map<std::string, std::map<std::string, std::string>>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap parse_config_file(const std::string& path);

// Builds the experiment from [experiment] / [dist_x] / [dist_y] sections.
// A `preset` key seeds the config with preset_config(name) before the
// remaining keys override individual fields. Unknown keys fail closed with
// ConfigError listing them.
ExperimentConfig experiment_from_config(const ConfigMap& config);

void write_residuals_csv(const std::string& path,
                         const ReplicationResult& result);
void write_summary_csv(const std::string& path,
                       const ReplicationResult& result);

// JSON run manifest: command, resolved configuration, seed, tool version,
// wall-clock duration, output paths.
void write_manifest(const std::string& path, const std::string& command,
                    const std::string& resolved_config, std::uint64_t seed,
                    double duration_ms,
                    const std::vector<std::string>& outputs);

// JSON rendering of a config for manifests.
std::string config_to_json(const ExperimentConfig& config);

}  // namespace entrofunc
