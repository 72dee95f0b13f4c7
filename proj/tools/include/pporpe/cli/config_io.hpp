#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pporpe/trainer.hpp"

namespace pporpe::cli {

/// Flat `key=value` text. Blank lines and lines starting with '#' are skipped.
/// Throws ConfigError on malformed lines or duplicate keys.
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Overwrites the fields named in `values`. Unknown keys are an error.
void apply_key_values(const std::map<std::string, std::string>& values, TrainerConfig& config);

/// Every TrainerConfig field as ordered key/value pairs; doubles use 17 digits.
std::vector<std::pair<std::string, std::string>> to_key_values(const TrainerConfig& config);

std::string format_double(double v);

struct RunManifest {
  TrainerConfig config;
  std::string version;
  std::string timestamp;
  std::filesystem::path out_dir;
};

std::string artifact_version();
std::string utc_timestamp();

std::string render_manifest(const RunManifest& manifest);
RunManifest parse_manifest(const std::string& text);
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace pporpe::cli
