#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sanid/dataset.hpp"
#include "sanid/training.hpp"

namespace sanid {

// Everything a training run needs, as read from a flat `key = value` file.
struct RunConfig {
  TrainConfig train;
  std::string dataset;
  DatasetFormat dataset_format = DatasetFormat::kJsonl;
  std::string val_dataset;   // empty: carve val_ratio of the training part
  std::string test_dataset;  // empty: carve test_ratio of `dataset`
  double test_ratio = 0.1;
  double val_ratio = 0.1;
  std::string output_dir = "run";
};

struct ConfigKey {
  std::string_view name;
  std::string_view help;
  bool training;  // part of the TrainConfig snapshot stored in checkpoints
};

// Every accepted key, in the order used when writing configs.
const std::vector<ConfigKey>& config_keys();

// "learning_rate" <-> "--learning-rate"
std::string key_to_flag(std::string_view key);

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

// Parses `key = value` lines; '#' starts a comment. Unknown or repeated keys
// are rejected with their name and line.
ConfigEntries parse_config_text(std::string_view text, std::string_view source);
ConfigEntries read_config_file(const std::string& path);

// Defaults, then `entries` in order (later entries win).
RunConfig resolve_config(const ConfigEntries& entries);
TrainConfig resolve_train_config(const ConfigEntries& entries);

// All keys with their current values; resolve_config(parse(text)) == config.
std::string to_config_text(const RunConfig& config);
std::string to_config_text(const TrainConfig& config);

// Shortest round-trip decimal form.
std::string format_double(double value);

}  // namespace sanid
