#include "sanid/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sanid/error.hpp"

namespace sanid {
namespace {

std::string_view trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

const ConfigKey* find_key(std::string_view name) {
  for (const auto& key : config_keys())
    if (key.name == name) return &key;
  return nullptr;
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
    fail(ErrorKind::kConfig, key + ": '" + value + "' is not a number");
  }
  return out;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    fail(ErrorKind::kConfig, key + ": '" + value + "' is not a non-negative integer");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  fail(ErrorKind::kConfig, key + ": '" + value + "' is not true or false");
}

bool apply_train_key(TrainConfig& c, const std::string& key, const std::string& value) {
  if (key == "learning_rate") c.learning_rate = to_double(key, value);
  else if (key == "beta1") c.beta1 = to_double(key, value);
  else if (key == "beta2") c.beta2 = to_double(key, value);
  else if (key == "epsilon") c.epsilon = to_double(key, value);
  else if (key == "batch_size") c.batch_size = to_unsigned(key, value);
  else if (key == "epochs") c.epochs = to_unsigned(key, value);
  else if (key == "l2_gamma") c.l2_gamma = to_double(key, value);
  else if (key == "hidden_units") c.hidden_units = to_unsigned(key, value);
  else if (key == "seed") c.seed = to_unsigned(key, value);
  else if (key == "arch") c.arch = parse_architecture(value);
  else if (key == "embeddings") c.embeddings = value.empty() ? "random" : value;
  else if (key == "embedding_dim") c.embedding_dim = to_unsigned(key, value);
  else if (key == "freeze_embeddings") {
    if (value == "auto") c.freeze_embeddings.reset();
    else c.freeze_embeddings = to_bool(key, value);
  } else if (key == "loss_reduction") {
    if (value == "sum") c.reduction = LossReduction::kSum;
    else if (value == "mean") c.reduction = LossReduction::kMean;
    else fail(ErrorKind::kConfig, "loss_reduction: '" + value + "' is not sum or mean");
  } else if (key == "lowercase") c.lowercase = to_bool(key, value);
  else return false;
  return true;
}

void append(std::ostringstream& out, std::string_view key, const std::string& value) {
  out << key << " = " << value << '\n';
}

void write_train(std::ostringstream& out, const TrainConfig& c) {
  append(out, "learning_rate", format_double(c.learning_rate));
  append(out, "beta1", format_double(c.beta1));
  append(out, "beta2", format_double(c.beta2));
  append(out, "epsilon", format_double(c.epsilon));
  append(out, "batch_size", std::to_string(c.batch_size));
  append(out, "epochs", std::to_string(c.epochs));
  append(out, "l2_gamma", format_double(c.l2_gamma));
  append(out, "hidden_units", std::to_string(c.hidden_units));
  append(out, "seed", std::to_string(c.seed));
  append(out, "arch", std::string(architecture_name(c.arch)));
  append(out, "embeddings", c.embeddings);
  append(out, "embedding_dim", std::to_string(c.embedding_dim));
  append(out, "freeze_embeddings",
         c.freeze_embeddings ? (*c.freeze_embeddings ? "true" : "false") : "auto");
  append(out, "loss_reduction", c.reduction == LossReduction::kSum ? "sum" : "mean");
  append(out, "lowercase", c.lowercase ? "true" : "false");
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"learning_rate", "Adam learning rate", true},
      {"beta1", "Adam first-moment decay", true},
      {"beta2", "Adam second-moment decay", true},
      {"epsilon", "Adam epsilon", true},
      {"batch_size", "utterances per optimizer step", true},
      {"epochs", "passes over the training set", true},
      {"l2_gamma", "L2 coefficient on weight matrices", true},
      {"hidden_units", "LSTM units per direction", true},
      {"seed", "seed for initialization, splits and shuffling", true},
      {"arch", "lstm | bilstm", true},
      {"embeddings", "random | path to a text vector file", true},
      {"embedding_dim", "embedding width", true},
      {"freeze_embeddings", "auto | true | false", true},
      {"loss_reduction", "sum | mean over the batch", true},
      {"lowercase", "lowercase during preprocessing", true},
      {"dataset", "training data file", false},
      {"dataset_format", "jsonl | csv | snips-nested", false},
      {"val_dataset", "optional validation file", false},
      {"test_dataset", "optional test file", false},
      {"test_ratio", "held-out test fraction when no test file", false},
      {"val_ratio", "validation fraction of the training part", false},
      {"output_dir", "directory for checkpoint, history and reports", false},
  };
  return keys;
}

std::string key_to_flag(std::string_view key) {
  std::string flag = "--";
  for (char c : key) flag += c == '_' ? '-' : c;
  return flag;
}

ConfigEntries parse_config_text(std::string_view text, std::string_view source) {
  ConfigEntries entries;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++number;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(number);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ErrorKind::kConfig, where + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!find_key(key)) fail(ErrorKind::kConfig, where + ": unknown key '" + key + "'");
    for (const auto& [k, v] : entries) {
      if (k == key) fail(ErrorKind::kConfig, where + ": key '" + key + "' repeated");
    }
    entries.emplace_back(key, value);
  }
  return entries;
}

ConfigEntries read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

RunConfig resolve_config(const ConfigEntries& entries) {
  RunConfig c;
  for (const auto& [key, value] : entries) {
    if (!find_key(key)) fail(ErrorKind::kConfig, "unknown key '" + key + "'");
    if (apply_train_key(c.train, key, value)) continue;
    if (key == "dataset") c.dataset = value;
    else if (key == "dataset_format") c.dataset_format = parse_dataset_format(value);
    else if (key == "val_dataset") c.val_dataset = value;
    else if (key == "test_dataset") c.test_dataset = value;
    else if (key == "test_ratio") c.test_ratio = to_double(key, value);
    else if (key == "val_ratio") c.val_ratio = to_double(key, value);
    else if (key == "output_dir") c.output_dir = value;
  }
  if (c.test_ratio < 0 || c.test_ratio >= 1 || c.val_ratio < 0 || c.val_ratio >= 1) {
    fail(ErrorKind::kConfig, "test_ratio and val_ratio must lie in [0, 1)");
  }
  c.train.validate();
  return c;
}

TrainConfig resolve_train_config(const ConfigEntries& entries) {
  TrainConfig c;
  for (const auto& [key, value] : entries) {
    if (!apply_train_key(c, key, value)) {
      fail(ErrorKind::kConfig, "'" + key + "' is not a training key");
    }
  }
  c.validate();
  return c;
}

std::string to_config_text(const TrainConfig& config) {
  std::ostringstream out;
  write_train(out, config);
  return out.str();
}

std::string to_config_text(const RunConfig& c) {
  std::ostringstream out;
  write_train(out, c.train);
  append(out, "dataset", c.dataset);
  append(out, "dataset_format", std::string(dataset_format_name(c.dataset_format)));
  append(out, "val_dataset", c.val_dataset);
  append(out, "test_dataset", c.test_dataset);
  append(out, "test_ratio", format_double(c.test_ratio));
  append(out, "val_ratio", format_double(c.val_ratio));
  append(out, "output_dir", c.output_dir);
  return out.str();
}

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

}  // namespace sanid
