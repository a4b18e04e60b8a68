#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sanid/checkpoint.hpp"
#include "sanid/config.hpp"
#include "sanid/evaluation.hpp"

namespace sanid {

// Environment variable naming a directory searched for relative --config
// paths that do not exist under the working directory.
inline constexpr const char* kConfigDirEnv = "SANID_CONFIG_DIR";

std::filesystem::path locate_config(const std::string& path);

// A complete training run held in memory: data loading, splitting,
// vocabulary, embeddings, initialization and the optimizer loop.
struct TrainingRun {
  Checkpoint checkpoint;
  std::vector<EpochRecord> history;
  std::vector<Example> train;
  std::vector<Example> val;
  std::vector<Example> test;
  std::vector<std::string> warnings;
  double embedding_coverage = 0.0;
};

TrainingRun run_training(const RunConfig& config);

// Writes <output_dir>/{model.ckpt, history.tsv, resolved.cfg,
// train.jsonl, val.jsonl, test.jsonl} and logs progress to `log`.
TrainingRun cmd_train(const RunConfig& config, std::ostream& log);

std::string history_tsv(const std::vector<EpochRecord>& history);

// Fails with kData listing both sides when `rows` use intents the model
// does not know.
EvalReport evaluate_rows(const Checkpoint& checkpoint, const std::vector<RawUtterance>& rows);

struct EvaluateOptions {
  std::string checkpoint;
  std::string dataset;
  DatasetFormat format = DatasetFormat::kJsonl;
  std::string report_prefix;  // writes <prefix>.txt and <prefix>.jsonl when set
};

EvalReport cmd_evaluate(const EvaluateOptions& options, std::ostream& out);

struct PredictOptions {
  std::string checkpoint;
  std::vector<std::string> texts;
  std::string input;  // file with one utterance per line
  bool attention = false;
};

// One line per utterance: intent <TAB> probability [<TAB> token:weight ...]
void cmd_predict(const PredictOptions& options, std::ostream& out);

void cmd_dataset_convert(const std::string& input, DatasetFormat format,
                         const std::string& output, std::ostream& out);
void cmd_dataset_synth(std::size_t intents, std::size_t per_intent, std::uint64_t seed,
                       const std::string& output, std::ostream& out);
void cmd_dataset_stats(const std::string& input, DatasetFormat format, std::ostream& out);

}  // namespace sanid
