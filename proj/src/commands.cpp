#include "sanid/commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "sanid/embeddings.hpp"
#include "sanid/error.hpp"
#include "sanid/synthetic.hpp"

namespace sanid {
namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kEmbeddingStream = 2;

void require_file(const std::string& path, const char* what) {
  if (path.empty()) fail(ErrorKind::kConfig, std::string(what) + " path is not set");
  if (!std::filesystem::is_regular_file(path)) {
    fail(ErrorKind::kIo, std::string(what) + " not found: " + path);
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::kIo, "failed writing " + path.string());
}

std::string hex64(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(value));
  return buffer;
}

Dataset load_split_file(const std::string& path, const RunConfig& config, const LabelSet& labels) {
  require_file(path, "dataset");
  DatasetSpec spec;
  spec.format = config.dataset_format;
  spec.labels = labels;
  spec.preprocess.lowercase = config.train.lowercase;
  return load_dataset(spec, path);
}

}  // namespace

std::filesystem::path locate_config(const std::string& path) {
  std::filesystem::path p(path);
  if (std::filesystem::exists(p) || p.is_absolute()) return p;
  if (const char* dir = std::getenv(kConfigDirEnv); dir != nullptr && *dir != '\0') {
    const auto candidate = std::filesystem::path(dir) / p;
    if (std::filesystem::exists(candidate)) return candidate;
  }
  return p;
}

TrainingRun run_training(const RunConfig& config) {
  config.train.validate();
  require_file(config.dataset, "dataset");

  DatasetSpec spec;
  spec.name = config.dataset;
  spec.format = config.dataset_format;
  spec.seed = config.train.seed;
  spec.preprocess.lowercase = config.train.lowercase;
  Dataset data = load_dataset(spec, config.dataset);

  const double test = config.test_dataset.empty() ? config.test_ratio : 0.0;
  const double val = config.val_dataset.empty() ? config.val_ratio : 0.0;
  SplitResult parts = split(data.examples, SplitRatios::nested(test, val), config.train.seed);

  TrainingRun run;
  run.warnings = parts.warnings;
  run.train = std::move(parts.train);
  run.val = config.val_dataset.empty()
                ? std::move(parts.val)
                : load_split_file(config.val_dataset, config, data.labels).examples;
  run.test = config.test_dataset.empty()
                 ? std::move(parts.test)
                 : load_split_file(config.test_dataset, config, data.labels).examples;
  if (run.train.empty()) fail(ErrorKind::kData, "training split is empty");

  Vocab vocab = build_vocab(run.train);
  encode_examples(run.train, vocab);
  encode_examples(run.val, vocab);
  encode_examples(run.test, vocab);

  const Rng root(config.train.seed);
  Rng embedding_rng = root.fork(kEmbeddingStream);
  const bool frozen = config.train.embeddings_frozen();
  EmbeddingTable table;
  if (config.train.embeddings == "random") {
    table = random_embeddings(vocab, config.train.embedding_dim, embedding_rng, frozen);
    run.embedding_coverage = 0.0;
  } else {
    require_file(config.train.embeddings, "embedding file");
    EmbeddingLoad load = load_embeddings(config.train.embeddings, vocab,
                                         config.train.embedding_dim, embedding_rng, frozen);
    table = std::move(load.table);
    run.embedding_coverage = load.coverage;
  }

  ModelDims dims;
  dims.arch = config.train.arch;
  dims.vocab_size = vocab.size();
  dims.embedding_dim = config.train.embedding_dim;
  dims.hidden_units = config.train.hidden_units;
  dims.classes = data.labels.size();
  Rng init_rng = root.fork(kInitStream);
  ModelParams initial = ModelParams::initialize(dims, init_rng, std::move(table));

  TrainResult result = train(config.train, std::move(initial), run.train, run.val);
  run.history = std::move(result.history);
  run.checkpoint = {config.train, std::move(vocab), data.labels, std::move(result.params)};
  return run;
}

std::string history_tsv(const std::vector<EpochRecord>& history) {
  std::ostringstream out;
  out << "epoch\tsteps\ttrain_loss\tval_accuracy\n";
  for (const auto& r : history) {
    out << r.epoch << '\t' << r.steps << '\t' << format_double(r.train_loss) << '\t'
        << (r.val_accuracy ? format_double(*r.val_accuracy) : "na") << '\n';
  }
  return out.str();
}

TrainingRun cmd_train(const RunConfig& config, std::ostream& log) {
  TrainingRun run = run_training(config);
  for (const auto& w : run.warnings) log << "warning: " << w << '\n';

  const std::filesystem::path dir(config.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create output directory " + dir.string() + ": " + ec.message());

  save_checkpoint(run.checkpoint, dir / "model.ckpt");
  write_text(dir / "history.tsv", history_tsv(run.history));
  write_text(dir / "resolved.cfg", to_config_text(config));
  write_jsonl(dir / "train.jsonl", to_raw(run.train));
  write_jsonl(dir / "val.jsonl", to_raw(run.val));
  write_jsonl(dir / "test.jsonl", to_raw(run.test));

  log << "train " << run.train.size() << "  val " << run.val.size() << "  test "
      << run.test.size() << "  vocab " << run.checkpoint.vocab.size() << "  intents "
      << run.checkpoint.labels.size() << '\n';
  if (config.train.embeddings != "random") {
    log << "embedding coverage " << format_double(run.embedding_coverage) << '\n';
  }
  for (const auto& r : run.history) {
    log << "epoch " << r.epoch << "  loss " << format_double(r.train_loss) << "  val_acc "
        << (r.val_accuracy ? format_double(*r.val_accuracy) : "na") << '\n';
  }
  log << "wrote " << (dir / "model.ckpt").string() << '\n';
  return run;
}

EvalReport evaluate_rows(const Checkpoint& checkpoint, const std::vector<RawUtterance>& rows) {
  std::set<std::string> unknown;
  for (const auto& r : rows) {
    if (!checkpoint.labels.find(r.intent)) unknown.insert(r.intent);
  }
  if (!unknown.empty()) {
    std::set<std::string> dataset_labels;
    for (const auto& r : rows) dataset_labels.insert(r.intent);
    std::string only_data, only_model;
    for (const auto& l : unknown) only_data += (only_data.empty() ? "" : ", ") + l;
    for (const auto& l : checkpoint.labels.names()) {
      if (!dataset_labels.count(l)) only_model += (only_model.empty() ? "" : ", ") + l;
    }
    fail(ErrorKind::kData, "label sets differ; only in dataset: {" + only_data +
                               "}; only in model: {" + only_model + "}");
  }

  DatasetSpec spec;
  spec.labels = checkpoint.labels;
  spec.preprocess.lowercase = checkpoint.config.lowercase;
  Dataset data = make_dataset(rows, spec);
  encode_examples(data.examples, checkpoint.vocab);

  const auto predictions = predict(checkpoint.params, data.examples);
  std::vector<ClassId> golds, preds;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    golds.push_back(data.examples[i].intent_id);
    preds.push_back(predictions[i].intent_id);
  }
  EvalReport report =
      metrics(confusion(golds, preds, checkpoint.labels.size(), checkpoint.labels.names()));
  report.metadata["model"] = "san+" + std::string(architecture_name(checkpoint.config.arch));
  report.metadata["seed"] = std::to_string(checkpoint.config.seed);
  report.metadata["config_hash"] = hex64(fnv1a64(to_config_text(checkpoint.config)));
  report.metadata["examples"] = std::to_string(rows.size());
  return report;
}

EvalReport cmd_evaluate(const EvaluateOptions& options, std::ostream& out) {
  require_file(options.checkpoint, "checkpoint");
  require_file(options.dataset, "dataset");
  const Checkpoint checkpoint = load_checkpoint(options.checkpoint);
  EvalReport report = evaluate_rows(checkpoint, read_utterances(options.dataset, options.format));
  report.metadata["dataset"] = options.dataset;

  if (!options.report_prefix.empty()) {
    const std::filesystem::path prefix(options.report_prefix);
    if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());
    write_text(options.report_prefix + ".txt", emit_text(report));
    write_text(options.report_prefix + ".jsonl", emit_json(report) + '\n');
  }
  out << emit_text(report);
  return report;
}

void cmd_predict(const PredictOptions& options, std::ostream& out) {
  require_file(options.checkpoint, "checkpoint");
  const Checkpoint checkpoint = load_checkpoint(options.checkpoint);

  std::vector<std::string> texts = options.texts;
  if (!options.input.empty()) {
    require_file(options.input, "input");
    std::ifstream in(options.input, std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      texts.push_back(line);
    }
  }
  PreprocessOptions pre;
  pre.lowercase = checkpoint.config.lowercase;
  for (const auto& text : texts) {
    const auto tokens = preprocess(text, pre);
    const auto ids = checkpoint.vocab.encode(tokens);
    const Prediction p = predict_one(checkpoint.params, ids);
    out << checkpoint.labels.name(p.intent_id) << '\t' << format_double(p.probs[p.intent_id]);
    if (options.attention) {
      out << '\t';
      for (std::size_t t = 0; t < tokens.size(); ++t) {
        out << (t ? " " : "") << tokens[t] << ':' << format_double(p.attention[t]);
      }
    }
    out << '\n';
  }
}

void cmd_dataset_convert(const std::string& input, DatasetFormat format,
                         const std::string& output, std::ostream& out) {
  require_file(input, "input");
  const auto rows = read_utterances(input, format);
  write_jsonl(output, rows);
  out << "converted " << rows.size() << " utterances to " << output << '\n';
}

void cmd_dataset_synth(std::size_t intents, std::size_t per_intent, std::uint64_t seed,
                       const std::string& output, std::ostream& out) {
  const auto rows = generate_synthetic(intents, per_intent, seed);
  write_jsonl(output, rows);
  out << "wrote " << rows.size() << " utterances (" << intents << " intents x " << per_intent
      << ", seed " << seed << ") to " << output << '\n';
}

void cmd_dataset_stats(const std::string& input, DatasetFormat format, std::ostream& out) {
  require_file(input, "input");
  const auto rows = read_utterances(input, format);
  const auto counts = intent_counts(rows);
  std::size_t width = 14;
  for (const auto& c : counts) width = std::max(width, c.intent.size());

  std::set<std::string> vocabulary;
  for (const auto& r : rows)
    for (auto& t : preprocess(r.text)) vocabulary.insert(std::move(t));

  out << "Type of intent" << std::string(width - 14, ' ') << "  Number\n";
  for (const auto& c : counts) {
    out << c.intent << std::string(width - c.intent.size(), ' ') << "  " << c.count << '\n';
  }
  out << "total " << rows.size() << "  intents " << counts.size() << "  vocabulary "
      << vocabulary.size() << '\n';
}

}  // namespace sanid
