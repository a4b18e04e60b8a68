// sanid: train, evaluate and query self-attention intent classifiers.
//
// Exit codes: 0 success, 1 unexpected failure, 2 bad command line,
// otherwise sanid::exit_code() of the error kind (3 config, 4 data, 5 I/O,
// 6 checkpoint, 7 numeric, 8 index, 9 dimension, 10 precondition, 11 usage).

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sanid/commands.hpp"
#include "sanid/error.hpp"
#include "sanid/synthetic.hpp"

namespace {

int report(const sanid::Error& e) {
  std::cerr << "error[" << sanid::error_code(e.kind()) << "]: " << e.what() << '\n';
  return sanid::exit_code(e.kind());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-attention + (Bi-)LSTM intent detection"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "train a model from a key = value config");
  std::string config_path;
  train->add_option("--config", config_path, "config file (relative paths also searched in $" +
                                                 std::string(sanid::kConfigDirEnv) + ")");
  std::map<std::string, std::string> overrides;
  for (const auto& key : sanid::config_keys()) {
    train->add_option(sanid::key_to_flag(key.name), overrides[std::string(key.name)],
                      std::string(key.help));
  }

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "score a checkpoint on a labelled dataset");
  sanid::EvaluateOptions eval_opts;
  std::string eval_format = "jsonl";
  evaluate->add_option("--checkpoint", eval_opts.checkpoint)->required();
  evaluate->add_option("--dataset", eval_opts.dataset)->required();
  evaluate->add_option("--format", eval_format, "jsonl | csv | snips-nested");
  evaluate->add_option("--report", eval_opts.report_prefix,
                       "write <prefix>.txt and <prefix>.jsonl");

  // predict
  auto* predict = app.add_subcommand("predict", "classify utterances");
  sanid::PredictOptions predict_opts;
  predict->add_option("--checkpoint", predict_opts.checkpoint)->required();
  predict->add_option("--text", predict_opts.texts, "utterance (repeatable)");
  predict->add_option("--input", predict_opts.input, "file with one utterance per line");
  predict->add_flag("--attention", predict_opts.attention, "print per-token attention weights");

  // dataset
  auto* dataset = app.add_subcommand("dataset", "dataset utilities");
  dataset->require_subcommand(1);
  std::string input, output, format = "jsonl";
  auto* convert = dataset->add_subcommand("convert", "convert csv / snips-nested to jsonl");
  convert->add_option("--input", input)->required();
  convert->add_option("--format", format, "source format");
  convert->add_option("--output", output)->required();

  std::size_t intents = 6, per_intent = 100;
  std::uint64_t synth_seed = sanid::kSyntheticSeed;
  auto* synth = dataset->add_subcommand("synth", "generate the templated synthetic corpus");
  synth->add_option("--intents", intents);
  synth->add_option("--per-intent", per_intent);
  synth->add_option("--seed", synth_seed);
  synth->add_option("--output", output)->required();

  auto* stats = dataset->add_subcommand("stats", "per-intent counts");
  stats->add_option("--input", input)->required();
  stats->add_option("--format", format, "source format");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*train) {
      sanid::ConfigEntries entries;
      if (!config_path.empty()) {
        entries = sanid::read_config_file(sanid::locate_config(config_path).string());
      }
      for (const auto& key : sanid::config_keys()) {
        const std::string name(key.name);
        if (train->count(sanid::key_to_flag(key.name)) > 0) {
          entries.emplace_back(name, overrides[name]);
        }
      }
      sanid::cmd_train(sanid::resolve_config(entries), std::cout);
    } else if (*evaluate) {
      eval_opts.format = sanid::parse_dataset_format(eval_format);
      sanid::cmd_evaluate(eval_opts, std::cout);
    } else if (*predict) {
      if (predict_opts.texts.empty() && predict_opts.input.empty()) {
        throw sanid::Error(sanid::ErrorKind::kUsage, "predict needs --text or --input");
      }
      sanid::cmd_predict(predict_opts, std::cout);
    } else if (*convert) {
      sanid::cmd_dataset_convert(input, sanid::parse_dataset_format(format), output, std::cout);
    } else if (*synth) {
      sanid::cmd_dataset_synth(intents, per_intent, synth_seed, output, std::cout);
    } else if (*stats) {
      sanid::cmd_dataset_stats(input, sanid::parse_dataset_format(format), std::cout);
    }
  } catch (const sanid::Error& e) {
    return report(e);
  } catch (const std::exception& e) {
    std::cerr << "error[E_INTERNAL]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
