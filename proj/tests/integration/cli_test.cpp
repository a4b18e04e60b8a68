#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "harness.hpp"
#include "sanid/evaluation.hpp"
#include "sanid/synthetic.hpp"

namespace sanid {
namespace {

namespace fs = std::filesystem;
using testing_support::CommandResult;
using testing_support::read_file;
using testing_support::run_cli;
using testing_support::ScratchDir;
using testing_support::synthetic_corpus;
using testing_support::write_file;

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::vector<std::string> fields_of(const std::string& line, char sep = '\t') {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string f;
  while (std::getline(in, f, sep)) out.push_back(f);
  return out;
}

// One default-configuration training run on the synthetic corpus, shared by
// every test in this file.
class TrainedModel : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new ScratchDir("cli_run");
    result_ = new CommandResult(run_cli({"train", "--dataset", synthetic_corpus().string(),
                                         "--output-dir", (dir_->path() / "run").string()}));
  }
  static void TearDownTestSuite() {
    delete result_;
    delete dir_;
  }
  void SetUp() override { ASSERT_EQ(result_->exit_code, 0) << result_->err; }

  static fs::path run_dir() { return dir_->path() / "run"; }
  static std::string checkpoint() { return (run_dir() / "model.ckpt").string(); }

  static ScratchDir* dir_;
  static CommandResult* result_;
};

ScratchDir* TrainedModel::dir_ = nullptr;
CommandResult* TrainedModel::result_ = nullptr;

TEST_F(TrainedModel, TrainWritesEveryArtifact) {
  for (const char* f : {"model.ckpt", "history.tsv", "resolved.cfg", "train.jsonl", "val.jsonl",
                        "test.jsonl"})
    EXPECT_TRUE(fs::exists(run_dir() / f)) << f;
  const auto history = lines_of(read_file(run_dir() / "history.tsv"));
  ASSERT_EQ(history.size(), 26u);
  EXPECT_EQ(history[0], "epoch\tsteps\ttrain_loss\tval_accuracy");
  // 486 training examples in batches of 16
  EXPECT_EQ(fields_of(history[1])[1], "31");
  EXPECT_EQ(fields_of(history[25])[1], "775");
  EXPECT_NE(result_->out.find("train 486  val 54  test 60"), std::string::npos) << result_->out;
  EXPECT_LT(std::stod(fields_of(history[25])[2]), std::stod(fields_of(history[1])[2]));
}

TEST_F(TrainedModel, EvaluateReachesHighAccuracy) {
  ScratchDir out("cli_eval");
  const auto r = run_cli({"evaluate", "--checkpoint", checkpoint(), "--dataset",
                          (run_dir() / "test.jsonl").string(), "--report",
                          (out.path() / "report").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("Acc(%) "), std::string::npos);
  const auto report = parse_json_report(read_file(out.path() / "report.jsonl"));
  EXPECT_GE(report.accuracy, 0.95);
  EXPECT_EQ(report.confusion.total(), 60u);
  EXPECT_EQ(report.metadata.at("model"), "san+bilstm");
  EXPECT_EQ(read_file(out.path() / "report.txt"), r.out);
}

TEST_F(TrainedModel, RepeatedEvaluationIsByteIdentical) {
  ScratchDir out("cli_eval_repeat");
  const std::string data = (run_dir() / "test.jsonl").string();
  for (const char* prefix : {"a", "b"}) {
    const auto r = run_cli({"evaluate", "--checkpoint", checkpoint(), "--dataset", data,
                            "--report", (out.path() / prefix).string()});
    ASSERT_EQ(r.exit_code, 0) << r.err;
  }
  EXPECT_EQ(read_file(out.path() / "a.txt"), read_file(out.path() / "b.txt"));
  EXPECT_EQ(read_file(out.path() / "a.jsonl"), read_file(out.path() / "b.jsonl"));
}

TEST_F(TrainedModel, EvaluateRejectsForeignLabels) {
  ScratchDir dir("cli_foreign");
  write_file(dir / "x.jsonl", "{\"text\":\"play a song\",\"intent\":\"PlayMusic\"}\n");
  const auto r = run_cli({"evaluate", "--checkpoint", checkpoint(), "--dataset",
                          (dir / "x.jsonl").string()});
  EXPECT_EQ(r.exit_code, 4);
  EXPECT_NE(r.err.find("PlayMusic"), std::string::npos) << r.err;
}

TEST_F(TrainedModel, PredictKeywordUtterance) {
  const auto r = run_cli({"predict", "--checkpoint", checkpoint(), "--text",
                          "please switch off the lights in the kitchen"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto f = fields_of(lines_of(r.out).at(0));
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0], "SwitchLightOff");
  EXPECT_GT(std::stod(f[1]), 0.5);
}

TEST_F(TrainedModel, PredictAttentionWeightsSumToOne) {
  const auto r = run_cli({"predict", "--checkpoint", checkpoint(), "--attention", "--text",
                          "make the bedroom lamp brighter"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto f = fields_of(lines_of(r.out).at(0));
  ASSERT_EQ(f.size(), 3u);
  const auto pairs = fields_of(f[2], ' ');
  ASSERT_EQ(pairs.size(), 5u);
  double sum = 0.0;
  for (const auto& p : pairs) {
    const double w = std::stod(p.substr(p.rfind(':') + 1));
    EXPECT_GE(w, 0.0);
    sum += w;
  }
  EXPECT_NEAR(sum, 1.0, 1e-9);
  EXPECT_EQ(pairs[0].substr(0, 5), "make:");
}

TEST_F(TrainedModel, PredictFileKeepsOrder) {
  ScratchDir dir("cli_predict");
  const auto rows = generate_synthetic(6, 17, 99);  // 102 rows
  std::string file;
  std::vector<std::string> args{"predict", "--checkpoint", checkpoint()};
  for (std::size_t i = 0; i < 100; ++i) {
    file += rows[i].text + "\n";
    args.push_back("--text");
    args.push_back(rows[i].text);
  }
  write_file(dir / "in.txt", file);
  const auto from_file =
      run_cli({"predict", "--checkpoint", checkpoint(), "--input", (dir / "in.txt").string()});
  const auto from_args = run_cli(args);
  ASSERT_EQ(from_file.exit_code, 0) << from_file.err;
  EXPECT_EQ(lines_of(from_file.out).size(), 100u);
  EXPECT_EQ(from_file.out, from_args.out);
  std::size_t agree = 0;
  const auto lines = lines_of(from_file.out);
  for (std::size_t i = 0; i < 100; ++i) agree += fields_of(lines[i])[0] == rows[i].intent;
  EXPECT_GE(agree, 95u);
}

TEST_F(TrainedModel, PredictWithoutInputIsUsageError) {
  const auto r = run_cli({"predict", "--checkpoint", checkpoint()});
  EXPECT_EQ(r.exit_code, 11);
  EXPECT_NE(r.err.find("error[E_"), std::string::npos);
}

TEST_F(TrainedModel, DamagedCheckpointIsRejected) {
  ScratchDir dir("cli_damaged");
  std::string bytes = read_file(checkpoint());
  write_file(dir / "half.ckpt", bytes.substr(0, bytes.size() / 2));
  const auto r = run_cli({"predict", "--checkpoint", (dir / "half.ckpt").string(), "--text", "hi"});
  EXPECT_EQ(r.exit_code, 6);
  EXPECT_NE(r.err.find("corrupt"), std::string::npos) << r.err;
}

// ------------------------------------------------------------- train errors

TEST(CliTrainTest, MissingDatasetNamesThePath) {
  ScratchDir dir("cli_missing");
  const std::string missing = (dir / "nope.jsonl").string();
  const auto r = run_cli({"train", "--dataset", missing, "--output-dir", (dir / "out").string()});
  EXPECT_NE(r.exit_code, 0);
  EXPECT_EQ(r.exit_code, 5);
  EXPECT_NE(r.err.find(missing), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "out" / "model.ckpt"));
}

TEST(CliTrainTest, OneEpochGivesOneHistoryRow) {
  ScratchDir dir("cli_one_epoch");
  const auto r = run_cli({"train", "--dataset", synthetic_corpus().string(), "--epochs", "1",
                          "--embedding-dim", "16", "--hidden-units", "8", "--arch", "lstm",
                          "--output-dir", dir.path().string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(lines_of(read_file(dir / "history.tsv")).size(), 2u);
  const std::string cfg = read_file(dir / "resolved.cfg");
  EXPECT_NE(cfg.find("arch = lstm"), std::string::npos) << cfg;
  EXPECT_NE(cfg.find("epochs = 1"), std::string::npos);
}

TEST(CliTrainTest, ConfigFileWithFlagOverride) {
  ScratchDir dir("cli_config");
  write_file(dir / "run.cfg", "dataset = " + synthetic_corpus().string() +
                                  "\nepochs = 5\nembedding_dim = 8\nhidden_units = 4\n"
                                  "output_dir = " + (dir / "out").string() + "\n");
  const auto r = run_cli({"train", "--config", (dir / "run.cfg").string(), "--epochs", "2"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(lines_of(read_file(dir / "out" / "history.tsv")).size(), 3u);
}

TEST(CliTrainTest, BadArgumentsAndConfigs) {
  EXPECT_EQ(run_cli({"train", "--no-such-flag"}).exit_code, 2);
  EXPECT_EQ(run_cli({}).exit_code, 2);
  ScratchDir dir("cli_badcfg");
  write_file(dir / "bad.cfg", "learnig_rate = 0.1\n");
  const auto r = run_cli({"train", "--config", (dir / "bad.cfg").string()});
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.err.find("error[E_CONFIG]"), std::string::npos) << r.err;
  EXPECT_EQ(run_cli({"train", "--dataset", synthetic_corpus().string(), "--arch", "gru"}).exit_code,
            3);
}

// ------------------------------------------------------------------ dataset

TEST(CliDatasetTest, SynthReproducesCommittedCorpus) {
  ScratchDir dir("cli_synth");
  const auto r = run_cli({"dataset", "synth", "--intents", "6", "--per-intent", "100", "--output",
                          (dir / "s.jsonl").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(read_file(dir / "s.jsonl"), read_file(synthetic_corpus()));
}

TEST(CliDatasetTest, StatsOfCommittedCorpus) {
  const auto r = run_cli({"dataset", "stats", "--input", synthetic_corpus().string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto lines = lines_of(r.out);
  ASSERT_EQ(lines.size(), 8u);
  EXPECT_EQ(lines[0].rfind("Type of intent", 0), 0u);
  EXPECT_EQ(lines[7].rfind("total 600  intents 6  vocabulary ", 0), 0u);
}

TEST(CliDatasetTest, ConvertThenStatsKeepsCounts) {
  ScratchDir dir("cli_convert");
  write_file(dir / "in.csv",
             "text,intent\n\"Play Beyonce, now\",PlayMusic\nskip this song,NextSong\n"
             "play jazz,PlayMusic\n");
  write_file(dir / "in.json",
             R"({"PlayMusic": [{"data": [{"text": "Play "}, {"text": "Beyonce", "entity": "a"}]},
                               {"data": [{"text": "play jazz"}]}],
                 "NextSong": [{"data": [{"text": "skip this song"}]}]})");
  for (const auto& [file, format] : {std::pair{"in.csv", "csv"}, std::pair{"in.json", "snips-nested"}}) {
    const std::string out = (dir / (std::string(file) + ".jsonl")).string();
    const auto c = run_cli({"dataset", "convert", "--input", (dir / file).string(), "--format",
                            format, "--output", out});
    ASSERT_EQ(c.exit_code, 0) << c.err;
    const auto before = run_cli({"dataset", "stats", "--input", (dir / file).string(), "--format", format});
    const auto after = run_cli({"dataset", "stats", "--input", out});
    EXPECT_EQ(before.out, after.out);
    EXPECT_NE(after.out.find("PlayMusic       2"), std::string::npos) << after.out;
  }
}

TEST(CliDatasetTest, EmptyInputIsDataError) {
  ScratchDir dir("cli_empty");
  write_file(dir / "e.jsonl", "");
  EXPECT_EQ(run_cli({"dataset", "stats", "--input", (dir / "e.jsonl").string()}).exit_code, 4);
}

}  // namespace
}  // namespace sanid
