#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "sanid/commands.hpp"
#include "sanid/config.hpp"
#include "sanid/error.hpp"

namespace sanid {
namespace {

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

TEST(ConfigTest, DefaultHyperparameters) {
  const TrainConfig c;
  EXPECT_EQ(c.learning_rate, 0.001);
  EXPECT_EQ(c.beta1, 0.9);
  EXPECT_EQ(c.beta2, 0.999);
  EXPECT_EQ(c.epsilon, 1e-8);
  EXPECT_EQ(c.batch_size, 16u);
  EXPECT_EQ(c.epochs, 25u);
  EXPECT_EQ(c.l2_gamma, 0.01);
  EXPECT_EQ(c.hidden_units, 64u);
  EXPECT_EQ(c.embedding_dim, 300u);
  EXPECT_EQ(c.arch, Architecture::kSanBiLstm);
  EXPECT_EQ(c.reduction, LossReduction::kSum);

  const RunConfig r = resolve_config({});
  EXPECT_EQ(r.test_ratio, 0.1);
  EXPECT_EQ(r.val_ratio, 0.1);
  EXPECT_EQ(r.train.learning_rate, 0.001);
}

TEST(ConfigTest, ParsesKeyValueLines) {
  const auto entries = parse_config_text(
      "# comment\n"
      "learning_rate = 0.005\n"
      "\n"
      "arch=lstm   # trailing\n"
      "epochs = 3\n"
      "freeze_embeddings = true\n"
      "dataset = data/x.jsonl\n",
      "test.cfg");
  const RunConfig r = resolve_config(entries);
  EXPECT_EQ(r.train.learning_rate, 0.005);
  EXPECT_EQ(r.train.arch, Architecture::kSanLstm);
  EXPECT_EQ(r.train.epochs, 3u);
  EXPECT_EQ(r.train.freeze_embeddings, true);
  EXPECT_EQ(r.dataset, "data/x.jsonl");
}

TEST(ConfigTest, UnknownKeyIsRejectedWithLocation) {
  const auto msg = message_of([] { parse_config_text("epochs = 2\nlearnig_rate = 1\n", "a.cfg"); });
  EXPECT_NE(msg.find("learnig_rate"), std::string::npos) << msg;
  EXPECT_NE(msg.find("a.cfg:2"), std::string::npos) << msg;
}

TEST(ConfigTest, RepeatedKeyIsRejected) {
  EXPECT_THROW(parse_config_text("epochs = 2\nepochs = 3\n", "a.cfg"), Error);
}

TEST(ConfigTest, BadValuesAreConfigErrors) {
  for (const char* text : {"epochs = many", "arch = gru", "lowercase = maybe",
                           "loss_reduction = max", "batch_size = -4", "test_ratio = 1.5"}) {
    try {
      resolve_config(parse_config_text(text, "x"));
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kConfig) << text;
    }
  }
}

TEST(ConfigTest, LaterEntriesWin) {
  const RunConfig r = resolve_config({{"epochs", "3"}, {"epochs", "7"}});
  EXPECT_EQ(r.train.epochs, 7u);
}

TEST(ConfigTest, FlagsMirrorKeys) {
  EXPECT_EQ(key_to_flag("learning_rate"), "--learning-rate");
  EXPECT_EQ(key_to_flag("l2_gamma"), "--l2-gamma");
  EXPECT_EQ(key_to_flag("arch"), "--arch");
  bool has_gamma = false;
  for (const auto& k : config_keys()) has_gamma |= k.name == "l2_gamma";
  EXPECT_TRUE(has_gamma);
}

TEST(ConfigTest, TextRoundTrip) {
  RunConfig r;
  r.train.learning_rate = 0.1 + 0.2;  // needs all 17 digits
  r.train.l2_gamma = 1e-5;
  r.train.seed = 18446744073709551615ULL;
  r.train.arch = Architecture::kSanLstm;
  r.train.freeze_embeddings = false;
  r.train.reduction = LossReduction::kMean;
  r.dataset = "some dir/data.csv";
  r.dataset_format = DatasetFormat::kCsv;
  r.val_ratio = 0.25;
  const std::string text = to_config_text(r);
  const RunConfig back = resolve_config(parse_config_text(text, "roundtrip"));
  EXPECT_EQ(to_config_text(back), text);
  EXPECT_EQ(back.train.learning_rate, 0.1 + 0.2);
  EXPECT_EQ(back.train.seed, r.train.seed);
  EXPECT_EQ(back.dataset, "some dir/data.csv");
  EXPECT_EQ(back.train.freeze_embeddings, false);

  const TrainConfig t = resolve_train_config(parse_config_text(to_config_text(r.train), "t"));
  EXPECT_EQ(to_config_text(t), to_config_text(r.train));
}

TEST(ConfigTest, FormatDoubleIsShortest) {
  EXPECT_EQ(format_double(0.001), "0.001");
  EXPECT_EQ(format_double(1e-8), "1e-08");
  EXPECT_EQ(std::stod(format_double(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(ConfigTest, ConfigDirectoryFromEnvironment) {
  const auto dir = std::filesystem::temp_directory_path() / "sanid_config_dir_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "mine.cfg") << "epochs = 4\n";
  ::setenv(kConfigDirEnv, dir.c_str(), 1);
  const auto found = locate_config("mine.cfg");
  EXPECT_EQ(found, dir / "mine.cfg");
  EXPECT_EQ(resolve_config(read_config_file(found.string())).train.epochs, 4u);
  ::unsetenv(kConfigDirEnv);
  EXPECT_EQ(locate_config("mine.cfg"), std::filesystem::path("mine.cfg"));
  std::filesystem::remove_all(dir);
  EXPECT_THROW(read_config_file("/nonexistent/x.cfg"), Error);
}

}  // namespace
}  // namespace sanid
