#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sanid/layers.hpp"
#include "sanid/text.hpp"
#include "sanid/vocab.hpp"

namespace sanid {

using ClassId = std::uint32_t;

enum class DatasetFormat { kJsonl, kCsv, kSnipsNested };

std::string_view dataset_format_name(DatasetFormat format) noexcept;
DatasetFormat parse_dataset_format(std::string_view name);

// One labelled utterance as stored on disk.
struct RawUtterance {
  std::string text;
  std::string intent;

  friend bool operator==(const RawUtterance&, const RawUtterance&) = default;
};

struct Example {
  std::string text;
  std::vector<std::string> tokens;
  std::vector<TokenId> token_ids;  // empty until encode_examples()
  ClassId intent_id = 0;
  std::string intent_name;
};

// Train/validation/test fractions; must sum to 1.
struct SplitRatios {
  double train = 0.81;
  double val = 0.09;
  double test = 0.10;

  // Holds out `test` of the data, then `val` of what remains for validation.
  static SplitRatios nested(double test, double val_of_train);
  void validate() const;
};

struct DatasetSpec {
  std::string name;
  DatasetFormat format = DatasetFormat::kJsonl;
  // When non-empty, intents must come from this set; otherwise the sorted
  // set of intents found in the file is used.
  LabelSet labels;
  SplitRatios ratios;
  std::uint64_t seed = 0;
  PreprocessOptions preprocess;
};

struct Dataset {
  std::vector<Example> examples;
  LabelSet labels;
};

// Format adapters. Every reader raises kData with a location on malformed
// input and on an empty file, and kIo when the file cannot be opened.
std::vector<RawUtterance> read_jsonl(const std::filesystem::path& path);
std::vector<RawUtterance> read_csv(const std::filesystem::path& path);
// Snips benchmark layout: {"Intent": [{"data": [{"text": ...}, ...]}, ...]};
// chunk texts are concatenated, entity annotations dropped.
std::vector<RawUtterance> read_snips_nested(const std::filesystem::path& path);
std::vector<RawUtterance> read_utterances(const std::filesystem::path& path,
                                          DatasetFormat format);

void write_jsonl(std::ostream& out, std::span<const RawUtterance> rows);
void write_jsonl(const std::filesystem::path& path, std::span<const RawUtterance> rows);

Dataset make_dataset(std::span<const RawUtterance> rows, const DatasetSpec& spec);
Dataset load_dataset(const DatasetSpec& spec, const std::filesystem::path& path);

Vocab build_vocab(std::span<const Example> examples);
// Fills token_ids; tokens missing from the vocabulary map to UNK.
void encode_examples(std::vector<Example>& examples, const Vocab& vocab);

std::vector<RawUtterance> to_raw(std::span<const Example> examples);

struct SplitResult {
  std::vector<Example> train;
  std::vector<Example> val;
  std::vector<Example> test;
  std::vector<std::string> warnings;
};

// Stratified by intent. Per class with n examples, round(n * test) go to
// test and round(n * val) to validation (never more than n in total); the
// rest train. Members are drawn by a seeded shuffle and every split keeps the
// input order. Classes too small to reach every split produce a warning.
SplitResult split(std::span<const Example> examples, const SplitRatios& ratios,
                  std::uint64_t seed);

struct Batch {
  std::size_t size = 0;
  std::size_t max_length = 0;
  std::vector<TokenId> ids;  // [size x max_length], PAD filled
  Mask mask;                 // [size x max_length]
  std::vector<ClassId> labels;

  std::span<const TokenId> row_ids(std::size_t b) const {
    return std::span<const TokenId>(ids).subspan(b * max_length, max_length);
  }
  std::span<const std::uint8_t> row_mask(std::size_t b) const {
    return std::span<const std::uint8_t>(mask).subspan(b * max_length, max_length);
  }
};

// Consecutive batches of `batch_size` (last may be short), each padded to
// its own longest utterance. With shuffle the order is a seeded permutation.
std::vector<Batch> make_batches(std::span<const Example> examples, std::size_t batch_size,
                                bool shuffle, std::uint64_t seed);

struct IntentCount {
  std::string intent;
  std::size_t count = 0;
};

// Counts in descending order, ties by name.
std::vector<IntentCount> intent_counts(std::span<const RawUtterance> rows);

}  // namespace sanid
