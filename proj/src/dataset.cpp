#include "sanid/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "sanid/error.hpp"
#include "sanid/rng.hpp"

namespace sanid {
namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open dataset file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string location(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

void require_rows(const std::vector<RawUtterance>& rows, const std::filesystem::path& path) {
  if (rows.empty()) fail(ErrorKind::kData, "dataset file " + path.string() + " has no utterances");
}

// RFC 4180 records: quoted fields may contain commas, doubled quotes and
// newlines. Each record remembers the line it started on.
struct CsvRecord {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

std::vector<CsvRecord> parse_csv(const std::string& text, const std::filesystem::path& path) {
  std::vector<CsvRecord> records;
  CsvRecord current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = current.fields.size() == 1 && current.fields[0].empty();
    if (!blank) records.push_back(std::move(current));
    current = CsvRecord{};
    current.line = line;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r') {
      continue;
    } else if (c == '\n') {
      ++line;
      end_record();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (in_quotes) fail(ErrorKind::kData, location(path, current.line) + ": unterminated quoted field");
  if (field_started || !current.fields.empty()) end_record();
  return records;
}

}  // namespace

std::string_view dataset_format_name(DatasetFormat format) noexcept {
  switch (format) {
    case DatasetFormat::kJsonl: return "jsonl";
    case DatasetFormat::kCsv: return "csv";
    case DatasetFormat::kSnipsNested: return "snips-nested";
  }
  return "jsonl";
}

DatasetFormat parse_dataset_format(std::string_view name) {
  if (name == "jsonl") return DatasetFormat::kJsonl;
  if (name == "csv") return DatasetFormat::kCsv;
  if (name == "snips-nested" || name == "snips") return DatasetFormat::kSnipsNested;
  fail(ErrorKind::kConfig, "unknown dataset format '" + std::string(name) +
                               "' (expected jsonl, csv or snips-nested)");
}

SplitRatios SplitRatios::nested(double test, double val_of_train) {
  const double rest = 1.0 - test;
  return {rest * (1.0 - val_of_train), rest * val_of_train, test};
}

void SplitRatios::validate() const {
  if (train < 0 || val < 0 || test < 0) fail(ErrorKind::kConfig, "split ratios must be non-negative");
  if (std::abs(train + val + test - 1.0) > 1e-9) {
    fail(ErrorKind::kConfig, "split ratios must sum to 1");
  }
}

std::vector<RawUtterance> read_jsonl(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<RawUtterance> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(ErrorKind::kData, location(path, number) + ": invalid JSON: " + e.what());
    }
    if (!obj.is_object() || !obj.contains("text") || !obj["text"].is_string() ||
        !obj.contains("intent") || !obj["intent"].is_string()) {
      fail(ErrorKind::kData, location(path, number) +
                                 ": expected an object with string fields text and intent");
    }
    rows.push_back({obj["text"].get<std::string>(), obj["intent"].get<std::string>()});
  }
  require_rows(rows, path);
  return rows;
}

std::vector<RawUtterance> read_csv(const std::filesystem::path& path) {
  const auto records = parse_csv(read_file(path), path);
  if (records.empty()) fail(ErrorKind::kData, "dataset file " + path.string() + " is empty");
  const auto& header = records.front().fields;
  const auto text_col = std::find(header.begin(), header.end(), "text") - header.begin();
  const auto intent_col = std::find(header.begin(), header.end(), "intent") - header.begin();
  if (text_col == static_cast<std::ptrdiff_t>(header.size()) ||
      intent_col == static_cast<std::ptrdiff_t>(header.size())) {
    fail(ErrorKind::kData, location(path, 1) + ": header must name columns text and intent");
  }
  std::vector<RawUtterance> rows;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size()) {
      fail(ErrorKind::kData, location(path, rec.line) + ": expected " +
                                 std::to_string(header.size()) + " fields, found " +
                                 std::to_string(rec.fields.size()));
    }
    rows.push_back({rec.fields[static_cast<std::size_t>(text_col)],
                    rec.fields[static_cast<std::size_t>(intent_col)]});
  }
  require_rows(rows, path);
  return rows;
}

std::vector<RawUtterance> read_snips_nested(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    fail(ErrorKind::kData, "dataset file " + path.string() + " is empty");
  }
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kData, path.string() + ": invalid JSON at byte " +
                               std::to_string(e.byte) + ": " + e.what());
  }
  if (!root.is_object()) fail(ErrorKind::kData, path.string() + ": top level must be an object");

  std::vector<RawUtterance> rows;
  for (const auto& [intent, utterances] : root.items()) {
    if (!utterances.is_array()) {
      fail(ErrorKind::kData, path.string() + ": intent " + intent + " must map to an array");
    }
    std::size_t index = 0;
    for (const auto& utterance : utterances) {
      const std::string where = path.string() + ": " + intent + "[" + std::to_string(index++) + "]";
      if (!utterance.is_object() || !utterance.contains("data") || !utterance["data"].is_array()) {
        fail(ErrorKind::kData, where + ": expected an object with a data array");
      }
      std::string joined;
      for (const auto& chunk : utterance["data"]) {
        if (!chunk.is_object() || !chunk.contains("text") || !chunk["text"].is_string()) {
          fail(ErrorKind::kData, where + ": chunk without a text string");
        }
        joined += chunk["text"].get<std::string>();
      }
      rows.push_back({joined, intent});
    }
  }
  require_rows(rows, path);
  return rows;
}

std::vector<RawUtterance> read_utterances(const std::filesystem::path& path,
                                          DatasetFormat format) {
  switch (format) {
    case DatasetFormat::kJsonl: return read_jsonl(path);
    case DatasetFormat::kCsv: return read_csv(path);
    case DatasetFormat::kSnipsNested: return read_snips_nested(path);
  }
  return {};
}

void write_jsonl(std::ostream& out, std::span<const RawUtterance> rows) {
  for (const auto& row : rows) {
    json obj;
    obj["text"] = row.text;
    obj["intent"] = row.intent;
    out << obj.dump() << '\n';
  }
}

void write_jsonl(const std::filesystem::path& path, std::span<const RawUtterance> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  write_jsonl(out, rows);
  if (!out) fail(ErrorKind::kIo, "failed writing " + path.string());
}

Dataset make_dataset(std::span<const RawUtterance> rows, const DatasetSpec& spec) {
  Dataset ds;
  if (spec.labels.size() > 0) {
    ds.labels = spec.labels;
  } else {
    std::vector<std::string> names;
    for (const auto& r : rows) names.push_back(r.intent);
    ds.labels = LabelSet::from_names(std::move(names));
  }
  ds.examples.reserve(rows.size());
  for (const auto& r : rows) {
    const auto id = ds.labels.find(r.intent);
    if (!id) {
      fail(ErrorKind::kData, "intent '" + r.intent + "' is not in the label set of " +
                                 std::to_string(ds.labels.size()) + " intents");
    }
    Example ex;
    ex.text = r.text;
    ex.tokens = preprocess(r.text, spec.preprocess);
    ex.intent_id = *id;
    ex.intent_name = r.intent;
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

Dataset load_dataset(const DatasetSpec& spec, const std::filesystem::path& path) {
  const auto rows = read_utterances(path, spec.format);
  return make_dataset(rows, spec);
}

Vocab build_vocab(std::span<const Example> examples) {
  Vocab vocab;
  for (const auto& ex : examples)
    for (const auto& t : ex.tokens) vocab.add(t);
  return vocab;
}

void encode_examples(std::vector<Example>& examples, const Vocab& vocab) {
  for (auto& ex : examples) ex.token_ids = vocab.encode(ex.tokens);
}

std::vector<RawUtterance> to_raw(std::span<const Example> examples) {
  std::vector<RawUtterance> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back({ex.text, ex.intent_name});
  return out;
}

SplitResult split(std::span<const Example> examples, const SplitRatios& ratios,
                  std::uint64_t seed) {
  ratios.validate();
  std::map<ClassId, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < examples.size(); ++i) by_class[examples[i].intent_id].push_back(i);

  const std::size_t needed = (ratios.train > 0) + (ratios.val > 0) + (ratios.test > 0);
  SplitResult out;
  std::vector<int> assignment(examples.size(), 0);  // 0 train, 1 val, 2 test
  Rng rng(seed);
  for (auto& [cls, members] : by_class) {
    const std::size_t n = members.size();
    if (n < needed) {
      out.warnings.push_back("intent '" + examples[members.front()].intent_name + "' has " +
                             std::to_string(n) + " examples, fewer than the " +
                             std::to_string(needed) + " splits; assigned train first");
    }
    auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratios.test));
    auto n_val = static_cast<std::size_t>(std::llround(static_cast<double>(n) * ratios.val));
    n_test = std::min(n_test, n);
    n_val = std::min(n_val, n - n_test);
    if (n < needed) {
      // Best effort: the first example always trains.
      n_test = std::min(n_test, n > 0 ? n - 1 : 0);
      n_val = std::min(n_val, n - n_test > 0 ? n - n_test - 1 : 0);
    }
    rng.shuffle(members);
    for (std::size_t j = 0; j < n; ++j) {
      assignment[members[j]] = j < n_test ? 2 : (j < n_test + n_val ? 1 : 0);
    }
  }
  for (std::size_t i = 0; i < examples.size(); ++i) {
    switch (assignment[i]) {
      case 0: out.train.push_back(examples[i]); break;
      case 1: out.val.push_back(examples[i]); break;
      default: out.test.push_back(examples[i]); break;
    }
  }
  return out;
}

std::vector<Batch> make_batches(std::span<const Example> examples, std::size_t batch_size,
                                bool shuffle, std::uint64_t seed) {
  if (batch_size == 0) fail(ErrorKind::kPrecondition, "batch_size must be at least 1");
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  if (shuffle) {
    Rng rng(seed);
    rng.shuffle(order);
  }
  std::vector<Batch> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(order.size(), start + batch_size);
    Batch b;
    b.size = end - start;
    for (std::size_t i = start; i < end; ++i) {
      const auto& ex = examples[order[i]];
      if (ex.token_ids.empty()) {
        fail(ErrorKind::kData, "example '" + ex.text + "' has not been encoded");
      }
      b.max_length = std::max(b.max_length, ex.token_ids.size());
    }
    b.ids.assign(b.size * b.max_length, kPadId);
    b.mask.assign(b.size * b.max_length, 0);
    for (std::size_t r = 0; r < b.size; ++r) {
      const auto& ex = examples[order[start + r]];
      std::copy(ex.token_ids.begin(), ex.token_ids.end(), b.ids.begin() + static_cast<std::ptrdiff_t>(r * b.max_length));
      std::fill_n(b.mask.begin() + static_cast<std::ptrdiff_t>(r * b.max_length), ex.token_ids.size(), 1);
      b.labels.push_back(ex.intent_id);
    }
    batches.push_back(std::move(b));
  }
  return batches;
}

std::vector<IntentCount> intent_counts(std::span<const RawUtterance> rows) {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : rows) ++counts[r.intent];
  std::vector<IntentCount> out;
  for (const auto& [name, n] : counts) out.push_back({name, n});
  std::stable_sort(out.begin(), out.end(),
                   [](const IntentCount& a, const IntentCount& b) { return a.count > b.count; });
  return out;
}

}  // namespace sanid
