#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sanid/dataset.hpp"
#include "sanid/model.hpp"

namespace sanid {

struct Prediction {
  ClassId intent_id = 0;
  std::vector<double> probs;
  std::vector<double> attention;  // one weight per token of the utterance
};

// Argmax over class probabilities; ties go to the lowest class id.
Prediction predict_one(const ModelParams& params, std::span<const TokenId> ids);
std::vector<Prediction> predict(const ModelParams& params, std::span<const Example> examples);

// Rows are gold intents, columns predicted intents.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<std::string> labels);

  std::size_t classes() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::uint64_t at(std::size_t gold, std::size_t pred) const { return counts_[gold * classes() + pred]; }
  void add(std::size_t gold, std::size_t pred, std::uint64_t n = 1);
  std::uint64_t total() const noexcept;
  std::uint64_t row_sum(std::size_t gold) const;
  std::uint64_t col_sum(std::size_t pred) const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::uint64_t> counts_;
};

// Labels default to "0", "1", ... when not given.
ConfusionMatrix confusion(std::span<const ClassId> golds, std::span<const ClassId> preds,
                          std::size_t classes, std::vector<std::string> labels = {});

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

struct EvalReport {
  double accuracy = 0.0;
  std::vector<ClassMetrics> per_class;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double overall_f1 = 0.0;  // (micro_f1 + macro_f1) / 2
  ConfusionMatrix confusion;
  std::map<std::string, std::string> metadata;  // dataset, model, seed, config hash

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

bool operator==(const ClassMetrics& a, const ClassMetrics& b);

// Precision/recall with a zero denominator are 0, and so is F1 when both
// are 0. Micro F1 pools TP/FP/FN over classes.
EvalReport metrics(const ConfusionMatrix& cm);

// Human-readable: a one-line summary (accuracy as a percentage
// with one decimal, F1 with two), per-class scores, then the confusion grid.
std::string format_summary_row(const EvalReport& report);
std::string emit_text(const EvalReport& report);
// One JSON object on one line; every number at full precision.
std::string emit_json(const EvalReport& report);
EvalReport parse_json_report(const std::string& line);

}  // namespace sanid
