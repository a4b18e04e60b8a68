#include "sanid/evaluation.hpp"

#include "sanid/error.hpp"

namespace sanid {
namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

// The harmonic mean of two equal values is that value; returning it directly
// keeps micro F1 bit-identical to accuracy.
double harmonic(double p, double r) {
  if (p == r) return p;
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

}  // namespace

Prediction predict_one(const ModelParams& params, std::span<const TokenId> ids) {
  const UtteranceTrace trace = forward_utterance(params, ids);
  Prediction out;
  out.probs.assign(trace.output.probs.values().begin(), trace.output.probs.values().end());
  out.intent_id = static_cast<ClassId>(argmax(out.probs));
  out.attention.assign(trace.attention.weights.values().begin(),
                       trace.attention.weights.values().end());
  return out;
}

std::vector<Prediction> predict(const ModelParams& params, std::span<const Example> examples) {
  std::vector<Prediction> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    if (ex.token_ids.empty()) fail(ErrorKind::kUsage, "predict on an unencoded example");
    out.push_back(predict_one(params, ex.token_ids));
  }
  return out;
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels)
    : labels_(std::move(labels)), counts_(labels_.size() * labels_.size(), 0) {}

void ConfusionMatrix::add(std::size_t gold, std::size_t pred, std::uint64_t n) {
  if (gold >= classes() || pred >= classes()) {
    fail(ErrorKind::kIndex, "confusion entry (" + std::to_string(gold) + ", " +
                                std::to_string(pred) + ") outside " +
                                std::to_string(classes()) + " classes");
  }
  counts_[gold * classes() + pred] += n;
}

std::uint64_t ConfusionMatrix::total() const noexcept {
  std::uint64_t sum = 0;
  for (auto c : counts_) sum += c;
  return sum;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t gold) const {
  std::uint64_t sum = 0;
  for (std::size_t p = 0; p < classes(); ++p) sum += at(gold, p);
  return sum;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t pred) const {
  std::uint64_t sum = 0;
  for (std::size_t g = 0; g < classes(); ++g) sum += at(g, pred);
  return sum;
}

ConfusionMatrix confusion(std::span<const ClassId> golds, std::span<const ClassId> preds,
                          std::size_t classes, std::vector<std::string> labels) {
  if (golds.size() != preds.size()) {
    fail(ErrorKind::kDimension, "confusion: " + std::to_string(golds.size()) + " golds vs " +
                                    std::to_string(preds.size()) + " predictions");
  }
  if (labels.empty()) {
    for (std::size_t k = 0; k < classes; ++k) labels.push_back(std::to_string(k));
  }
  if (labels.size() != classes) fail(ErrorKind::kDimension, "confusion: label count != classes");
  ConfusionMatrix cm(std::move(labels));
  for (std::size_t i = 0; i < golds.size(); ++i) cm.add(golds[i], preds[i]);
  return cm;
}

bool operator==(const ClassMetrics& a, const ClassMetrics& b) {
  return a.precision == b.precision && a.recall == b.recall && a.f1 == b.f1 &&
         a.support == b.support;
}

EvalReport metrics(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (cm.classes() == 0 || total == 0) fail(ErrorKind::kPrecondition, "metrics of an empty confusion matrix");
  EvalReport r;
  r.confusion = cm;
  std::uint64_t tp_all = 0, fp_all = 0, fn_all = 0;
  double f1_sum = 0.0;
  for (std::size_t k = 0; k < cm.classes(); ++k) {
    const std::uint64_t tp = cm.at(k, k);
    const std::uint64_t predicted = cm.col_sum(k);
    const std::uint64_t gold = cm.row_sum(k);
    ClassMetrics m;
    m.precision = ratio(tp, predicted);
    m.recall = ratio(tp, gold);
    m.f1 = harmonic(m.precision, m.recall);
    m.support = gold;
    r.per_class.push_back(m);
    f1_sum += m.f1;
    tp_all += tp;
    fp_all += predicted - tp;
    fn_all += gold - tp;
  }
  r.accuracy = ratio(tp_all, total);
  const double micro_p = ratio(tp_all, tp_all + fp_all);
  const double micro_r = ratio(tp_all, tp_all + fn_all);
  r.micro_f1 = harmonic(micro_p, micro_r);
  r.macro_f1 = f1_sum / static_cast<double>(cm.classes());
  r.overall_f1 = (r.micro_f1 + r.macro_f1) / 2.0;
  return r;
}

}  // namespace sanid
