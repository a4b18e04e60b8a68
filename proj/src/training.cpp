#include "sanid/training.hpp"

#include <cmath>

#include "sanid/error.hpp"

namespace sanid {
namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    fail(ErrorKind::kConfig, std::string(name) + " must be a positive finite number");
  }
}

void add_l2_gradient(const ModelParams& params, double gamma, ModelParams& grads) {
  if (gamma == 0.0) return;
  const auto values = params.arrays();
  auto targets = grads.arrays();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].frozen || values[i].role != ParamRole::kWeight) continue;
    const auto src = values[i].value->values();
    auto dst = targets[i].value->values();
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] += 2.0 * gamma * src[j];
  }
}

void check_examples(std::span<const Example> examples, const ModelParams& params,
                    const char* which) {
  const std::size_t K = params.classifier.classes();
  const std::size_t V = params.embedding.vocab_size();
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    if (ex.intent_id >= K) {
      fail(ErrorKind::kData, std::string(which) + " example " + std::to_string(i) +
                                 " has intent id " + std::to_string(ex.intent_id) +
                                 " but the model has " + std::to_string(K) + " classes");
    }
    if (ex.token_ids.empty()) {
      fail(ErrorKind::kData, std::string(which) + " example " + std::to_string(i) +
                                 " has no token ids (not encoded)");
    }
    for (TokenId id : ex.token_ids) {
      if (id >= V) {
        fail(ErrorKind::kData, std::string(which) + " example " + std::to_string(i) +
                                   " has token id " + std::to_string(id) +
                                   " outside the vocabulary of " + std::to_string(V));
      }
    }
  }
}

}  // namespace

bool TrainConfig::embeddings_frozen() const {
  return freeze_embeddings.value_or(embeddings != "random");
}

void TrainConfig::validate() const {
  require_positive(learning_rate, "learning_rate");
  require_positive(beta1, "beta1");
  require_positive(beta2, "beta2");
  require_positive(epsilon, "epsilon");
  if (beta1 >= 1.0 || beta2 >= 1.0) fail(ErrorKind::kConfig, "beta1 and beta2 must be below 1");
  if (!(l2_gamma >= 0.0) || !std::isfinite(l2_gamma)) {
    fail(ErrorKind::kConfig, "l2_gamma must be a non-negative finite number");
  }
  if (batch_size < 1) fail(ErrorKind::kConfig, "batch_size must be at least 1");
  if (epochs < 1) fail(ErrorKind::kConfig, "epochs must be at least 1");
  if (hidden_units < 1) fail(ErrorKind::kConfig, "hidden_units must be at least 1");
  if (embedding_dim < 1) fail(ErrorKind::kConfig, "embedding_dim must be at least 1");
}

double l2_norm_squared(const ModelParams& params) {
  double total = 0.0;
  for (const auto& ref : params.arrays()) {
    if (ref.frozen || ref.role != ParamRole::kWeight) continue;
    for (double x : ref.value->values()) total += x * x;
  }
  return total;
}

double loss(const Tensor& probs, std::span<const ClassId> labels, const ModelParams& params,
            double gamma, LossReduction reduction) {
  if (probs.rank() != 2 || probs.rows() != labels.size()) {
    fail(ErrorKind::kDimension, "loss: probabilities " + probs.shape_string() + " for " +
                                    std::to_string(labels.size()) + " labels");
  }
  double data = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto row = probs.row(i);
    if (labels[i] >= row.size()) {
      fail(ErrorKind::kData, "label " + std::to_string(labels[i]) + " outside " +
                                 std::to_string(row.size()) + " classes");
    }
    double sum = 0.0;
    for (double p : row) sum += p;
    if (std::abs(sum - 1.0) > 1e-6) {
      fail(ErrorKind::kPrecondition, "probability row " + std::to_string(i) + " sums to " +
                                         std::to_string(sum));
    }
    data -= std::log(std::max(row[labels[i]], kLogClamp));
  }
  if (reduction == LossReduction::kMean) data /= static_cast<double>(labels.size());
  return data + gamma * l2_norm_squared(params);
}

BatchObjective batch_objective(const ModelParams& params, const Batch& batch, double gamma,
                               LossReduction reduction) {
  const std::size_t K = params.classifier.classes();
  BatchObjective out;
  out.grads = params.zeros_like();
  out.probs = Tensor(batch.size, K);
  const double scale =
      reduction == LossReduction::kMean ? 1.0 / static_cast<double>(batch.size) : 1.0;
  for (std::size_t b = 0; b < batch.size; ++b) {
    const UtteranceTrace trace = forward_utterance(params, batch.row_ids(b), batch.row_mask(b));
    const Tensor& p = trace.output.probs;
    std::copy(p.values().begin(), p.values().end(), out.probs.row(b).begin());
    Tensor d_logits = p;
    d_logits[batch.labels[b]] -= 1.0;
    for (double& g : d_logits.values()) g *= scale;
    backward_utterance(params, trace, d_logits, out.grads);
  }
  out.value = loss(out.probs, batch.labels, params, gamma, reduction);
  add_l2_gradient(params, gamma, out.grads);
  return out;
}

double batch_loss(const ModelParams& params, const Batch& batch, double gamma,
                  LossReduction reduction) {
  Tensor probs(batch.size, params.classifier.classes());
  for (std::size_t b = 0; b < batch.size; ++b) {
    const UtteranceTrace trace = forward_utterance(params, batch.row_ids(b), batch.row_mask(b));
    const auto p = trace.output.probs.values();
    std::copy(p.begin(), p.end(), probs.row(b).begin());
  }
  return loss(probs, batch.labels, params, gamma, reduction);
}

AdamState AdamState::for_params(const ModelParams& params) {
  AdamState state;
  for (const auto& ref : params.arrays()) {
    state.m.push_back(ref.value->zeros_like());
    state.v.push_back(ref.value->zeros_like());
  }
  return state;
}

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state,
               const TrainConfig& config) {
  auto values = params.arrays();
  const auto gradients = grads.arrays();
  if (values.size() != gradients.size() || values.size() != state.m.size()) {
    fail(ErrorKind::kDimension, "adam_step: parameter, gradient and state layouts differ");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].frozen) continue;
    if (!values[i].value->same_shape(*gradients[i].value)) {
      fail(ErrorKind::kDimension, std::string("adam_step: gradient for ") +
                                      std::string(values[i].name) + " has shape " +
                                      gradients[i].value->shape_string());
    }
    if (!gradients[i].value->all_finite()) {
      fail(ErrorKind::kNumeric, "non-finite gradient for " + std::string(values[i].name));
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].frozen) continue;
    auto theta = values[i].value->values();
    const auto g = gradients[i].value->values();
    auto m = state.m[i].values();
    auto v = state.v[i].values();
    for (std::size_t j = 0; j < theta.size(); ++j) {
      m[j] = config.beta1 * m[j] + (1.0 - config.beta1) * g[j];
      v[j] = config.beta2 * v[j] + (1.0 - config.beta2) * g[j] * g[j];
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      theta[j] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

std::size_t steps_per_epoch(std::size_t examples, std::size_t batch_size) {
  return (examples + batch_size - 1) / batch_size;
}

std::uint64_t epoch_shuffle_seed(std::uint64_t seed, std::size_t epoch) {
  std::uint64_t x = seed ^ (0x5851f42d4c957f2dULL * static_cast<std::uint64_t>(epoch));
  return splitmix64(x);
}

TrainResult train(const TrainConfig& config, ModelParams initial,
                  std::span<const Example> train_set, std::span<const Example> val_set) {
  config.validate();
  initial.validate();
  if (train_set.empty()) fail(ErrorKind::kData, "training set is empty");
  check_examples(train_set, initial, "training");
  check_examples(val_set, initial, "validation");

  TrainResult result;
  result.params = std::move(initial);
  AdamState state = AdamState::for_params(result.params);
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto batches = make_batches(train_set, config.batch_size, true,
                                      epoch_shuffle_seed(config.seed, epoch));
    double total = 0.0;
    for (const Batch& batch : batches) {
      const BatchObjective obj =
          batch_objective(result.params, batch, config.l2_gamma, config.reduction);
      adam_step(result.params, obj.grads, state, config);
      total += obj.value;
    }
    EpochRecord record;
    record.epoch = epoch;
    record.steps = static_cast<std::size_t>(state.step);
    record.train_loss = total / static_cast<double>(batches.size());
    if (!val_set.empty()) record.val_accuracy = accuracy(result.params, val_set);
    result.history.push_back(record);
  }
  return result;
}

double accuracy(const ModelParams& params, std::span<const Example> examples) {
  if (examples.empty()) fail(ErrorKind::kPrecondition, "accuracy over an empty set");
  std::size_t correct = 0;
  for (const auto& ex : examples) {
    const auto trace = forward_utterance(params, ex.token_ids);
    if (argmax(trace.output.probs.values()) == ex.intent_id) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

}  // namespace sanid
