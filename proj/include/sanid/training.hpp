#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sanid/dataset.hpp"
#include "sanid/model.hpp"

namespace sanid {

enum class LossReduction { kSum, kMean };

inline constexpr double kLogClamp = 1e-12;

struct TrainConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 16;
  std::size_t epochs = 25;
  double l2_gamma = 0.01;
  std::size_t hidden_units = 64;
  std::uint64_t seed = 1;
  Architecture arch = Architecture::kSanBiLstm;
  std::string embeddings = "random";  // "random" or a vector file path
  std::size_t embedding_dim = 300;
  // Unset: frozen for pretrained vectors, trainable for random init.
  std::optional<bool> freeze_embeddings;
  LossReduction reduction = LossReduction::kSum;
  bool lowercase = true;  // preprocessing, needed again at inference

  bool embeddings_frozen() const;
  void validate() const;
};

// Sum over non-frozen weight arrays (not biases) of squared entries.
double l2_norm_squared(const ModelParams& params);

// J = sum_i -log(max(p_i[label_i], 1e-12)) + gamma * ||theta||^2, where
// theta ranges over non-frozen weight arrays. kMean divides the data term
// (only) by the batch size.
double loss(const Tensor& probs, std::span<const ClassId> labels, const ModelParams& params,
            double gamma, LossReduction reduction = LossReduction::kSum);

struct BatchObjective {
  double value = 0.0;
  ModelParams grads;  // zero for frozen arrays
  Tensor probs;       // [B x K]
};

// Forward + backward over a batch in row order, including the L2 term.
BatchObjective batch_objective(const ModelParams& params, const Batch& batch, double gamma,
                               LossReduction reduction = LossReduction::kSum);

// Objective value only (no gradients).
double batch_loss(const ModelParams& params, const Batch& batch, double gamma,
                  LossReduction reduction = LossReduction::kSum);

struct AdamState {
  std::vector<Tensor> m;  // first moments, in ModelParams::arrays() order
  std::vector<Tensor> v;  // second moments
  std::uint64_t step = 0;

  static AdamState for_params(const ModelParams& params);
};

// One bias-corrected Adam update of every non-frozen array. Gradients are
// checked for finiteness before anything is modified.
void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state,
               const TrainConfig& config);

struct EpochRecord {
  std::size_t epoch = 0;        // 1-based
  std::size_t steps = 0;        // optimizer steps so far
  double train_loss = 0.0;      // mean objective per step over the epoch
  std::optional<double> val_accuracy;
};

struct TrainResult {
  ModelParams params;  // final-epoch parameters
  std::vector<EpochRecord> history;
};

std::size_t steps_per_epoch(std::size_t examples, std::size_t batch_size);

// Shuffle seed for a given epoch (1-based), derived from the config seed.
std::uint64_t epoch_shuffle_seed(std::uint64_t seed, std::size_t epoch);

// Plain mini-batch Adam for config.epochs epochs; the batch order is
// reshuffled every epoch. Validation accuracy is recorded but never used to
// pick a model. Data problems are reported before the first step.
TrainResult train(const TrainConfig& config, ModelParams initial,
                  std::span<const Example> train_set, std::span<const Example> val_set);

double accuracy(const ModelParams& params, std::span<const Example> examples);

}  // namespace sanid
