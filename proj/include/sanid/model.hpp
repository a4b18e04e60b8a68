#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sanid/layers.hpp"
#include "sanid/rng.hpp"

namespace sanid {

enum class Architecture { kSanLstm, kSanBiLstm };

// "lstm" / "bilstm"
std::string_view architecture_name(Architecture arch) noexcept;
Architecture parse_architecture(std::string_view name);

struct ModelDims {
  Architecture arch = Architecture::kSanBiLstm;
  std::size_t vocab_size = 0;
  std::size_t embedding_dim = 0;
  std::size_t hidden_units = 64;
  std::size_t classes = 0;

  std::size_t encoder_width() const noexcept {
    return arch == Architecture::kSanBiLstm ? 2 * hidden_units : hidden_units;
  }
};

enum class ParamRole { kWeight, kBias };

template <typename TensorT>
struct BasicParamRef {
  std::string_view name;
  TensorT* value;
  ParamRole role;
  bool frozen;
};
using ParamRef = BasicParamRef<Tensor>;
using ConstParamRef = BasicParamRef<const Tensor>;

// Every array of the network. arrays() enumerates them in a fixed order:
//   embedding, lstm_fwd.{W,U,b}, [lstm_bwd.{W,U,b}], attention.{W,b,v},
//   classifier.{W,b}
// The same type doubles as the gradient container.
struct ModelParams {
  Architecture arch = Architecture::kSanBiLstm;
  EmbeddingTable embedding;
  LstmParams lstm_fwd;
  LstmParams lstm_bwd;  // empty for kSanLstm
  AttentionParams attention;
  ClassifierParams classifier;

  ModelDims dims() const;

  std::vector<ParamRef> arrays();
  std::vector<ConstParamRef> arrays() const;

  ModelParams zeros_like() const;

  static ModelParams zeros(const ModelDims& dims);
  // Glorot-uniform weights, forget-gate biases 1, other biases 0. When
  // `embedding` is empty the table is drawn uniform in [-0.05, 0.05].
  static ModelParams initialize(const ModelDims& dims, Rng& rng,
                                EmbeddingTable embedding = {});

  // Throws kDimension/kConfig if the arrays are inconsistent with each other.
  void validate() const;
};

// Per-utterance forward trace, kept for the backward pass.
struct UtteranceTrace {
  std::vector<TokenId> ids;  // the unpadded prefix fed to the encoder
  std::size_t padded_length = 0;
  Tensor inputs;             // [L x d]
  LstmCache lstm;            // SAN+LSTM
  BiLstmResult bilstm;       // SAN+Bi-LSTM
  Tensor encoded;            // [T x k], zero rows past L
  AttentionResult attention;
  ClassifierResult output;
};

// Runs the network on one utterance. `mask` marks real tokens and must be
// a non-empty prefix; padded positions are excluded from the encoder and
// from attention, so trailing PADs never change the output.
UtteranceTrace forward_utterance(const ModelParams& params,
                                 std::span<const TokenId> ids,
                                 std::span<const std::uint8_t> mask);

UtteranceTrace forward_utterance(const ModelParams& params,
                                 std::span<const TokenId> ids);

// Accumulates d loss / d params into `grads` given d loss / d logits.
void backward_utterance(const ModelParams& params, const UtteranceTrace& trace,
                        const Tensor& d_logits, ModelParams& grads);

}  // namespace sanid
