#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sanid/tensor.hpp"

namespace sanid {

using TokenId = std::uint32_t;
using Mask = std::vector<std::uint8_t>;

inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kUnkId = 1;

// ---------------------------------------------------------------------------
// Embedding lookup
// ---------------------------------------------------------------------------

struct EmbeddingTable {
  Tensor matrix;  // [V x d], row kPadId all zeros
  bool frozen = false;

  std::size_t vocab_size() const noexcept { return matrix.rows(); }
  std::size_t dim() const noexcept { return matrix.cols(); }
};

Tensor embed(std::span<const TokenId> ids, const EmbeddingTable& table);

// Scatter-adds d_rows[t] into d_table[ids[t]]; PAD rows never receive gradient.
void embed_backward(std::span<const TokenId> ids, const Tensor& d_rows,
                    Tensor& d_table);

// ---------------------------------------------------------------------------
// LSTM
//
// Gate blocks are stacked in the order (input i, forget f, cell g, output o):
// rows [0,u) of W, U and b feed i, [u,2u) feed f, [2u,3u) feed g and
// [3u,4u) feed o. i, f, o use the logistic sigmoid, g uses tanh, and
//   c_t = f * c_{t-1} + i * g,   h_t = o * tanh(c_t).
// ---------------------------------------------------------------------------

struct LstmParams {
  Tensor W;  // [4u x d]
  Tensor U;  // [4u x u]
  Tensor b;  // [4u]

  std::size_t units() const noexcept { return U.cols(); }
  std::size_t input_dim() const noexcept { return W.cols(); }

  static LstmParams zeros(std::size_t input_dim, std::size_t units);
};

struct LstmCache {
  Tensor x;          // [T x d]
  Tensor gates;      // [T x 4u] post-activation (i, f, g, o)
  Tensor cells;      // [T x u]
  Tensor cell_tanh;  // [T x u]
  Tensor hidden;     // [T x u]
  Tensor h0, c0;     // [u]

  bool empty() const noexcept { return hidden.empty(); }
};

struct LstmResult {
  Tensor hidden;  // [T x u]
  LstmCache cache;
};

LstmResult lstm_forward(const Tensor& x, const LstmParams& p,
                        const Tensor& h0 = {}, const Tensor& c0 = {});

// Accumulates parameter gradients into `grads`; returns d loss / d x.
Tensor lstm_backward(const LstmCache& cache, const Tensor& d_hidden,
                     const LstmParams& p, LstmParams& grads);

Tensor reverse_rows(const Tensor& x);

struct BiLstmResult {
  Tensor hidden;  // [T x 2u], row t = (forward h_t, backward h_t)
  LstmCache forward;
  LstmCache backward;  // cache over the reversed sequence
};

BiLstmResult bilstm_forward(const Tensor& x, const LstmParams& p_fwd,
                            const LstmParams& p_bwd);

Tensor bilstm_backward(const BiLstmResult& result, const Tensor& d_hidden,
                       const LstmParams& p_fwd, const LstmParams& p_bwd,
                       LstmParams& g_fwd, LstmParams& g_bwd);

// ---------------------------------------------------------------------------
// Additive self-attention
//
//   e_t = v . tanh(W h_t + b)      for unmasked t
//   a   = softmax(e) over unmasked positions, exactly 0 elsewhere
//   context = sum_t a_t h_t
// ---------------------------------------------------------------------------

struct AttentionParams {
  Tensor W;  // [k_a x k]
  Tensor b;  // [k_a]
  Tensor v;  // [k_a]

  static AttentionParams zeros(std::size_t width, std::size_t attention_width);
};

struct AttentionCache {
  Tensor H;           // [T x k]
  Mask mask;          // [T]
  Tensor projected;   // [T x k_a], tanh(W h_t + b); zero rows where masked
  Tensor weights;     // [T]

  bool empty() const noexcept { return weights.empty(); }
};

struct AttentionResult {
  Tensor context;  // [k]
  Tensor weights;  // [T]
  AttentionCache cache;
};

AttentionResult self_attention(const Tensor& H, std::span<const std::uint8_t> mask,
                               const AttentionParams& p);

// Returns d loss / d H (zero rows at masked positions).
Tensor attention_backward(const AttentionCache& cache, const Tensor& d_context,
                          const AttentionParams& p, AttentionParams& grads);

// ---------------------------------------------------------------------------
// Softmax classifier
// ---------------------------------------------------------------------------

struct ClassifierParams {
  Tensor W;  // [K x k]
  Tensor b;  // [K]

  std::size_t classes() const noexcept { return W.rows(); }

  static ClassifierParams zeros(std::size_t width, std::size_t classes);
};

struct ClassifierResult {
  Tensor logits;  // [K]
  Tensor probs;   // [K]
};

ClassifierResult classify(const Tensor& context, const ClassifierParams& p);

// Returns d loss / d context.
Tensor classifier_backward(const Tensor& context, const Tensor& d_logits,
                           const ClassifierParams& p, ClassifierParams& grads);

}  // namespace sanid
