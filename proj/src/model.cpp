#include "sanid/model.hpp"

#include <cmath>

#include "sanid/error.hpp"

namespace sanid {
namespace {

void glorot(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& x : t.values()) x = rng.uniform(-limit, limit);
}

void init_lstm(LstmParams& p, Rng& rng) {
  const std::size_t u = p.units(), d = p.input_dim();
  glorot(p.W, d, 4 * u, rng);
  glorot(p.U, u, 4 * u, rng);
  p.b.fill(0.0);
  for (std::size_t j = u; j < 2 * u; ++j) p.b[j] = 1.0;
}

template <typename Self, typename Ref>
std::vector<Ref> collect(Self& self) {
  const bool frozen = self.embedding.frozen;
  std::vector<Ref> out{
      {"embedding", &self.embedding.matrix, ParamRole::kWeight, frozen},
      {"lstm_fwd.W", &self.lstm_fwd.W, ParamRole::kWeight, false},
      {"lstm_fwd.U", &self.lstm_fwd.U, ParamRole::kWeight, false},
      {"lstm_fwd.b", &self.lstm_fwd.b, ParamRole::kBias, false},
  };
  if (self.arch == Architecture::kSanBiLstm) {
    out.push_back({"lstm_bwd.W", &self.lstm_bwd.W, ParamRole::kWeight, false});
    out.push_back({"lstm_bwd.U", &self.lstm_bwd.U, ParamRole::kWeight, false});
    out.push_back({"lstm_bwd.b", &self.lstm_bwd.b, ParamRole::kBias, false});
  }
  out.push_back({"attention.W", &self.attention.W, ParamRole::kWeight, false});
  out.push_back({"attention.b", &self.attention.b, ParamRole::kBias, false});
  out.push_back({"attention.v", &self.attention.v, ParamRole::kWeight, false});
  out.push_back({"classifier.W", &self.classifier.W, ParamRole::kWeight, false});
  out.push_back({"classifier.b", &self.classifier.b, ParamRole::kBias, false});
  return out;
}

}  // namespace

std::string_view architecture_name(Architecture arch) noexcept {
  return arch == Architecture::kSanLstm ? "lstm" : "bilstm";
}

Architecture parse_architecture(std::string_view name) {
  if (name == "lstm" || name == "san+lstm") return Architecture::kSanLstm;
  if (name == "bilstm" || name == "san+bilstm") return Architecture::kSanBiLstm;
  fail(ErrorKind::kConfig, "unknown architecture '" + std::string(name) +
                               "' (expected lstm or bilstm)");
}

ModelDims ModelParams::dims() const {
  return {arch, embedding.vocab_size(), embedding.dim(), lstm_fwd.units(),
          classifier.classes()};
}

std::vector<ParamRef> ModelParams::arrays() {
  return collect<ModelParams, ParamRef>(*this);
}

std::vector<ConstParamRef> ModelParams::arrays() const {
  return collect<const ModelParams, ConstParamRef>(*this);
}

ModelParams ModelParams::zeros_like() const {
  ModelParams out = *this;
  for (auto& ref : out.arrays()) ref.value->fill(0.0);
  return out;
}

ModelParams ModelParams::zeros(const ModelDims& dims) {
  if (dims.vocab_size < 2 || dims.embedding_dim == 0 || dims.hidden_units == 0) {
    fail(ErrorKind::kConfig, "model needs vocab >= 2, embedding_dim >= 1, hidden_units >= 1");
  }
  if (dims.classes < 2) fail(ErrorKind::kConfig, "model needs at least 2 classes");
  ModelParams p;
  p.arch = dims.arch;
  p.embedding.matrix = Tensor(dims.vocab_size, dims.embedding_dim);
  p.lstm_fwd = LstmParams::zeros(dims.embedding_dim, dims.hidden_units);
  if (dims.arch == Architecture::kSanBiLstm) {
    p.lstm_bwd = LstmParams::zeros(dims.embedding_dim, dims.hidden_units);
  }
  const std::size_t k = dims.encoder_width();
  p.attention = AttentionParams::zeros(k, k);
  p.classifier = ClassifierParams::zeros(k, dims.classes);
  return p;
}

ModelParams ModelParams::initialize(const ModelDims& dims, Rng& rng,
                                    EmbeddingTable embedding) {
  ModelParams p = zeros(dims);
  if (embedding.matrix.empty()) {
    for (std::size_t r = 1; r < dims.vocab_size; ++r) {
      for (double& x : p.embedding.matrix.row(r)) x = rng.uniform(-0.05, 0.05);
    }
  } else {
    if (embedding.matrix.rows() != dims.vocab_size ||
        embedding.matrix.cols() != dims.embedding_dim) {
      fail(ErrorKind::kConfig, "embedding table " + embedding.matrix.shape_string() +
                                   " does not match vocab " +
                                   std::to_string(dims.vocab_size) + " x dim " +
                                   std::to_string(dims.embedding_dim));
    }
    p.embedding = std::move(embedding);
  }
  init_lstm(p.lstm_fwd, rng);
  if (dims.arch == Architecture::kSanBiLstm) init_lstm(p.lstm_bwd, rng);
  const std::size_t k = dims.encoder_width();
  glorot(p.attention.W, k, k, rng);
  glorot(p.attention.v, k, 1, rng);
  glorot(p.classifier.W, k, dims.classes, rng);
  return p;
}

void ModelParams::validate() const {
  const ModelDims d = dims();
  const ModelParams expected = zeros(d);
  const auto want = expected.arrays();
  const auto have = arrays();
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (!have[i].value->same_shape(*want[i].value)) {
      fail(ErrorKind::kDimension, std::string(have[i].name) + " has shape " +
                                      have[i].value->shape_string() + ", expected " +
                                      want[i].value->shape_string());
    }
  }
}

UtteranceTrace forward_utterance(const ModelParams& params,
                                 std::span<const TokenId> ids,
                                 std::span<const std::uint8_t> mask) {
  if (mask.size() != ids.size()) {
    fail(ErrorKind::kDimension, "mask length " + std::to_string(mask.size()) +
                                    " does not match " + std::to_string(ids.size()) + " ids");
  }
  std::size_t length = 0;
  while (length < mask.size() && mask[length]) ++length;
  for (std::size_t t = length; t < mask.size(); ++t) {
    if (mask[t]) fail(ErrorKind::kPrecondition, "mask must mark a contiguous prefix");
  }
  if (length == 0) fail(ErrorKind::kPrecondition, "utterance has no unmasked tokens");

  UtteranceTrace trace;
  trace.ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(length));
  trace.padded_length = ids.size();
  trace.inputs = embed(trace.ids, params.embedding);

  Tensor real;
  if (params.arch == Architecture::kSanLstm) {
    LstmResult r = lstm_forward(trace.inputs, params.lstm_fwd);
    real = std::move(r.hidden);
    trace.lstm = std::move(r.cache);
  } else {
    trace.bilstm = bilstm_forward(trace.inputs, params.lstm_fwd, params.lstm_bwd);
    real = trace.bilstm.hidden;
  }

  trace.encoded = Tensor(ids.size(), real.cols());
  std::copy(real.values().begin(), real.values().end(), trace.encoded.values().begin());
  trace.attention = self_attention(trace.encoded, mask, params.attention);
  trace.output = classify(trace.attention.context, params.classifier);
  return trace;
}

UtteranceTrace forward_utterance(const ModelParams& params,
                                 std::span<const TokenId> ids) {
  const Mask mask(ids.size(), 1);
  return forward_utterance(params, ids, mask);
}

void backward_utterance(const ModelParams& params, const UtteranceTrace& trace,
                        const Tensor& d_logits, ModelParams& grads) {
  if (trace.attention.cache.empty()) {
    fail(ErrorKind::kUsage, "backward_utterance called without a forward trace");
  }
  const Tensor d_context =
      classifier_backward(trace.attention.context, d_logits, params.classifier,
                          grads.classifier);
  const Tensor d_encoded = attention_backward(trace.attention.cache, d_context,
                                              params.attention, grads.attention);
  const std::size_t L = trace.ids.size();
  Tensor d_real(L, d_encoded.cols());
  std::copy(d_encoded.values().begin(),
            d_encoded.values().begin() + static_cast<std::ptrdiff_t>(d_real.size()),
            d_real.values().begin());

  Tensor d_inputs;
  if (params.arch == Architecture::kSanLstm) {
    d_inputs = lstm_backward(trace.lstm, d_real, params.lstm_fwd, grads.lstm_fwd);
  } else {
    d_inputs = bilstm_backward(trace.bilstm, d_real, params.lstm_fwd, params.lstm_bwd,
                               grads.lstm_fwd, grads.lstm_bwd);
  }
  if (!params.embedding.frozen) {
    embed_backward(trace.ids, d_inputs, grads.embedding.matrix);
  }
}

}  // namespace sanid
