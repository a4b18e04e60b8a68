#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "printers.hpp"

#include "sanid/error.hpp"
#include "sanid/grad_check.hpp"
#include "sanid/model.hpp"
#include "sanid/rng.hpp"

namespace sanid {
namespace {

ModelDims tiny_dims(Architecture arch, std::size_t units = 3, std::size_t classes = 3) {
  ModelDims d;
  d.arch = arch;
  d.vocab_size = 9;
  d.embedding_dim = 4;
  d.hidden_units = units;
  d.classes = classes;
  return d;
}

std::vector<std::string> names(const ModelParams& p) {
  std::vector<std::string> out;
  for (const auto& ref : p.arrays()) out.emplace_back(ref.name);
  return out;
}

class ModelArchTest : public testing::TestWithParam<Architecture> {};

TEST(ModelTest, ArrayOrderIsFixed) {
  Rng rng(1);
  const auto lstm = ModelParams::initialize(tiny_dims(Architecture::kSanLstm), rng);
  EXPECT_EQ(names(lstm), (std::vector<std::string>{
                             "embedding", "lstm_fwd.W", "lstm_fwd.U", "lstm_fwd.b",
                             "attention.W", "attention.b", "attention.v", "classifier.W",
                             "classifier.b"}));
  const auto bi = ModelParams::initialize(tiny_dims(Architecture::kSanBiLstm), rng);
  EXPECT_EQ(names(bi), (std::vector<std::string>{
                           "embedding", "lstm_fwd.W", "lstm_fwd.U", "lstm_fwd.b", "lstm_bwd.W",
                           "lstm_bwd.U", "lstm_bwd.b", "attention.W", "attention.b",
                           "attention.v", "classifier.W", "classifier.b"}));
}

TEST(ModelTest, ArchitectureNames) {
  EXPECT_EQ(architecture_name(Architecture::kSanLstm), "lstm");
  EXPECT_EQ(architecture_name(Architecture::kSanBiLstm), "bilstm");
  EXPECT_EQ(parse_architecture("bilstm"), Architecture::kSanBiLstm);
  EXPECT_THROW(parse_architecture("gru"), Error);
}

TEST(ModelTest, EncoderWidthDoublesForBidirectional) {
  EXPECT_EQ(tiny_dims(Architecture::kSanLstm, 5).encoder_width(), 5u);
  EXPECT_EQ(tiny_dims(Architecture::kSanBiLstm, 5).encoder_width(), 10u);
  Rng rng(2);
  const auto p = ModelParams::initialize(tiny_dims(Architecture::kSanBiLstm, 5, 4), rng);
  EXPECT_EQ(p.classifier.W.shape_string(), "[4x10]");
  EXPECT_EQ(p.attention.W.shape_string(), "[10x10]");
}

TEST(ModelTest, InitializationConventions) {
  Rng rng(3);
  const ModelDims d = tiny_dims(Architecture::kSanBiLstm);
  const auto p = ModelParams::initialize(d, rng);
  const std::size_t u = d.hidden_units;
  for (double x : p.embedding.matrix.row(kPadId)) EXPECT_EQ(x, 0.0);
  for (std::size_t r = 1; r < d.vocab_size; ++r)
    for (double x : p.embedding.matrix.row(r)) EXPECT_LE(std::abs(x), 0.05);
  for (const LstmParams* l : {&p.lstm_fwd, &p.lstm_bwd}) {
    for (std::size_t j = 0; j < 4 * u; ++j)
      EXPECT_EQ(l->b[j], (j >= u && j < 2 * u) ? 1.0 : 0.0);
    const double limit = std::sqrt(6.0 / static_cast<double>(d.embedding_dim + 4 * u));
    for (double x : l->W.values()) EXPECT_LE(std::abs(x), limit);
  }
  for (double x : p.classifier.b.values()) EXPECT_EQ(x, 0.0);
  EXPECT_NO_THROW(p.validate());
}

TEST(ModelTest, InitializationIsSeedDeterministic) {
  Rng a(11), b(11), c(12);
  const ModelDims d = tiny_dims(Architecture::kSanLstm);
  const auto pa = ModelParams::initialize(d, a);
  const auto pb = ModelParams::initialize(d, b);
  const auto pc = ModelParams::initialize(d, c);
  EXPECT_EQ(pa.lstm_fwd.W, pb.lstm_fwd.W);
  EXPECT_EQ(pa.embedding.matrix, pb.embedding.matrix);
  EXPECT_FALSE(pa.lstm_fwd.W == pc.lstm_fwd.W);
}

TEST(ModelTest, TooFewClassesIsConfigError) {
  ModelDims d = tiny_dims(Architecture::kSanLstm);
  d.classes = 1;
  try {
    ModelParams::zeros(d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
}

TEST(ModelTest, ValidateCatchesInconsistentShapes) {
  auto p = ModelParams::zeros(tiny_dims(Architecture::kSanBiLstm));
  p.attention.v = Tensor(7);
  EXPECT_THROW(p.validate(), Error);
}

TEST(ModelTest, MaskMustBeNonEmptyPrefix) {
  Rng rng(4);
  const auto p = ModelParams::initialize(tiny_dims(Architecture::kSanLstm), rng);
  const TokenId ids[] = {2, 3, 0};
  const std::uint8_t hole[] = {1, 0, 1};
  const std::uint8_t none[] = {0, 0, 0};
  EXPECT_THROW(forward_utterance(p, ids, hole), Error);
  EXPECT_THROW(forward_utterance(p, ids, none), Error);
}

TEST_P(ModelArchTest, ZeroModelPredictsUniform) {
  const auto p = ModelParams::zeros(tiny_dims(GetParam(), 3, 4));
  const TokenId ids[] = {2, 5, 7};
  const auto trace = forward_utterance(p, ids);
  for (double x : trace.output.probs.values()) EXPECT_EQ(x, 0.25);
}

TEST_P(ModelArchTest, TrailingPadsLeaveOutputUnchanged) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = ModelParams::initialize(tiny_dims(GetParam()), rng);
    const std::size_t L = 1 + rng.below(6), pads = 1 + rng.below(5);
    std::vector<TokenId> ids(L);
    for (auto& id : ids) id = static_cast<TokenId>(1 + rng.below(8));
    const auto plain = forward_utterance(p, ids);

    std::vector<TokenId> padded = ids;
    padded.resize(L + pads, kPadId);
    Mask mask(L + pads, 0);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(L), 1);
    const auto masked = forward_utterance(p, padded, mask);

    EXPECT_EQ(plain.output.probs, masked.output.probs);
    EXPECT_EQ(plain.attention.context, masked.attention.context);
    for (std::size_t t = 0; t < L; ++t)
      EXPECT_EQ(plain.attention.weights[t], masked.attention.weights[t]);
    for (std::size_t t = L; t < L + pads; ++t) EXPECT_EQ(masked.attention.weights[t], 0.0);
  }
}

TEST(ModelTest, BackwardHalfIsReversedRunOverReversedInput) {
  Rng rng(6);
  const auto p = ModelParams::initialize(tiny_dims(Architecture::kSanBiLstm), rng);
  const TokenId ids[] = {3, 1, 8, 4, 2};
  const auto trace = forward_utterance(p, ids);
  const std::size_t u = p.lstm_fwd.units();
  const Tensor x = embed(ids, p.embedding);
  const Tensor bwd = reverse_rows(lstm_forward(reverse_rows(x), p.lstm_bwd).hidden);
  const Tensor fwd = lstm_forward(x, p.lstm_fwd).hidden;
  for (std::size_t t = 0; t < 5; ++t)
    for (std::size_t j = 0; j < u; ++j) {
      EXPECT_EQ(trace.encoded(t, j), fwd(t, j));
      EXPECT_EQ(trace.encoded(t, u + j), bwd(t, j));
    }
}

TEST_P(ModelArchTest, FullGradientMatchesFiniteDifferences) {
  struct Case { std::size_t T, u, K; std::uint64_t seed; };
  const Case cases[] = {{1, 2, 2, 21}, {3, 3, 3, 22}, {4, 4, 3, 23}, {4, 1, 2, 24}};
  for (const Case& c : cases) {
    SCOPED_TRACE(testing::Message() << "T=" << c.T << " u=" << c.u << " K=" << c.K);
    Rng rng(c.seed);
    ModelParams p = ModelParams::initialize(tiny_dims(GetParam(), c.u, c.K), rng);
    // larger weights so every path carries signal
    for (auto& ref : p.arrays())
      for (double& x : ref.value->values()) x += rng.uniform(-0.3, 0.3);
    for (double& x : p.embedding.matrix.row(kPadId)) x = 0.0;

    std::vector<TokenId> ids(c.T + 1, kPadId);
    for (std::size_t t = 0; t < c.T; ++t) ids[t] = static_cast<TokenId>(1 + rng.below(8));
    Mask mask(c.T + 1, 1);
    mask[c.T] = 0;
    const std::size_t label = rng.below(c.K);

    ModelParams grads = p.zeros_like();
    const auto trace = forward_utterance(p, ids, mask);
    Tensor d_logits = trace.output.probs;
    d_logits[label] -= 1.0;
    backward_utterance(p, trace, d_logits, grads);

    auto f = [&] { return -std::log(forward_utterance(p, ids, mask).output.probs[label]); };
    std::vector<GradSlot> slots;
    auto refs = p.arrays();
    auto grefs = std::as_const(grads).arrays();
    for (std::size_t i = 0; i < refs.size(); ++i)
      slots.push_back({std::string(refs[i].name), refs[i].value, grefs[i].value});
    const auto result = grad_check(f, slots, rng);
    EXPECT_LT(result.max_rel_error, 1e-4) << result.worst_slot << "[" << result.worst_index << "]";
    // PAD row never receives gradient
    for (double g : grads.embedding.matrix.row(kPadId)) EXPECT_EQ(g, 0.0);
  }
}

TEST(ModelTest, FrozenEmbeddingGetsNoGradient) {
  Rng rng(7);
  ModelParams p = ModelParams::initialize(tiny_dims(Architecture::kSanLstm), rng);
  p.embedding.frozen = true;
  ModelParams grads = p.zeros_like();
  const TokenId ids[] = {2, 3};
  const auto trace = forward_utterance(p, ids);
  backward_utterance(p, trace, Tensor::vector({0.5, -0.25, -0.25}), grads);
  for (double g : grads.embedding.matrix.values()) EXPECT_EQ(g, 0.0);
}

INSTANTIATE_TEST_SUITE_P(Architectures, ModelArchTest,
                         testing::Values(Architecture::kSanLstm, Architecture::kSanBiLstm),
                         [](const auto& info) {
                           return std::string(architecture_name(info.param));
                         });

}  // namespace
}  // namespace sanid
