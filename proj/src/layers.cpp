#include "sanid/layers.hpp"

#include <cmath>

#include "sanid/error.hpp"

namespace sanid {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void expect_shape(const Tensor& t, std::size_t rows, std::size_t cols,
                  const char* what) {
  if (t.rank() != 2 || t.rows() != rows || t.cols() != cols) {
    fail(ErrorKind::kDimension, std::string(what) + " has shape " + t.shape_string() +
                                    ", expected [" + std::to_string(rows) + "x" +
                                    std::to_string(cols) + "]");
  }
}

void expect_length(const Tensor& t, std::size_t n, const char* what) {
  if (t.rank() != 1 || t.size() != n) {
    fail(ErrorKind::kDimension, std::string(what) + " has shape " + t.shape_string() +
                                    ", expected [" + std::to_string(n) + "]");
  }
}

void check_lstm(const LstmParams& p) {
  const std::size_t u = p.U.cols();
  if (u == 0) fail(ErrorKind::kDimension, "LSTM has no units");
  expect_shape(p.U, 4 * u, u, "LSTM U");
  expect_shape(p.W, 4 * u, p.W.cols(), "LSTM W");
  expect_length(p.b, 4 * u, "LSTM b");
}

void check_attention(const AttentionParams& p, std::size_t width) {
  expect_shape(p.W, p.W.rows(), width, "attention W");
  expect_length(p.b, p.W.rows(), "attention b");
  expect_length(p.v, p.W.rows(), "attention v");
}

}  // namespace

Tensor embed(std::span<const TokenId> ids, const EmbeddingTable& table) {
  if (ids.empty()) fail(ErrorKind::kPrecondition, "embed needs at least one token");
  const std::size_t d = table.dim();
  Tensor out(ids.size(), d);
  for (std::size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] >= table.vocab_size()) {
      fail(ErrorKind::kIndex, "token id " + std::to_string(ids[t]) +
                                  " outside embedding table of " +
                                  std::to_string(table.vocab_size()) + " rows");
    }
    const auto src = table.matrix.row(ids[t]);
    std::copy(src.begin(), src.end(), out.row(t).begin());
  }
  return out;
}

void embed_backward(std::span<const TokenId> ids, const Tensor& d_rows,
                    Tensor& d_table) {
  if (d_rows.rows() != ids.size() || d_rows.cols() != d_table.cols()) {
    fail(ErrorKind::kUsage, "embedding gradient " + d_rows.shape_string() +
                                " does not match the looked-up ids");
  }
  for (std::size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] == kPadId) continue;
    auto dst = d_table.row(ids[t]);
    const auto src = d_rows.row(t);
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
  }
}

LstmParams LstmParams::zeros(std::size_t input_dim, std::size_t units) {
  return {Tensor(4 * units, input_dim), Tensor(4 * units, units), Tensor(4 * units)};
}

LstmResult lstm_forward(const Tensor& x, const LstmParams& p, const Tensor& h0,
                        const Tensor& c0) {
  check_lstm(p);
  const std::size_t u = p.units();
  const std::size_t d = p.input_dim();
  if (x.rank() != 2 || x.cols() != d) {
    fail(ErrorKind::kDimension, "LSTM input " + x.shape_string() + " does not match W " +
                                    p.W.shape_string());
  }
  const std::size_t T = x.rows();

  LstmCache cache;
  cache.x = x;
  cache.h0 = h0.empty() ? Tensor(u) : h0;
  cache.c0 = c0.empty() ? Tensor(u) : c0;
  expect_length(cache.h0, u, "LSTM h0");
  expect_length(cache.c0, u, "LSTM c0");
  cache.gates = Tensor(T, 4 * u);
  cache.cells = Tensor(T, u);
  cache.cell_tanh = Tensor(T, u);
  cache.hidden = Tensor(T, u);

  std::vector<double> z(4 * u);
  for (std::size_t t = 0; t < T; ++t) {
    const double* h_prev = t == 0 ? &cache.h0[0] : &cache.hidden(t - 1, 0);
    const double* c_prev = t == 0 ? &cache.c0[0] : &cache.cells(t - 1, 0);
    const double* xt = &x(t, 0);
    for (std::size_t r = 0; r < 4 * u; ++r) {
      double acc = p.b[r];
      const double* w = &p.W(r, 0);
      for (std::size_t j = 0; j < d; ++j) acc += w[j] * xt[j];
      const double* uu = &p.U(r, 0);
      for (std::size_t j = 0; j < u; ++j) acc += uu[j] * h_prev[j];
      z[r] = acc;
    }
    double* gates = &cache.gates(t, 0);
    for (std::size_t j = 0; j < u; ++j) {
      const double i = sigmoid(z[j]);
      const double f = sigmoid(z[u + j]);
      const double g = std::tanh(z[2 * u + j]);
      const double o = sigmoid(z[3 * u + j]);
      gates[j] = i;
      gates[u + j] = f;
      gates[2 * u + j] = g;
      gates[3 * u + j] = o;
      const double c = f * c_prev[j] + i * g;
      const double tc = std::tanh(c);
      cache.cells(t, j) = c;
      cache.cell_tanh(t, j) = tc;
      cache.hidden(t, j) = o * tc;
    }
  }
  Tensor hidden = cache.hidden;
  return {std::move(hidden), std::move(cache)};
}

Tensor lstm_backward(const LstmCache& cache, const Tensor& d_hidden,
                     const LstmParams& p, LstmParams& grads) {
  if (cache.empty()) fail(ErrorKind::kUsage, "lstm_backward called without a forward cache");
  if (!d_hidden.same_shape(cache.hidden)) {
    fail(ErrorKind::kUsage, "lstm_backward gradient " + d_hidden.shape_string() +
                                " does not match cached hidden " +
                                cache.hidden.shape_string());
  }
  if (!grads.W.same_shape(p.W) || !grads.U.same_shape(p.U) || !grads.b.same_shape(p.b)) {
    fail(ErrorKind::kDimension, "LSTM gradient buffers do not match parameters");
  }
  const std::size_t u = p.units();
  const std::size_t d = p.input_dim();
  const std::size_t T = cache.hidden.rows();

  Tensor dx(T, d);
  std::vector<double> dh_next(u, 0.0), dc_next(u, 0.0), dz(4 * u);
  for (std::size_t step = T; step-- > 0;) {
    const double* gates = &cache.gates(step, 0);
    const double* c_prev = step == 0 ? &cache.c0[0] : &cache.cells(step - 1, 0);
    const double* h_prev = step == 0 ? &cache.h0[0] : &cache.hidden(step - 1, 0);
    for (std::size_t j = 0; j < u; ++j) {
      const double i = gates[j], f = gates[u + j], g = gates[2 * u + j],
                   o = gates[3 * u + j];
      const double tc = cache.cell_tanh(step, j);
      const double dh = d_hidden(step, j) + dh_next[j];
      const double dc = dh * o * (1.0 - tc * tc) + dc_next[j];
      dz[j] = dc * g * i * (1.0 - i);
      dz[u + j] = dc * c_prev[j] * f * (1.0 - f);
      dz[2 * u + j] = dc * i * (1.0 - g * g);
      dz[3 * u + j] = dh * tc * o * (1.0 - o);
      dc_next[j] = dc * f;
    }
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    const double* xt = &cache.x(step, 0);
    double* dxt = &dx(step, 0);
    for (std::size_t r = 0; r < 4 * u; ++r) {
      const double g = dz[r];
      grads.b[r] += g;
      double* gw = &grads.W(r, 0);
      const double* w = &p.W(r, 0);
      for (std::size_t j = 0; j < d; ++j) {
        gw[j] += g * xt[j];
        dxt[j] += g * w[j];
      }
      double* gu = &grads.U(r, 0);
      const double* uu = &p.U(r, 0);
      for (std::size_t j = 0; j < u; ++j) {
        gu[j] += g * h_prev[j];
        dh_next[j] += g * uu[j];
      }
    }
  }
  return dx;
}

Tensor reverse_rows(const Tensor& x) {
  Tensor out = x;
  const std::size_t T = x.rows();
  for (std::size_t t = 0; t < T; ++t) {
    const auto src = x.row(T - 1 - t);
    std::copy(src.begin(), src.end(), out.row(t).begin());
  }
  return out;
}

BiLstmResult bilstm_forward(const Tensor& x, const LstmParams& p_fwd,
                            const LstmParams& p_bwd) {
  if (p_fwd.units() != p_bwd.units()) {
    fail(ErrorKind::kConfig, "Bi-LSTM directions disagree on units: " +
                                 std::to_string(p_fwd.units()) + " vs " +
                                 std::to_string(p_bwd.units()));
  }
  LstmResult fwd = lstm_forward(x, p_fwd);
  LstmResult bwd = lstm_forward(reverse_rows(x), p_bwd);
  const std::size_t T = x.rows(), u = p_fwd.units();
  Tensor hidden(T, 2 * u);
  for (std::size_t t = 0; t < T; ++t) {
    const auto f = fwd.hidden.row(t);
    const auto b = bwd.hidden.row(T - 1 - t);
    auto dst = hidden.row(t);
    std::copy(f.begin(), f.end(), dst.begin());
    std::copy(b.begin(), b.end(), dst.begin() + static_cast<std::ptrdiff_t>(u));
  }
  return {std::move(hidden), std::move(fwd.cache), std::move(bwd.cache)};
}

Tensor bilstm_backward(const BiLstmResult& result, const Tensor& d_hidden,
                       const LstmParams& p_fwd, const LstmParams& p_bwd,
                       LstmParams& g_fwd, LstmParams& g_bwd) {
  if (result.forward.empty() || result.backward.empty()) {
    fail(ErrorKind::kUsage, "bilstm_backward called without a forward cache");
  }
  if (!d_hidden.same_shape(result.hidden)) {
    fail(ErrorKind::kUsage, "bilstm_backward gradient " + d_hidden.shape_string() +
                                " does not match cached hidden " +
                                result.hidden.shape_string());
  }
  const std::size_t T = d_hidden.rows(), u = p_fwd.units();
  Tensor d_fwd(T, u), d_bwd(T, u);
  for (std::size_t t = 0; t < T; ++t) {
    const auto src = d_hidden.row(t);
    std::copy(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(u),
              d_fwd.row(t).begin());
    std::copy(src.begin() + static_cast<std::ptrdiff_t>(u), src.end(),
              d_bwd.row(T - 1 - t).begin());
  }
  Tensor dx = lstm_backward(result.forward, d_fwd, p_fwd, g_fwd);
  const Tensor dx_reversed = lstm_backward(result.backward, d_bwd, p_bwd, g_bwd);
  for (std::size_t t = 0; t < T; ++t) {
    auto dst = dx.row(t);
    const auto src = dx_reversed.row(T - 1 - t);
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
  }
  return dx;
}

AttentionParams AttentionParams::zeros(std::size_t width, std::size_t attention_width) {
  return {Tensor(attention_width, width), Tensor(attention_width), Tensor(attention_width)};
}

AttentionResult self_attention(const Tensor& H, std::span<const std::uint8_t> mask,
                               const AttentionParams& p) {
  if (H.rank() != 2) fail(ErrorKind::kDimension, "attention input must be a matrix, got " + H.shape_string());
  check_attention(p, H.cols());
  const std::size_t T = H.rows(), k = H.cols(), ka = p.W.rows();
  if (mask.size() != T) {
    fail(ErrorKind::kDimension, "attention mask length " + std::to_string(mask.size()) +
                                    " does not match " + std::to_string(T) + " positions");
  }

  AttentionCache cache;
  cache.H = H;
  cache.mask.assign(mask.begin(), mask.end());
  cache.projected = Tensor(T, ka);
  cache.weights = Tensor(T);

  std::vector<double> scores;
  std::vector<std::size_t> live;
  for (std::size_t t = 0; t < T; ++t) {
    if (!mask[t]) continue;
    const double* h = &H(t, 0);
    double score = 0.0;
    for (std::size_t r = 0; r < ka; ++r) {
      double acc = p.b[r];
      const double* w = &p.W(r, 0);
      for (std::size_t j = 0; j < k; ++j) acc += w[j] * h[j];
      const double s = std::tanh(acc);
      cache.projected(t, r) = s;
      score += p.v[r] * s;
    }
    scores.push_back(score);
    live.push_back(t);
  }
  if (live.empty()) fail(ErrorKind::kPrecondition, "self_attention with every position masked");

  const std::vector<double> alpha = softmax(scores);
  Tensor context(k);
  for (std::size_t n = 0; n < live.size(); ++n) {
    const std::size_t t = live[n];
    cache.weights[t] = alpha[n];
    const double* h = &H(t, 0);
    for (std::size_t j = 0; j < k; ++j) context[j] += alpha[n] * h[j];
  }
  Tensor weights = cache.weights;
  return {std::move(context), std::move(weights), std::move(cache)};
}

Tensor attention_backward(const AttentionCache& cache, const Tensor& d_context,
                          const AttentionParams& p, AttentionParams& grads) {
  if (cache.empty()) fail(ErrorKind::kUsage, "attention_backward called without a forward cache");
  const std::size_t T = cache.H.rows(), k = cache.H.cols(), ka = p.W.rows();
  if (d_context.rank() != 1 || d_context.size() != k) {
    fail(ErrorKind::kUsage, "attention_backward gradient " + d_context.shape_string() +
                                " does not match cached width " + std::to_string(k));
  }
  if (!grads.W.same_shape(p.W) || !grads.b.same_shape(p.b) || !grads.v.same_shape(p.v)) {
    fail(ErrorKind::kDimension, "attention gradient buffers do not match parameters");
  }

  Tensor dH(T, k);
  // d loss / d weight_t = d_context . h_t
  std::vector<double> d_alpha(T, 0.0);
  double weighted = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    if (!cache.mask[t]) continue;
    const double a = cache.weights[t];
    const double* h = &cache.H(t, 0);
    double* dh = &dH(t, 0);
    double dot = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      dot += d_context[j] * h[j];
      dh[j] += a * d_context[j];
    }
    d_alpha[t] = dot;
    weighted += a * dot;
  }

  std::vector<double> d_pre(ka);
  for (std::size_t t = 0; t < T; ++t) {
    if (!cache.mask[t]) continue;
    const double d_score = cache.weights[t] * (d_alpha[t] - weighted);
    const double* s = &cache.projected(t, 0);
    for (std::size_t r = 0; r < ka; ++r) {
      grads.v[r] += d_score * s[r];
      d_pre[r] = d_score * p.v[r] * (1.0 - s[r] * s[r]);
      grads.b[r] += d_pre[r];
    }
    const double* h = &cache.H(t, 0);
    double* dh = &dH(t, 0);
    for (std::size_t r = 0; r < ka; ++r) {
      const double g = d_pre[r];
      double* gw = &grads.W(r, 0);
      const double* w = &p.W(r, 0);
      for (std::size_t j = 0; j < k; ++j) {
        gw[j] += g * h[j];
        dh[j] += g * w[j];
      }
    }
  }
  return dH;
}

ClassifierParams ClassifierParams::zeros(std::size_t width, std::size_t classes) {
  return {Tensor(classes, width), Tensor(classes)};
}

ClassifierResult classify(const Tensor& context, const ClassifierParams& p) {
  const std::size_t K = p.W.rows(), k = p.W.cols();
  expect_length(p.b, K, "classifier b");
  if (context.rank() != 1 || context.size() != k) {
    fail(ErrorKind::kDimension, "classifier input " + context.shape_string() +
                                    " does not match W " + p.W.shape_string());
  }
  Tensor logits(K);
  for (std::size_t c = 0; c < K; ++c) {
    double acc = p.b[c];
    const double* w = &p.W(c, 0);
    for (std::size_t j = 0; j < k; ++j) acc += w[j] * context[j];
    logits[c] = acc;
  }
  Tensor probs = softmax(logits);
  return {std::move(logits), std::move(probs)};
}

Tensor classifier_backward(const Tensor& context, const Tensor& d_logits,
                           const ClassifierParams& p, ClassifierParams& grads) {
  const std::size_t K = p.W.rows(), k = p.W.cols();
  if (context.size() != k || d_logits.size() != K) {
    fail(ErrorKind::kUsage, "classifier_backward inputs do not match parameters " +
                                p.W.shape_string());
  }
  Tensor d_context(k);
  for (std::size_t c = 0; c < K; ++c) {
    const double g = d_logits[c];
    grads.b[c] += g;
    double* gw = &grads.W(c, 0);
    const double* w = &p.W(c, 0);
    for (std::size_t j = 0; j < k; ++j) {
      gw[j] += g * context[j];
      d_context[j] += g * w[j];
    }
  }
  return d_context;
}

}  // namespace sanid
