// Copyright 2026 The hybridse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HYBRIDSE_GEN_AR_LM_HPP_
#define HYBRIDSE_GEN_AR_LM_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hybridse/error.hpp"
#include "hybridse/gen/quantizer.hpp"
#include "hybridse/gen/semantic.hpp"
#include "hybridse/nn/layers.hpp"

namespace hybridse::gen {

// Decoder-only LM over codec tokens, conditioned on a continuous prefix.
// Full size: 12 layers, width 512.
struct ArLmConfig {
  int num_layers = 2;
  int hidden_dim = 64;
  int num_heads = 4;
  int ffn_dim = 128;
  int codebook_size = 256;
  int prefix_dim = 64;

  int vocab() const { return codebook_size + 1; }
  int bos_id() const { return codebook_size; }

  void validate() const {
    if (num_layers <= 0 || hidden_dim <= 0 || num_heads <= 0 || ffn_dim <= 0 ||
        codebook_size <= 0 || prefix_dim <= 0) {
      throw ConfigError("ArLmConfig: all dimensions must be positive");
    }
    if (hidden_dim % num_heads != 0) {
      throw ConfigError("ArLmConfig: hidden_dim " + std::to_string(hidden_dim) +
                        " is not divisible by num_heads " + std::to_string(num_heads));
    }
  }
};

// Pre-norm block: x += attn(rms(x)); x += swiglu(rms(x)).
struct LmLayer {
  std::vector<double> attn_gain, ffn_gain;
  nn::Matrix wq, wk, wv, wo;   // D x D
  nn::Matrix w_gate, w_up;     // D x F
  nn::Matrix w_down;           // F x D

  LmLayer() = default;
  LmLayer(std::size_t d, std::size_t f, Rng& rng)
      : attn_gain(d, 1.0), ffn_gain(d, 1.0),
        wq(nn::Matrix::uniform_init(d, d, d, rng)), wk(nn::Matrix::uniform_init(d, d, d, rng)),
        wv(nn::Matrix::uniform_init(d, d, d, rng)), wo(nn::Matrix::uniform_init(d, d, d, rng)),
        w_gate(nn::Matrix::uniform_init(d, f, d, rng)), w_up(nn::Matrix::uniform_init(d, f, d, rng)),
        w_down(nn::Matrix::uniform_init(f, d, f, rng)) {}

  void collect_params(std::vector<nn::ParamRef>& out, const std::string& p) {
    nn::add_param(out, p + ".attn_gain", attn_gain);
    nn::add_param(out, p + ".ffn_gain", ffn_gain);
    nn::add_param(out, p + ".wq", wq);
    nn::add_param(out, p + ".wk", wk);
    nn::add_param(out, p + ".wv", wv);
    nn::add_param(out, p + ".wo", wo);
    nn::add_param(out, p + ".w_gate", w_gate);
    nn::add_param(out, p + ".w_up", w_up);
    nn::add_param(out, p + ".w_down", w_down);
  }
};

struct ArLm {
  ArLmConfig config;
  nn::Linear prefix_proj;     // prefix_dim -> D
  nn::Matrix token_embedding; // vocab x D
  std::vector<LmLayer> layers;
  std::vector<double> final_gain;
  nn::Linear head;            // D -> codebook_size

  static ArLm init(const ArLmConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);
    const auto d = static_cast<std::size_t>(cfg.hidden_dim);
    ArLm lm;
    lm.config = cfg;
    lm.prefix_proj = nn::Linear(static_cast<std::size_t>(cfg.prefix_dim), d, rng);
    lm.token_embedding = nn::Matrix::uniform_init(static_cast<std::size_t>(cfg.vocab()), d, 1, rng);
    for (int l = 0; l < cfg.num_layers; ++l) lm.layers.emplace_back(d, static_cast<std::size_t>(cfg.ffn_dim), rng);
    lm.final_gain.assign(d, 1.0);
    lm.head = nn::Linear(d, static_cast<std::size_t>(cfg.codebook_size), rng);
    return lm;
  }

  void collect_params(std::vector<nn::ParamRef>& out) {
    prefix_proj.collect_params(out, "prefix_proj");
    nn::add_param(out, "token_embedding", token_embedding);
    for (std::size_t l = 0; l < layers.size(); ++l) layers[l].collect_params(out, "layer" + std::to_string(l));
    nn::add_param(out, "final_gain", final_gain);
    head.collect_params(out, "head");
  }
};

// Keys and values of all positions seen so far, per layer.
struct KvCache {
  std::vector<nn::Matrix> keys, values;  // each grows by one row per step
  std::size_t length = 0;
};

namespace detail {

inline std::vector<double> sinusoid_position(std::size_t pos, std::size_t d) {
  std::vector<double> pe(d);
  for (std::size_t i = 0; i < d; i += 2) {
    const double freq = std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(d));
    pe[i] = std::sin(static_cast<double>(pos) * freq);
    if (i + 1 < d) pe[i + 1] = std::cos(static_cast<double>(pos) * freq);
  }
  return pe;
}

inline void append_row(nn::Matrix& m, std::span<const double> row) {
  if (m.rows == 0) m.cols = row.size();
  m.data.insert(m.data.end(), row.begin(), row.end());
  ++m.rows;
}

inline std::vector<double> row_times(std::span<const double> x, const nn::Matrix& w) {
  std::vector<double> y(w.cols, 0.0);
  nn::vec_mat_accumulate(x, w, y);
  return y;
}

inline std::vector<double> rms(std::span<const double> x, std::span<const double> gain) {
  nn::Matrix m(1, x.size(), std::vector<double>(x.begin(), x.end()));
  return nn::rms_norm(m, gain).data;
}

}  // namespace detail

// Runs one position through the stack, extending the cache. Returns the
// final-normalized hidden state of that position. Every forward path (prefix
// consumption, greedy decoding, teacher forcing) goes through this function,
// so they agree bit for bit.
inline std::vector<double> lm_step(const ArLm& lm, std::span<const double> input, KvCache& cache) {
  const auto d = static_cast<std::size_t>(lm.config.hidden_dim);
  const auto heads = static_cast<std::size_t>(lm.config.num_heads);
  const std::size_t hd = d / heads;
  nn::require(input.size() == d, "lm_step: input width mismatch");
  if (cache.keys.empty()) {
    cache.keys.resize(lm.layers.size());
    cache.values.resize(lm.layers.size());
  }
  auto pe = detail::sinusoid_position(cache.length, d);
  std::vector<double> x(input.begin(), input.end());
  for (std::size_t i = 0; i < d; ++i) x[i] += pe[i];

  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));
  for (std::size_t l = 0; l < lm.layers.size(); ++l) {
    const LmLayer& layer = lm.layers[l];
    const auto xn = detail::rms(x, layer.attn_gain);
    const auto q = detail::row_times(xn, layer.wq);
    detail::append_row(cache.keys[l], detail::row_times(xn, layer.wk));
    detail::append_row(cache.values[l], detail::row_times(xn, layer.wv));
    const nn::Matrix& keys = cache.keys[l];
    const nn::Matrix& vals = cache.values[l];
    std::vector<double> attn(d, 0.0), scores(keys.rows);
    for (std::size_t h = 0; h < heads; ++h) {
      const std::size_t off = h * hd;
      for (std::size_t j = 0; j < keys.rows; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < hd; ++c) s += q[off + c] * keys(j, off + c);
        scores[j] = s * scale;
      }
      nn::softmax_inplace(scores);
      for (std::size_t j = 0; j < keys.rows; ++j) {
        for (std::size_t c = 0; c < hd; ++c) attn[off + c] += scores[j] * vals(j, off + c);
      }
    }
    const auto attn_out = detail::row_times(attn, layer.wo);
    for (std::size_t i = 0; i < d; ++i) x[i] += attn_out[i];

    const auto hn = detail::rms(x, layer.ffn_gain);
    auto gate = detail::row_times(hn, layer.w_gate);
    const auto up = detail::row_times(hn, layer.w_up);
    for (std::size_t i = 0; i < gate.size(); ++i) gate[i] = gate[i] * nn::sigmoid(gate[i]) * up[i];
    const auto down = detail::row_times(gate, layer.w_down);
    for (std::size_t i = 0; i < d; ++i) x[i] += down[i];
  }
  ++cache.length;
  return detail::rms(x, lm.final_gain);
}

inline std::vector<double> prefix_input(const ArLm& lm, std::span<const double> feature) {
  nn::require(feature.size() == lm.prefix_proj.in_dim(),
              "ar lm: prefix width " + std::to_string(feature.size()) + " does not match " +
                  std::to_string(lm.prefix_proj.in_dim()));
  std::vector<double> y(lm.prefix_proj.bias);
  nn::vec_mat_accumulate(feature, lm.prefix_proj.weight, y);
  return y;
}

inline std::vector<double> token_input(const ArLm& lm, int id) {
  if (id < 0 || id >= lm.config.vocab()) throw IndexError("ar lm: token id out of range");
  auto r = lm.token_embedding.row(static_cast<std::size_t>(id));
  return {r.begin(), r.end()};
}

inline std::vector<double> head_logits(const ArLm& lm, std::span<const double> hidden) {
  std::vector<double> y(lm.head.bias);
  nn::vec_mat_accumulate(hidden, lm.head.weight, y);
  return y;
}

// Hidden states for an arbitrary input-embedding sequence (T x D) under the
// causal stack.
inline nn::Matrix lm_forward_embeddings(const ArLm& lm, const nn::Matrix& inputs) {
  KvCache cache;
  nn::Matrix out(inputs.rows, static_cast<std::size_t>(lm.config.hidden_dim));
  for (std::size_t t = 0; t < inputs.rows; ++t) {
    const auto h = lm_step(lm, inputs.row(t), cache);
    std::copy(h.begin(), h.end(), out.row(t).begin());
  }
  return out;
}

struct DecodeResult {
  TokenSequence tokens;
  nn::Matrix hidden;  // max_len x D, last-layer state at each generated position
  nn::Matrix logits;  // max_len x codebook_size
};

namespace detail {

inline void consume_prefix(const ArLm& lm, const SemanticFeatures& prefix, KvCache& cache) {
  if (prefix.frames() == 0) throw ShapeError("ar lm: empty prefix");
  for (std::size_t t = 0; t < prefix.frames(); ++t) {
    lm_step(lm, prefix_input(lm, prefix.features.row(t)), cache);
  }
}

}  // namespace detail

// Greedy decoding: the first generated position sees the whole prefix and a
// BOS token; each later position sees the previous argmax token.
inline DecodeResult ar_decode(const SemanticFeatures& prefix, const ArLm& lm, std::size_t max_len) {
  KvCache cache;
  detail::consume_prefix(lm, prefix, cache);
  const auto d = static_cast<std::size_t>(lm.config.hidden_dim);
  DecodeResult res{TokenSequence{{}, lm.config.codebook_size}, nn::Matrix(max_len, d),
                   nn::Matrix(max_len, static_cast<std::size_t>(lm.config.codebook_size))};
  std::vector<double> input = token_input(lm, lm.config.bos_id());
  for (std::size_t j = 0; j < max_len; ++j) {
    const auto h = lm_step(lm, input, cache);
    std::copy(h.begin(), h.end(), res.hidden.row(j).begin());
    const auto z = head_logits(lm, h);
    std::copy(z.begin(), z.end(), res.logits.row(j).begin());
    const int tok = static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
    res.tokens.ids.push_back(tok);
    input = token_input(lm, tok);
  }
  return res;
}

// Teacher-forced logits and hidden states for a known continuation.
inline DecodeResult teacher_forced(const SemanticFeatures& prefix, const ArLm& lm,
                                   const TokenSequence& targets) {
  targets.validate();
  if (targets.codebook_size != lm.config.codebook_size) {
    throw ShapeError("ar lm: target codebook size differs from model");
  }
  KvCache cache;
  detail::consume_prefix(lm, prefix, cache);
  const std::size_t n = targets.size();
  const auto d = static_cast<std::size_t>(lm.config.hidden_dim);
  DecodeResult res{targets, nn::Matrix(n, d),
                   nn::Matrix(n, static_cast<std::size_t>(lm.config.codebook_size))};
  std::vector<double> input = token_input(lm, lm.config.bos_id());
  for (std::size_t j = 0; j < n; ++j) {
    const auto h = lm_step(lm, input, cache);
    std::copy(h.begin(), h.end(), res.hidden.row(j).begin());
    const auto z = head_logits(lm, h);
    std::copy(z.begin(), z.end(), res.logits.row(j).begin());
    input = token_input(lm, targets.ids[j]);
  }
  return res;
}

}  // namespace hybridse::gen

#endif  // HYBRIDSE_GEN_AR_LM_HPP_
