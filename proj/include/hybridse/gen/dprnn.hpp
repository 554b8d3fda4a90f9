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

#ifndef HYBRIDSE_GEN_DPRNN_HPP_
#define HYBRIDSE_GEN_DPRNN_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hybridse/error.hpp"
#include "hybridse/gen/semantic.hpp"
#include "hybridse/nn/layers.hpp"
#include "hybridse/nn/tensor3.hpp"
#include "hybridse/signal/stft.hpp"

namespace hybridse::gen {

struct DprnnConfig {
  int window_samples = 640;
  int hop_samples = 320;
  int num_blocks = 2;
  int channels = 32;
  int downsample_convs = 2;  // each halves the frequency axis (kernel 3, stride 2)
  int lm_dim = 64;
  double mask_bound = 2.0;

  int freq_downsample_factor() const { return 1 << downsample_convs; }

  void validate() const {
    if (window_samples != 640 || hop_samples != 320) {
      throw ConfigError("DprnnConfig: the spectral head runs on a 640/320 STFT at 16 kHz");
    }
    if (num_blocks <= 0 || channels <= 1 || channels % 2 != 0 || downsample_convs <= 0 || lm_dim <= 0) {
      throw ConfigError("DprnnConfig: invalid dimensions");
    }
    if (!(mask_bound > 0.0)) throw ConfigError("DprnnConfig: mask_bound must be positive");
  }
};

// Intra-frame BiLSTM across (downsampled) frequency, inter-frame LSTM across
// time, then cross attention with DPRNN features as queries and LM hidden
// states as keys and values. Each stage is residual.
struct DualPathBlock {
  nn::LayerNorm intra_norm;
  nn::LstmParams intra_fwd, intra_bwd;  // C -> C/2 each way
  nn::Linear intra_proj;                // C -> C
  nn::LayerNorm inter_norm;
  nn::LstmParams inter;                 // C -> C
  nn::Linear inter_proj;
  nn::LayerNorm attn_norm;
  nn::Linear query, key, value, out;    // C->C, lm->C, lm->C, C->C

  DualPathBlock() = default;
  DualPathBlock(std::size_t c, std::size_t lm_dim, Rng& rng)
      : intra_norm(c), intra_fwd(c, c / 2, rng), intra_bwd(c, c / 2, rng), intra_proj(c, c, rng),
        inter_norm(c), inter(c, c, rng), inter_proj(c, c, rng), attn_norm(c),
        query(c, c, rng), key(lm_dim, c, rng), value(lm_dim, c, rng), out(c, c, rng) {}

  void collect_params(std::vector<nn::ParamRef>& o, const std::string& p) {
    intra_norm.collect_params(o, p + ".intra_norm");
    intra_fwd.collect_params(o, p + ".intra_fwd");
    intra_bwd.collect_params(o, p + ".intra_bwd");
    intra_proj.collect_params(o, p + ".intra_proj");
    inter_norm.collect_params(o, p + ".inter_norm");
    inter.collect_params(o, p + ".inter");
    inter_proj.collect_params(o, p + ".inter_proj");
    attn_norm.collect_params(o, p + ".attn_norm");
    query.collect_params(o, p + ".query");
    key.collect_params(o, p + ".key");
    value.collect_params(o, p + ".value");
    out.collect_params(o, p + ".out");
  }
};

struct DprnnModel {
  DprnnConfig config;
  std::vector<nn::Conv1d> encoder;            // 3 -> ... -> C along frequency
  std::vector<DualPathBlock> blocks;
  std::vector<nn::ConvTranspose1d> decoder;   // C -> ... -> 2

  static DprnnModel init(const DprnnConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);
    DprnnModel m;
    m.config = cfg;
    const auto c = static_cast<std::size_t>(cfg.channels);
    std::vector<std::size_t> widths{3};
    for (int i = 1; i < cfg.downsample_convs; ++i) widths.push_back(std::max<std::size_t>(4, c >> (cfg.downsample_convs - i)));
    widths.push_back(c);
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) m.encoder.emplace_back(widths[i], widths[i + 1], 3, 2, 1, rng);
    for (int b = 0; b < cfg.num_blocks; ++b) m.blocks.emplace_back(c, static_cast<std::size_t>(cfg.lm_dim), rng);
    for (std::size_t i = widths.size() - 1; i > 0; --i) {
      const std::size_t to = i == 1 ? 2 : widths[i - 1];
      m.decoder.emplace_back(widths[i], to, 3, 2, 1, rng);
    }
    return m;
  }

  void zero_decoder() {
    for (auto& d : decoder) d.zero();
  }

  void collect_params(std::vector<nn::ParamRef>& o) {
    for (std::size_t i = 0; i < encoder.size(); ++i) encoder[i].collect_params(o, "encoder" + std::to_string(i));
    for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].collect_params(o, "block" + std::to_string(i));
    for (std::size_t i = 0; i < decoder.size(); ++i) decoder[i].collect_params(o, "decoder" + std::to_string(i));
  }
};

// Attention read-out before the output projection: one row per query, each a
// convex combination of value(lm_hidden) rows.
inline nn::Matrix cross_attend(const nn::Matrix& queries_in, const nn::Matrix& lm_hidden,
                               const DualPathBlock& block) {
  const nn::Matrix q = block.query(block.attn_norm(queries_in));
  const nn::Matrix k = block.key(lm_hidden);
  const nn::Matrix v = block.value(lm_hidden);
  return nn::scaled_dot_attention(q, k, v);
}

inline nn::Tensor3 dual_path_block(const nn::Tensor3& features, const nn::Matrix& lm_hidden,
                                   const DualPathBlock& block) {
  nn::Tensor3 x = features;
  for (std::size_t t = 0; t < x.frames; ++t) {
    const nn::Matrix seq = block.intra_norm(x.frame(t));
    x.add_to_frame(t, block.intra_proj(nn::bilstm_forward(seq, block.intra_fwd, block.intra_bwd)));
  }
  for (std::size_t f = 0; f < x.bins; ++f) {
    const nn::Matrix seq = block.inter_norm(x.bin(f));
    x.add_to_bin(f, block.inter_proj(nn::lstm_forward(seq, block.inter)));
  }
  const nn::Matrix attended = block.out(cross_attend(x.flatten(), lm_hidden, block));
  for (std::size_t i = 0; i < x.data.size(); ++i) x.data[i] += attended.data[i];
  return x;
}

// Scales (a, b) to magnitude bound * tanh(|(a, b)|), keeping its direction.
inline cplx bounded_mask(double a, double b, double bound) {
  const double r = std::hypot(a, b);
  if (r == 0.0) return {0.0, 0.0};
  const double s = bound * std::tanh(r) / r;
  cplx m(a * s, b * s);
  // tanh saturates to 1 for large r; keep the rounded magnitude within bound.
  while (std::abs(m) > bound) m *= std::nextafter(bound / std::abs(m), 0.0);
  return m;
}

inline ComplexSpectrogram dprnn_refine(const ComplexSpectrogram& degraded, const nn::Matrix& lm_hidden,
                                       const DprnnModel& model) {
  if (degraded.sample_rate_hz() != kGenRate || !(degraded.config() == gen_stft_config())) {
    throw ConfigError("dprnn_refine: expects a 640/320 spectrogram at 16000 Hz");
  }
  if (lm_hidden.rows != degraded.frames()) {
    throw AlignmentError("dprnn_refine: LM hidden has " + std::to_string(lm_hidden.rows) +
                         " frames but the spectrogram has " + std::to_string(degraded.frames()));
  }
  if (lm_hidden.cols != static_cast<std::size_t>(model.config.lm_dim)) {
    throw ShapeError("dprnn_refine: LM hidden width does not match model");
  }
  const std::size_t frames = degraded.frames();
  const std::size_t bins = degraded.bins();

  // Encoder: (|Y|, Re Y, Im Y) per bin, strided convolutions along frequency.
  std::vector<nn::Matrix> per_frame(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    nn::Matrix x(bins, 3);
    for (std::size_t k = 0; k < bins; ++k) {
      const cplx y = degraded(t, k);
      x(k, 0) = std::abs(y);
      x(k, 1) = y.real();
      x(k, 2) = y.imag();
    }
    for (const auto& conv : model.encoder) {
      x = conv(x);
      for (double& v : x.data) v = std::tanh(v);
    }
    per_frame[t] = std::move(x);
  }
  const std::size_t reduced = per_frame.front().rows;
  nn::Tensor3 feat(frames, reduced, static_cast<std::size_t>(model.config.channels));
  for (std::size_t t = 0; t < frames; ++t) feat.set_frame(t, per_frame[t]);

  for (const auto& block : model.blocks) feat = dual_path_block(feat, lm_hidden, block);

  CMatrix out(frames, bins);
  for (std::size_t t = 0; t < frames; ++t) {
    nn::Matrix x = feat.frame(t);
    for (std::size_t i = 0; i < model.decoder.size(); ++i) {
      x = model.decoder[i](x);
      if (i + 1 < model.decoder.size()) {
        for (double& v : x.data) v = std::tanh(v);
      }
    }
    if (x.rows != bins) {
      throw ShapeError("dprnn_refine: decoder produced " + std::to_string(x.rows) + " bins, expected " +
                       std::to_string(bins));
    }
    for (std::size_t k = 0; k < bins; ++k) {
      out(t, k) = bounded_mask(x(k, 0), x(k, 1), model.config.mask_bound) * degraded(t, k);
    }
  }
  return degraded.with_data(std::move(out));
}

}  // namespace hybridse::gen

#endif  // HYBRIDSE_GEN_DPRNN_HPP_
