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

#ifndef HYBRIDSE_DISC_GRIDNET_HPP_
#define HYBRIDSE_DISC_GRIDNET_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "hybridse/error.hpp"
#include "hybridse/nn/layers.hpp"
#include "hybridse/nn/tensor3.hpp"
#include "hybridse/rng.hpp"
#include "hybridse/signal/stft.hpp"

namespace hybridse::disc {

// Desk-scale defaults. The full-size system uses 8 blocks, embedding 64 and
// LSTM hidden 256 (see full_scale()).
struct GridNetConfig {
  int num_blocks = 2;
  int embed_dim = 16;
  int lstm_hidden = 32;

  static GridNetConfig full_scale() { return {8, 64, 256}; }

  void validate() const {
    if (num_blocks <= 0 || embed_dim <= 0 || lstm_hidden <= 0) {
      throw ConfigError("GridNetConfig: all dimensions must be positive");
    }
  }
};

// One grid block: a bidirectional LSTM across frequency inside each frame,
// then a unidirectional LSTM across time inside each bin. Each pass is
// projected back to the embedding width and added to its input.
struct GridBlock {
  nn::LayerNorm intra_norm;
  nn::LstmParams intra_fwd, intra_bwd;
  nn::Linear intra_proj;  // 2H -> E
  nn::LayerNorm inter_norm;
  nn::LstmParams inter;
  nn::Linear inter_proj;  // H -> E

  GridBlock() = default;
  GridBlock(std::size_t e, std::size_t h, Rng& rng)
      : intra_norm(e), intra_fwd(e, h, rng), intra_bwd(e, h, rng), intra_proj(2 * h, e, rng),
        inter_norm(e), inter(e, h, rng), inter_proj(h, e, rng) {}

  void collect_params(std::vector<nn::ParamRef>& out, const std::string& prefix) {
    intra_norm.collect_params(out, prefix + ".intra_norm");
    intra_fwd.collect_params(out, prefix + ".intra_fwd");
    intra_bwd.collect_params(out, prefix + ".intra_bwd");
    intra_proj.collect_params(out, prefix + ".intra_proj");
    inter_norm.collect_params(out, prefix + ".inter_norm");
    inter.collect_params(out, prefix + ".inter");
    inter_proj.collect_params(out, prefix + ".inter_proj");
  }
};

inline nn::Tensor3 grid_block(const nn::Tensor3& features, const GridBlock& block) {
  if (features.channels != block.intra_norm.gamma.size()) {
    throw ShapeError("grid_block: feature width " + std::to_string(features.channels) +
                     " does not match block embedding " +
                     std::to_string(block.intra_norm.gamma.size()));
  }
  nn::Tensor3 x = features;
  for (std::size_t t = 0; t < x.frames; ++t) {
    const nn::Matrix seq = block.intra_norm(x.frame(t));
    x.add_to_frame(t, block.intra_proj(nn::bilstm_forward(seq, block.intra_fwd, block.intra_bwd)));
  }
  for (std::size_t f = 0; f < x.bins; ++f) {
    const nn::Matrix seq = block.inter_norm(x.bin(f));
    x.add_to_bin(f, block.inter_proj(nn::lstm_forward(seq, block.inter)));
  }
  return x;
}

// Per-bin (Re, Im) -> embedding, a stack of grid blocks, and a bias-free
// 2-channel read-out of what the blocks added on top of the embedding. The
// read-out is added to the input spectrum, so with zeroed block projections
// the model is exactly the identity.
struct GridNetModel {
  GridNetConfig config;
  nn::Linear embed;  // 2 -> E
  std::vector<GridBlock> blocks;
  nn::Matrix deproject;  // E x 2

  static GridNetModel init(const GridNetConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);
    GridNetModel m;
    m.config = cfg;
    const auto e = static_cast<std::size_t>(cfg.embed_dim);
    const auto h = static_cast<std::size_t>(cfg.lstm_hidden);
    m.embed = nn::Linear(2, e, rng);
    for (int b = 0; b < cfg.num_blocks; ++b) m.blocks.emplace_back(e, h, rng);
    m.deproject = nn::Matrix::uniform_init(e, 2, e, rng);
    return m;
  }

  void zero_block_projections() {
    for (auto& b : blocks) {
      b.intra_proj.zero();
      b.inter_proj.zero();
    }
  }

  void collect_params(std::vector<nn::ParamRef>& out) {
    embed.collect_params(out, "embed");
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      blocks[b].collect_params(out, "block" + std::to_string(b));
    }
    nn::add_param(out, "deproject", deproject);
  }
};

inline ComplexSpectrogram disc_enhance(const ComplexSpectrogram& spec, const GridNetModel& model) {
  const CMatrix& y = spec.data();
  const std::size_t e = static_cast<std::size_t>(model.config.embed_dim);
  nn::Matrix ri(y.rows * y.cols, 2);
  for (std::size_t i = 0; i < y.data.size(); ++i) {
    if (!std::isfinite(y.data[i].real()) || !std::isfinite(y.data[i].imag())) {
      throw DataError("disc_enhance: non-finite input spectrum");
    }
    ri(i, 0) = y.data[i].real();
    ri(i, 1) = y.data[i].imag();
  }
  const nn::Tensor3 z0 = nn::Tensor3::from_flat(model.embed(ri), y.rows, y.cols);
  nn::Tensor3 z = z0;
  for (const auto& block : model.blocks) z = grid_block(z, block);

  CMatrix out = y;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    double dr = 0.0, di = 0.0;
    for (std::size_t c = 0; c < e; ++c) {
      const double delta = z.data[i * e + c] - z0.data[i * e + c];
      dr += delta * model.deproject(c, 0);
      di += delta * model.deproject(c, 1);
    }
    out.data[i] += cplx(dr, di);
  }
  return spec.with_data(std::move(out));
}

}  // namespace hybridse::disc

#endif  // HYBRIDSE_DISC_GRIDNET_HPP_
