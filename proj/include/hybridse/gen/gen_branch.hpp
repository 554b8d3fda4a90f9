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

#ifndef HYBRIDSE_GEN_GEN_BRANCH_HPP_
#define HYBRIDSE_GEN_GEN_BRANCH_HPP_

#include <cstdint>

#include "hybridse/gen/ar_lm.hpp"
#include "hybridse/gen/dprnn.hpp"
#include "hybridse/gen/quantizer.hpp"
#include "hybridse/gen/semantic.hpp"
#include "hybridse/nn/layers.hpp"
#include "hybridse/rng.hpp"
#include "hybridse/signal/resample.hpp"

namespace hybridse::gen {

struct GenConfig {
  SemanticConfig semantic;
  int code_dim = 16;
  ArLmConfig lm;
  DprnnConfig dprnn;

  void validate() const {
    lm.validate();
    dprnn.validate();
    if (lm.prefix_dim != semantic.feat_dim) throw ConfigError("GenConfig: LM prefix width must equal feat_dim");
    if (dprnn.lm_dim != lm.hidden_dim) throw ConfigError("GenConfig: DPRNN lm_dim must equal LM hidden_dim");
    if (code_dim <= 0) throw ConfigError("GenConfig: code_dim must be positive");
  }
};

struct GenModels {
  SemanticExtractor semantic;
  TokenQuantizer quantizer;
  ArLm lm;
  DprnnModel dprnn;

  static GenModels init(const GenConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    return GenModels{SemanticExtractor::init(cfg.semantic, derive_seed(seed, "semantic")),
                     TokenQuantizer::init(cfg.semantic.feat_dim, cfg.code_dim, cfg.lm.codebook_size,
                                          derive_seed(seed, "quantizer")),
                     ArLm::init(cfg.lm, derive_seed(seed, "lm")),
                     DprnnModel::init(cfg.dprnn, derive_seed(seed, "dprnn"))};
  }

  void collect_params(std::vector<nn::ParamRef>& out) {
    auto scoped = [&out](auto& part, const std::string& prefix) {
      std::vector<nn::ParamRef> refs;
      part.collect_params(refs);
      for (auto& r : refs) {
        r.name = prefix + "." + r.name;
        out.push_back(std::move(r));
      }
    };
    scoped(semantic, "semantic");
    scoped(quantizer, "quantizer");
    scoped(lm, "lm");
    scoped(dprnn, "dprnn");
  }
};

struct GenTrace {
  SemanticFeatures semantic;
  DecodeResult decoded;
  ComplexSpectrogram refined;
};

// Frame-alignment contract: 20 ms semantic hop == 320-sample STFT hop.
inline void assert_frame_alignment(const SemanticFeatures& sem, const ComplexSpectrogram& spec) {
  if (sem.frames() != spec.frames()) {
    throw AlignmentError("semantic features have " + std::to_string(sem.frames()) +
                         " frames, spectral head expects " + std::to_string(spec.frames()));
  }
}

// Runs the generative branch on 16 kHz audio and keeps the intermediates.
inline GenTrace gen_trace(const Waveform& wave16k, const GenModels& models) {
  require_gen_rate(wave16k, "gen_branch");
  SemanticFeatures sem = extract_semantic(wave16k, models.semantic);
  const ComplexSpectrogram spec = stft(wave16k, gen_stft_config());
  assert_frame_alignment(sem, spec);
  DecodeResult decoded = ar_decode(sem, models.lm, sem.frames());
  ComplexSpectrogram refined = dprnn_refine(spec, decoded.hidden, models.dprnn);
  return GenTrace{std::move(sem), std::move(decoded), std::move(refined)};
}

// Any supported rate in, 16 kHz out.
inline Waveform gen_enhance(const Waveform& wave, const GenModels& models) {
  const Waveform w16 = resample(wave, kGenRate);
  return istft(gen_trace(w16, models).refined);
}

}  // namespace hybridse::gen

#endif  // HYBRIDSE_GEN_GEN_BRANCH_HPP_
