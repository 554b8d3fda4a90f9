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

#ifndef HYBRIDSE_FUSION_HYBRID_HPP_
#define HYBRIDSE_FUSION_HYBRID_HPP_

#include <cstdint>
#include <optional>

#include "hybridse/disc/gridnet.hpp"
#include "hybridse/fusion/fusion.hpp"
#include "hybridse/fusion/fusion_net.hpp"
#include "hybridse/gen/gen_branch.hpp"
#include "hybridse/rng.hpp"
#include "hybridse/signal/resample.hpp"
#include "hybridse/signal/stft.hpp"

namespace hybridse::fusion {

struct HybridConfig {
  StftConfig stft;
  disc::GridNetConfig disc;
  gen::GenConfig gen;
  std::size_t fusion_hidden = 16;
};

struct HybridModels {
  StftConfig stft;
  disc::GridNetModel disc;
  gen::GenModels gen;
  FusionNet fusion;

  static HybridModels init(const HybridConfig& cfg, std::uint64_t seed) {
    return HybridModels{cfg.stft, disc::GridNetModel::init(cfg.disc, derive_seed(seed, "disc")),
                        gen::GenModels::init(cfg.gen, derive_seed(seed, "gen")),
                        FusionNet::init(cfg.fusion_hidden, derive_seed(seed, "fusion"))};
  }
};

struct HybridOptions {
  // Replaces the estimated mask by a constant (1 = discriminative only).
  std::optional<double> forced_mask;
};

struct HybridTrace {
  ComplexSpectrogram disc;
  ComplexSpectrogram gen;  // generative output resampled and re-analysed at the native rate
  FusionMask mask;
  ComplexSpectrogram fused;
  Waveform output;
};

inline ComplexSpectrogram disc_spectrum(const Waveform& wave, const HybridModels& models) {
  return disc::disc_enhance(stft(wave, models.stft), models.disc);
}

// The generative branch's 16 kHz output brought onto the native-rate STFT
// grid of `wave`.
inline ComplexSpectrogram gen_spectrum_native(const Waveform& wave, const HybridModels& models) {
  const Waveform g16 = gen::gen_enhance(wave, models.gen);
  const Waveform native = resample(g16, wave.sample_rate_hz());
  return stft(Waveform(fit_length(native.samples(), wave.size()), wave.sample_rate_hz()), models.stft);
}

inline HybridTrace hybrid_trace(const Waveform& wave, const HybridModels& models, const HybridOptions& opt = {}) {
  ComplexSpectrogram d = disc_spectrum(wave, models);
  ComplexSpectrogram g = gen_spectrum_native(wave, models);
  FusionMask m = opt.forced_mask ? FusionMask::constant(d.frames(), d.bins(), *opt.forced_mask)
                                 : estimate_mask(d, g, models.fusion);
  ComplexSpectrogram f = fuse(d, g, m);
  Waveform out = istft(f);
  return HybridTrace{std::move(d), std::move(g), std::move(m), std::move(f), std::move(out)};
}

inline Waveform hybrid_enhance(const Waveform& wave, const HybridModels& models, const HybridOptions& opt = {}) {
  return hybrid_trace(wave, models, opt).output;
}

inline Waveform disc_only_enhance(const Waveform& wave, const HybridModels& models) {
  return istft(disc_spectrum(wave, models));
}

}  // namespace hybridse::fusion

#endif  // HYBRIDSE_FUSION_HYBRID_HPP_
