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

#ifndef HYBRIDSE_GEN_SEMANTIC_HPP_
#define HYBRIDSE_GEN_SEMANTIC_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hybridse/error.hpp"
#include "hybridse/nn/layers.hpp"
#include "hybridse/signal/stft.hpp"

namespace hybridse::gen {

inline constexpr int kGenRate = 16000;

// 40 ms / 20 ms framing at 16 kHz: 640-sample window, 320-sample hop. Shared
// by the semantic front end and the spectral-mapping head so that their
// frame grids coincide.
inline StftConfig gen_stft_config() { return StftConfig{40.0, 20.0, WindowType::kHann}; }

inline void require_gen_rate(const Waveform& w, const char* stage) {
  if (w.sample_rate_hz() != kGenRate) {
    throw RateError(std::string(stage) + " expects 16000 Hz audio, got " +
                    std::to_string(w.sample_rate_hz()) + " Hz");
  }
}

// Stand-in for a pretrained self-supervised encoder plus trainable adapter:
// an 80-band log-mel front end followed by a seeded linear adapter.
struct SemanticConfig {
  int n_mels = 80;
  int feat_dim = 64;
  double log_floor = 1e-10;
};

struct SemanticFeatures {
  nn::Matrix features;  // frames x feat_dim
  double frame_hop_ms = 20.0;

  std::size_t frames() const { return features.rows; }
};

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// bins x n_mels triangular filterbank on an HTK mel scale from 0 Hz to
// Nyquist.
inline nn::Matrix mel_filterbank(std::size_t bins, int rate_hz, int n_mels) {
  const double nyq = rate_hz / 2.0;
  const double mel_max = hz_to_mel(nyq);
  std::vector<double> edges(static_cast<std::size_t>(n_mels) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_max * static_cast<double>(i) / static_cast<double>(n_mels + 1));
  }
  nn::Matrix fb(bins, static_cast<std::size_t>(n_mels));
  for (std::size_t k = 0; k < bins; ++k) {
    const double f = nyq * static_cast<double>(k) / static_cast<double>(bins - 1);
    for (int m = 0; m < n_mels; ++m) {
      const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
      double v = 0.0;
      if (f > lo && f <= mid) v = (f - lo) / (mid - lo);
      else if (f > mid && f < hi) v = (hi - f) / (hi - mid);
      fb(k, static_cast<std::size_t>(m)) = v;
    }
  }
  return fb;
}

struct SemanticExtractor {
  SemanticConfig config;
  nn::Matrix filterbank;  // 321 x n_mels
  nn::Linear adapter;     // n_mels -> feat_dim

  static SemanticExtractor init(const SemanticConfig& cfg, std::uint64_t seed) {
    if (cfg.n_mels <= 0 || cfg.feat_dim <= 0) throw ConfigError("SemanticConfig: dims must be positive");
    Rng rng(seed);
    SemanticExtractor s;
    s.config = cfg;
    s.filterbank = mel_filterbank(frame_spec(kGenRate, gen_stft_config()).bins(), kGenRate, cfg.n_mels);
    s.adapter = nn::Linear(static_cast<std::size_t>(cfg.n_mels), static_cast<std::size_t>(cfg.feat_dim), rng);
    return s;
  }

  void collect_params(std::vector<nn::ParamRef>& out) { adapter.collect_params(out, "adapter"); }
};

inline SemanticFeatures extract_semantic(const Waveform& wave16k, const SemanticExtractor& ex) {
  require_gen_rate(wave16k, "extract_semantic");
  const ComplexSpectrogram spec = stft(wave16k, gen_stft_config());
  nn::Matrix power(spec.frames(), spec.bins());
  for (std::size_t t = 0; t < spec.frames(); ++t)
    for (std::size_t k = 0; k < spec.bins(); ++k) power(t, k) = std::norm(spec(t, k));
  nn::Matrix mel = nn::matmul(power, ex.filterbank);
  for (double& v : mel.data) v = std::log(std::max(v, ex.config.log_floor));
  return SemanticFeatures{ex.adapter(mel), 20.0};
}

}  // namespace hybridse::gen

#endif  // HYBRIDSE_GEN_SEMANTIC_HPP_
