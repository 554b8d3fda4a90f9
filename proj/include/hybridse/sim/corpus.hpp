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

#ifndef HYBRIDSE_SIM_CORPUS_HPP_
#define HYBRIDSE_SIM_CORPUS_HPP_

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <iterator>
#include <numbers>
#include <string>
#include <vector>

#include "hybridse/rng.hpp"
#include "hybridse/signal/waveform.hpp"

namespace hybridse::sim {

// Voiced, speech-like test signal: a gliding harmonic source (f0 around
// 100-220 Hz) shaped by three formant resonances and a 4 Hz syllable
// envelope, plus a faint noise floor. Peak level stays under 0.5.
inline Waveform synth_utterance(int rate_hz, double duration_s, std::uint64_t seed) {
  require_supported_rate(rate_hz);
  Rng rng(seed);
  const auto n = static_cast<std::size_t>(std::llround(duration_s * rate_hz));
  const double f0_base = rng.uniform(100.0, 220.0);
  const double glide = rng.uniform(-0.25, 0.25);
  const double formants[3] = {rng.uniform(450.0, 800.0), rng.uniform(1000.0, 1800.0), rng.uniform(2200.0, 3200.0)};
  const double syllable_hz = rng.uniform(3.0, 5.0);
  const double nyq = rate_hz / 2.0;
  std::vector<double> x(n, 0.0);
  double phase = 0.0;
  Rng noise(derive_seed(seed, "floor"));
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate_hz;
    const double f0 = f0_base * (1.0 + glide * t / std::max(duration_s, 1e-9));
    phase += 2.0 * std::numbers::pi * f0 / rate_hz;
    double v = 0.0;
    for (int h = 1; h * f0 < 0.9 * nyq && h <= 60; ++h) {
      const double fh = h * f0;
      double gain = 0.0;
      for (double fm : formants) {
        const double d = (fh - fm) / (0.12 * fm);
        gain += 1.0 / (1.0 + d * d);
      }
      v += gain * std::sin(h * phase) / std::sqrt(static_cast<double>(h));
    }
    const double env = 0.55 - 0.45 * std::cos(2.0 * std::numbers::pi * syllable_hz * t);
    x[i] = 0.08 * env * v + 1e-3 * noise.normal();
  }
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak > 0.45) {
    for (double& v : x) v *= 0.45 / peak;
  }
  return Waveform(std::move(x), rate_hz);
}

struct CorpusItem {
  std::string name;
  Waveform wave;
};

// Deterministic mixed-rate set used by the pipeline checks and the CLI.
inline std::vector<CorpusItem> desk_corpus(std::size_t count, double duration_s, std::uint64_t seed) {
  static constexpr int kRates[] = {8000, 16000, 22050, 24000, 32000, 44100, 48000};
  std::vector<CorpusItem> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const int rate = kRates[i % std::size(kRates)];
    char name[64];
    std::snprintf(name, sizeof name, "utt%02zu_%dk.wav", i, rate / 1000);
    out.push_back({name, synth_utterance(rate, duration_s, derive_seed(seed, "utt" + std::to_string(i)))});
  }
  return out;
}

}  // namespace hybridse::sim

#endif  // HYBRIDSE_SIM_CORPUS_HPP_
