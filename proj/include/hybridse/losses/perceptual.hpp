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

#ifndef HYBRIDSE_LOSSES_PERCEPTUAL_HPP_
#define HYBRIDSE_LOSSES_PERCEPTUAL_HPP_

#include <cmath>
#include <vector>

#include "hybridse/error.hpp"
#include "hybridse/losses/spectral.hpp"
#include "hybridse/signal/stft.hpp"
#include "hybridse/signal/waveform.hpp"

namespace hybridse::losses {

// Bark-band log-energy distance. Not a standardized perceptual metric: a
// smooth stand-in that weighs spectral errors per critical band.
struct BarkBands {
  static constexpr int kRate = 16000;
  static constexpr int kBands = 24;
  static constexpr double kLogGuard = 1e-10;
  static FrameSpec framing() { return {512, 256}; }

  static double hz_to_bark(double hz) { return 26.81 * hz / (1960.0 + hz) - 0.53; }

  // band index per one-sided bin
  static std::vector<int> bin_bands() {
    const FrameSpec fs = framing();
    const std::size_t bins = fs.bins();
    const double lo = hz_to_bark(0.0);
    const double hi = hz_to_bark(kRate / 2.0);
    std::vector<int> band(bins);
    std::vector<int> count(kBands, 0);
    for (std::size_t k = 0; k < bins; ++k) {
      const double hz = static_cast<double>(k) * kRate / static_cast<double>(fs.window);
      int b = static_cast<int>((hz_to_bark(hz) - lo) / (hi - lo) * kBands);
      b = std::min(b, kBands - 1);
      band[k] = b;
      ++count[static_cast<std::size_t>(b)];
    }
    for (int c : count) {
      if (c == 0) throw ConfigError("bark layout leaves an empty band");
    }
    return band;
  }
};

inline WaveLoss perceptual_surrogate(const Waveform& est, const Waveform& ref) {
  if (est.sample_rate_hz() != BarkBands::kRate || ref.sample_rate_hz() != BarkBands::kRate) {
    throw RateError("perceptual_surrogate: expects 16000 Hz audio");
  }
  if (est.size() != ref.size()) throw ShapeError("perceptual_surrogate: length mismatch");
  const FrameSpec fs = BarkBands::framing();
  const auto band = BarkBands::bin_bands();
  const CMatrix se = stft_frames(est.samples(), fs);
  const CMatrix sr = stft_frames(ref.samples(), fs);
  const std::size_t nb = BarkBands::kBands;
  const double terms = static_cast<double>(se.rows * nb);

  WaveLoss out{0.0, {}};
  CMatrix g(se.rows, se.cols);
  std::vector<double> ee(nb), er(nb), coef(nb);
  for (std::size_t t = 0; t < se.rows; ++t) {
    std::fill(ee.begin(), ee.end(), 0.0);
    std::fill(er.begin(), er.end(), 0.0);
    for (std::size_t k = 0; k < se.cols; ++k) {
      ee[static_cast<std::size_t>(band[k])] += std::norm(se(t, k));
      er[static_cast<std::size_t>(band[k])] += std::norm(sr(t, k));
    }
    for (std::size_t b = 0; b < nb; ++b) {
      const double d = std::log(ee[b] + BarkBands::kLogGuard) - std::log(er[b] + BarkBands::kLogGuard);
      out.value += d * d;
      coef[b] = 2.0 * d / (terms * (ee[b] + BarkBands::kLogGuard));
    }
    for (std::size_t k = 0; k < se.cols; ++k) {
      g(t, k) = 2.0 * coef[static_cast<std::size_t>(band[k])] * se(t, k);  // dE/dS = 2 S
    }
  }
  out.value /= terms;
  out.grad = stft_frames_adjoint(g, fs, est.size());
  return out;
}

}  // namespace hybridse::losses

#endif  // HYBRIDSE_LOSSES_PERCEPTUAL_HPP_
