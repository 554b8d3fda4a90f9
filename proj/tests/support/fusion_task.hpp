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


#ifndef HYBRIDSE_TESTS_SUPPORT_FUSION_TASK_HPP_
#define HYBRIDSE_TESTS_SUPPORT_FUSION_TASK_HPP_

#include <cstdint>
#include <vector>

#include "hybridse/fusion/fusion_net.hpp"
#include "hybridse/signal/stft.hpp"
#include "support/oracles.hpp"

namespace task {

inline constexpr double kSplitHz = 2000.0;
inline constexpr double kDamp = 0.2;

// Split-band triple: disc matches clean above 2 kHz and is damped below,
// gen matches clean below 2 kHz and is damped above.
inline hybridse::fusion::FusionExample split_band_example(std::uint64_t seed, int rate = 16000,
                                                           std::size_t n = 4000) {
  using namespace hybridse;
  const ComplexSpectrogram clean = stft(Waveform(oracle::gaussian(seed, n, 0.1), rate));
  const double bin_hz = 1000.0 / clean.config().window_ms;
  CMatrix d = clean.data(), g = clean.data();
  for (std::size_t t = 0; t < d.rows; ++t) {
    for (std::size_t k = 0; k < d.cols; ++k) {
      if (static_cast<double>(k) * bin_hz < kSplitHz) {
        d(t, k) *= kDamp;
      } else {
        g(t, k) *= kDamp;
      }
    }
  }
  return fusion::FusionExample(clean.with_data(std::move(d)), clean.with_data(std::move(g)), clean);
}

inline std::vector<hybridse::fusion::FusionExample> split_band_set(std::uint64_t seed, std::size_t count) {
  std::vector<hybridse::fusion::FusionExample> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(split_band_example(seed + i));
  return out;
}

// Mean mask over bins below and above the split.
struct BandMeans {
  double low = 0.0, high = 0.0;
};

inline BandMeans band_means(const hybridse::fusion::FusionMask& m, double bin_hz) {
  BandMeans b;
  std::size_t nl = 0, nh = 0;
  for (std::size_t t = 0; t < m.frames(); ++t) {
    for (std::size_t k = 0; k < m.bins(); ++k) {
      if (static_cast<double>(k) * bin_hz < kSplitHz) {
        b.low += m(t, k);
        ++nl;
      } else {
        b.high += m(t, k);
        ++nh;
      }
    }
  }
  b.low /= static_cast<double>(nl);
  b.high /= static_cast<double>(nh);
  return b;
}

}  // namespace task

#endif  // HYBRIDSE_TESTS_SUPPORT_FUSION_TASK_HPP_
