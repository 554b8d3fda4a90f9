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

#ifndef HYBRIDSE_SIGNAL_RESAMPLE_HPP_
#define HYBRIDSE_SIGNAL_RESAMPLE_HPP_

#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "hybridse/signal/filter.hpp"
#include "hybridse/signal/waveform.hpp"

namespace hybridse {

// Rational polyphase resampler with a Kaiser-windowed sinc prototype.
//
// The prototype is centred on the lower of the two Nyquist frequencies and
// spans kTapsPerPhase samples at the lower rate, which places the transition
// band inside [0.45, 0.55] x min(rate): flat to 0.45, >= 60 dB down from
// 0.55.
class PolyphaseResampler {
 public:
  static constexpr int kTapsPerPhase = 64;
  static constexpr double kStopbandDb = 90.0;
  static constexpr double kPassbandEdge = 0.45;  // fraction of min(rate)
  static constexpr double kStopbandEdge = 0.55;

  PolyphaseResampler(int source_hz, int target_hz)
      : source_(source_hz), target_(target_hz) {
    require_supported_rate(source_hz);
    require_supported_rate(target_hz);
    const int g = std::gcd(source_hz, target_hz);
    up_ = static_cast<std::size_t>(target_hz / g);
    down_ = static_cast<std::size_t>(source_hz / g);
    const double scale = std::min(1.0, static_cast<double>(target_hz) / source_hz);
    const double cutoff = 0.5 * scale;  // cycles per input sample
    const double half_width = 0.5 * kTapsPerPhase / scale;
    reach_ = static_cast<long long>(std::ceil(half_width));
    const double beta = kaiser_beta(kStopbandDb);
    const std::size_t taps = static_cast<std::size_t>(2 * reach_);
    table_.assign(up_ * taps, 0.0);
    for (std::size_t phase = 0; phase < up_; ++phase) {
      const double frac = static_cast<double>(phase) / static_cast<double>(up_);
      double sum = 0.0;
      for (std::size_t i = 0; i < taps; ++i) {
        const long long d = static_cast<long long>(i) - reach_ + 1;
        const double u = frac - static_cast<double>(d);
        const double v = 2.0 * cutoff * sinc(2.0 * cutoff * u) * kaiser_at(u / half_width, beta);
        table_[phase * taps + i] = v;
        sum += v;
      }
      for (std::size_t i = 0; i < taps; ++i) table_[phase * taps + i] /= sum;
    }
  }

  std::size_t output_length(std::size_t input_length) const {
    return static_cast<std::size_t>(std::llround(
        static_cast<double>(input_length) * static_cast<double>(up_) /
        static_cast<double>(down_)));
  }

  std::vector<double> process(std::span<const double> x) const {
    const std::size_t out_len = std::max<std::size_t>(1, output_length(x.size()));
    const std::size_t taps = static_cast<std::size_t>(2 * reach_);
    const long long n_in = static_cast<long long>(x.size());
    std::vector<double> y(out_len, 0.0);
    for (std::size_t n = 0; n < out_len; ++n) {
      const std::size_t pos = n * down_;
      const long long base = static_cast<long long>(pos / up_);
      const std::size_t phase = pos % up_;
      const double* h = &table_[phase * taps];
      double acc = 0.0;
      for (std::size_t i = 0; i < taps; ++i) {
        const long long k = base + static_cast<long long>(i) - reach_ + 1;
        if (k >= 0 && k < n_in) acc += h[i] * x[static_cast<std::size_t>(k)];
      }
      y[n] = acc;
    }
    return y;
  }

  int source_rate() const { return source_; }
  int target_rate() const { return target_; }

 private:
  int source_;
  int target_;
  std::size_t up_ = 1;
  std::size_t down_ = 1;
  long long reach_ = 0;
  std::vector<double> table_;  // up_ phases x (2 * reach_) taps
};

inline Waveform resample(const Waveform& wave, int target_rate_hz) {
  require_supported_rate(target_rate_hz);
  if (wave.sample_rate_hz() == target_rate_hz) return wave;
  PolyphaseResampler r(wave.sample_rate_hz(), target_rate_hz);
  return Waveform(r.process(wave.samples()), target_rate_hz);
}

}  // namespace hybridse

#endif  // HYBRIDSE_SIGNAL_RESAMPLE_HPP_
