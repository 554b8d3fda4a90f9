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

#ifndef HYBRIDSE_SIGNAL_WAVEFORM_HPP_
#define HYBRIDSE_SIGNAL_WAVEFORM_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hybridse/error.hpp"

namespace hybridse {

inline constexpr std::array<int, 7> kSupportedRates = {8000,  16000, 22050, 24000,
                                                       32000, 44100, 48000};

inline bool is_supported_rate(int rate_hz) {
  return std::find(kSupportedRates.begin(), kSupportedRates.end(), rate_hz) !=
         kSupportedRates.end();
}

inline void require_supported_rate(int rate_hz) {
  if (!is_supported_rate(rate_hz)) {
    throw ConfigError("unsupported sample rate " + std::to_string(rate_hz) +
                      " Hz");
  }
}

// Mono audio at one of the supported rates. Immutable once constructed; the
// constructor rejects empty or non-finite signals.
class Waveform {
 public:
  Waveform(std::vector<double> samples, int sample_rate_hz)
      : samples_(std::move(samples)), rate_(sample_rate_hz) {
    require_supported_rate(rate_);
    if (samples_.empty()) throw ShapeError("waveform must have at least one sample");
    for (double v : samples_) {
      if (!std::isfinite(v)) throw DataError("waveform contains non-finite samples");
    }
  }

  std::span<const double> samples() const { return samples_; }
  const std::vector<double>& vec() const { return samples_; }
  int sample_rate_hz() const { return rate_; }
  std::size_t size() const { return samples_.size(); }
  double duration_s() const {
    return static_cast<double>(samples_.size()) / static_cast<double>(rate_);
  }
  double operator[](std::size_t i) const { return samples_[i]; }

  friend bool operator==(const Waveform&, const Waveform&) = default;

 private:
  std::vector<double> samples_;
  int rate_;
};

inline double energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Crops or zero-pads to exactly `length` samples.
inline std::vector<double> fit_length(std::span<const double> x, std::size_t length) {
  std::vector<double> out(length, 0.0);
  std::copy_n(x.begin(), std::min(length, x.size()), out.begin());
  return out;
}

}  // namespace hybridse

#endif  // HYBRIDSE_SIGNAL_WAVEFORM_HPP_
