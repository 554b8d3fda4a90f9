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

#ifndef HYBRIDSE_SIGNAL_FILTER_HPP_
#define HYBRIDSE_SIGNAL_FILTER_HPP_

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "hybridse/error.hpp"
#include "hybridse/signal/fft.hpp"

namespace hybridse {

// Kaiser's empirical beta for a given stopband attenuation in dB.
inline double kaiser_beta(double atten_db) {
  if (atten_db > 50.0) return 0.1102 * (atten_db - 8.7);
  if (atten_db >= 21.0) {
    return 0.5842 * std::pow(atten_db - 21.0, 0.4) + 0.07886 * (atten_db - 21.0);
  }
  return 0.0;
}

// Kaiser window evaluated at u in [-1, 1] (0 outside).
inline double kaiser_at(double u, double beta) {
  if (u < -1.0 || u > 1.0) return 0.0;
  return std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - u * u))) /
         std::cyl_bessel_i(0.0, beta);
}

inline double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// Odd-length linear-phase low-pass: ideal cutoff `cutoff` in cycles/sample
// (half-amplitude point), Kaiser-windowed, unit DC gain.
inline std::vector<double> kaiser_lowpass(double cutoff, std::size_t taps, double beta) {
  if (!(cutoff > 0.0 && cutoff < 0.5)) throw ConfigError("low-pass cutoff must lie in (0, 0.5)");
  if (taps % 2 == 0) ++taps;
  const double mid = static_cast<double>(taps - 1) / 2.0;
  std::vector<double> h(taps);
  double sum = 0.0;
  for (std::size_t i = 0; i < taps; ++i) {
    const double t = static_cast<double>(i) - mid;
    h[i] = 2.0 * cutoff * sinc(2.0 * cutoff * t) *
           kaiser_at(mid > 0.0 ? t / mid : 0.0, beta);
    sum += h[i];
  }
  for (double& v : h) v /= sum;
  return h;
}

// Taps needed for a transition of `transition` cycles/sample at `atten_db`.
inline std::size_t kaiser_length(double atten_db, double transition) {
  const double n = (atten_db - 7.95) / (14.36 * transition);
  auto taps = static_cast<std::size_t>(std::ceil(n)) + 1;
  return taps % 2 == 0 ? taps + 1 : taps;
}

// Zero-phase ("same") filtering with an odd-length FIR, zero outside the
// signal.
inline std::vector<double> filter_same(std::span<const double> x, std::span<const double> h) {
  const std::size_t half = h.size() / 2;
  std::vector<double> out(x.size(), 0.0);
  if (h.size() > 256) {
    const auto full = fft_convolve(x, h);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = full[i + half];
    return out;
  }
  const long long n = static_cast<long long>(x.size());
  for (long long i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
      const long long j = i + static_cast<long long>(half) - static_cast<long long>(k);
      if (j >= 0 && j < n) acc += h[k] * x[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

}  // namespace hybridse

#endif  // HYBRIDSE_SIGNAL_FILTER_HPP_
