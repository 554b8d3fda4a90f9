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

#ifndef HYBRIDSE_FUSION_FUSION_HPP_
#define HYBRIDSE_FUSION_FUSION_HPP_

#include <cmath>
#include <vector>

#include "hybridse/error.hpp"
#include "hybridse/signal/stft.hpp"

namespace hybridse::fusion {

// Real per-bin blending weights in [0, 1].
class FusionMask {
 public:
  FusionMask(std::size_t frames, std::size_t bins, std::vector<double> values)
      : frames_(frames), bins_(bins), values_(std::move(values)) {
    if (values_.size() != frames_ * bins_) throw ShapeError("FusionMask: value count does not match shape");
    for (double v : values_) {
      if (!(v >= 0.0 && v <= 1.0)) throw DataError("FusionMask: entries must lie in [0, 1]");
    }
  }
  static FusionMask constant(std::size_t frames, std::size_t bins, double v) {
    return FusionMask(frames, bins, std::vector<double>(frames * bins, v));
  }

  std::size_t frames() const { return frames_; }
  std::size_t bins() const { return bins_; }
  double operator()(std::size_t t, std::size_t k) const { return values_[t * bins_ + k]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t frames_, bins_;
  std::vector<double> values_;
};

inline void require_aligned(const ComplexSpectrogram& a, const ComplexSpectrogram& b, const char* what) {
  if (!a.aligned_with(b)) {
    throw AlignmentError(std::string(what) + ": spectrograms differ in shape, rate or STFT config (" +
                         std::to_string(a.frames()) + "x" + std::to_string(a.bins()) + "@" +
                         std::to_string(a.sample_rate_hz()) + " vs " + std::to_string(b.frames()) + "x" +
                         std::to_string(b.bins()) + "@" + std::to_string(b.sample_rate_hz()) + ")");
  }
}

// final = M * disc + (1 - M) * gen, bin by bin, evaluated as
// gen + M * (disc - gen) so that equal branches come back bit-exact. The
// endpoints M = 1 and M = 0 return the corresponding input bits unchanged.
inline ComplexSpectrogram fuse(const ComplexSpectrogram& disc, const ComplexSpectrogram& gen,
                               const FusionMask& mask) {
  require_aligned(disc, gen, "fuse");
  if (mask.frames() != disc.frames() || mask.bins() != disc.bins()) {
    throw AlignmentError("fuse: mask shape does not match spectrograms");
  }
  CMatrix out(disc.frames(), disc.bins());
  const auto& d = disc.data().data;
  const auto& g = gen.data().data;
  const auto& m = mask.values();
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    if (m[i] == 1.0) {
      out.data[i] = d[i];
    } else if (m[i] == 0.0) {
      out.data[i] = g[i];
    } else {
      out.data[i] = g[i] + m[i] * (d[i] - g[i]);
    }
  }
  return disc.with_data(std::move(out));
}

// 1 where the discriminative bin is at least as close to the reference.
inline FusionMask oracle_mask(const ComplexSpectrogram& disc, const ComplexSpectrogram& gen,
                              const ComplexSpectrogram& clean) {
  require_aligned(disc, gen, "oracle_mask");
  require_aligned(disc, clean, "oracle_mask");
  std::vector<double> m(disc.data().data.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const cplx c = clean.data().data[i];
    m[i] = std::abs(disc.data().data[i] - c) <= std::abs(gen.data().data[i] - c) ? 1.0 : 0.0;
  }
  return FusionMask(disc.frames(), disc.bins(), std::move(m));
}

// Squared Frobenius distance between two aligned spectrograms.
inline double spectral_sq_error(const ComplexSpectrogram& a, const ComplexSpectrogram& b) {
  require_aligned(a, b, "spectral_sq_error");
  double e = 0.0;
  for (std::size_t i = 0; i < a.data().data.size(); ++i) e += std::norm(a.data().data[i] - b.data().data[i]);
  return e;
}

}  // namespace hybridse::fusion

#endif  // HYBRIDSE_FUSION_FUSION_HPP_
