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

#ifndef HYBRIDSE_LOSSES_SPECTRAL_HPP_
#define HYBRIDSE_LOSSES_SPECTRAL_HPP_

#include <cmath>
#include <vector>

#include "hybridse/error.hpp"
#include "hybridse/signal/stft.hpp"

namespace hybridse::losses {

// Gradients of real losses with respect to complex inputs use the
// convention dL/dRe z + i dL/dIm z.
struct SpecLoss {
  double value = 0.0;
  CMatrix grad;
};

struct WaveLoss {
  double value = 0.0;
  std::vector<double> grad;
};

inline void require_same_grid(const CMatrix& a, const CMatrix& b, const char* what) {
  if (!a.same_shape(b) || a.data.empty()) {
    throw AlignmentError(std::string(what) + ": spectrogram shapes differ or are empty");
  }
}

inline SpecLoss complex_mse(const CMatrix& est, const CMatrix& ref) {
  require_same_grid(est, ref, "complex_mse");
  const double n = static_cast<double>(est.data.size());
  SpecLoss out{0.0, CMatrix(est.rows, est.cols)};
  for (std::size_t i = 0; i < est.data.size(); ++i) {
    const cplx d = est.data[i] - ref.data[i];
    out.value += std::norm(d);
    out.grad.data[i] = 2.0 * d / n;
  }
  out.value /= n;
  return out;
}

// Gradient at |est| = 0 is taken as 0.
inline SpecLoss magnitude_mse(const CMatrix& est, const CMatrix& ref) {
  require_same_grid(est, ref, "magnitude_mse");
  const double n = static_cast<double>(est.data.size());
  SpecLoss out{0.0, CMatrix(est.rows, est.cols)};
  for (std::size_t i = 0; i < est.data.size(); ++i) {
    const double me = std::abs(est.data[i]);
    const double d = me - std::abs(ref.data[i]);
    out.value += d * d;
    out.grad.data[i] = me > 0.0 ? (2.0 * d / n) * (est.data[i] / me) : cplx(0.0, 0.0);
  }
  out.value /= n;
  return out;
}

inline SpecLoss complex_mse(const ComplexSpectrogram& est, const ComplexSpectrogram& ref) {
  if (!est.aligned_with(ref)) throw AlignmentError("complex_mse: spectrograms not aligned");
  return complex_mse(est.data(), ref.data());
}

inline SpecLoss magnitude_mse(const ComplexSpectrogram& est, const ComplexSpectrogram& ref) {
  if (!est.aligned_with(ref)) throw AlignmentError("magnitude_mse: spectrograms not aligned");
  return magnitude_mse(est.data(), ref.data());
}

}  // namespace hybridse::losses

#endif  // HYBRIDSE_LOSSES_SPECTRAL_HPP_
