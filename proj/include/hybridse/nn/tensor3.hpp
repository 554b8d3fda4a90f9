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

#ifndef HYBRIDSE_NN_TENSOR3_HPP_
#define HYBRIDSE_NN_TENSOR3_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "hybridse/nn/matrix.hpp"

namespace hybridse::nn {

// frames x bins x channels feature map, channels contiguous.
struct Tensor3 {
  std::size_t frames = 0, bins = 0, channels = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(std::size_t t, std::size_t f, std::size_t c)
      : frames(t), bins(f), channels(c), data(t * f * c, 0.0) {}

  std::span<double> at(std::size_t t, std::size_t f) {
    return {data.data() + (t * bins + f) * channels, channels};
  }
  std::span<const double> at(std::size_t t, std::size_t f) const {
    return {data.data() + (t * bins + f) * channels, channels};
  }

  // bins x channels slice of one frame.
  Matrix frame(std::size_t t) const {
    Matrix m(bins, channels);
    std::copy_n(data.begin() + static_cast<long>(t * bins * channels), bins * channels, m.data.begin());
    return m;
  }
  void add_to_frame(std::size_t t, const Matrix& m) {
    double* d = data.data() + t * bins * channels;
    for (std::size_t i = 0; i < bins * channels; ++i) d[i] += m.data[i];
  }
  void set_frame(std::size_t t, const Matrix& m) {
    std::copy(m.data.begin(), m.data.end(), data.begin() + static_cast<long>(t * bins * channels));
  }

  // frames x channels slice of one bin.
  Matrix bin(std::size_t f) const {
    Matrix m(frames, channels);
    for (std::size_t t = 0; t < frames; ++t) {
      auto src = at(t, f);
      std::copy(src.begin(), src.end(), m.row(t).begin());
    }
    return m;
  }
  void add_to_bin(std::size_t f, const Matrix& m) {
    for (std::size_t t = 0; t < frames; ++t) {
      auto dst = at(t, f);
      auto src = m.row(t);
      for (std::size_t c = 0; c < channels; ++c) dst[c] += src[c];
    }
  }

  // (frames * bins) x channels view as a matrix copy.
  Matrix flatten() const { return Matrix(frames * bins, channels, data); }
  static Tensor3 from_flat(const Matrix& m, std::size_t t, std::size_t f) {
    Tensor3 out(t, f, m.cols);
    out.data = m.data;
    return out;
  }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;
};

}  // namespace hybridse::nn

#endif  // HYBRIDSE_NN_TENSOR3_HPP_
