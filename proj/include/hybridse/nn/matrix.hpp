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

#ifndef HYBRIDSE_NN_MATRIX_HPP_
#define HYBRIDSE_NN_MATRIX_HPP_

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hybridse/error.hpp"
#include "hybridse/rng.hpp"

namespace hybridse::nn {

// Dense row-major double matrix. Row vectors (1 x n) double as bias vectors.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  Matrix(std::size_t r, std::size_t c, std::vector<double> values)
      : rows(r), cols(c), data(std::move(values)) {
    if (data.size() != r * c) throw ShapeError("matrix data length does not match shape");
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  // uniform(-1/sqrt(fan_in), 1/sqrt(fan_in))
  static Matrix uniform_init(std::size_t r, std::size_t c, std::size_t fan_in, Rng& rng) {
    Matrix m(r, c);
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& v : m.data) v = rng.uniform(-bound, bound);
    return m;
  }

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
  std::size_t size() const { return data.size(); }

  bool all_finite() const {
    for (double v : data) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

// a (n x k) * b (k x m)
inline Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols == b.rows, "matmul: inner dimensions differ (" + std::to_string(a.cols) +
                                " vs " + std::to_string(b.rows) + ")");
  Matrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double* o = &out.data[i * out.cols];
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double s = a.data[i * a.cols + k];
      if (s == 0.0) continue;
      const double* br = &b.data[k * b.cols];
      for (std::size_t j = 0; j < b.cols; ++j) o[j] += s * br[j];
    }
  }
  return out;
}

// a (n x k) * b^T where b is (m x k)
inline Matrix matmul_transposed(const Matrix& a, const Matrix& b) {
  require(a.cols == b.cols, "matmul_transposed: inner dimensions differ");
  Matrix out(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < b.rows; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) s += a.data[i * a.cols + k] * b.data[j * b.cols + k];
      out(i, j) = s;
    }
  }
  return out;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

// y = x . W (row vector times matrix), accumulated into y.
inline void vec_mat_accumulate(std::span<const double> x, const Matrix& w, std::span<double> y) {
  for (std::size_t k = 0; k < w.rows; ++k) {
    const double s = x[k];
    if (s == 0.0) continue;
    const double* wr = &w.data[k * w.cols];
    for (std::size_t j = 0; j < w.cols; ++j) y[j] += s * wr[j];
  }
}

inline Matrix add(const Matrix& a, const Matrix& b) {
  require(a.rows == b.rows && a.cols == b.cols, "add: shape mismatch");
  Matrix out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
  return out;
}

}  // namespace hybridse::nn

#endif  // HYBRIDSE_NN_MATRIX_HPP_
