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

#ifndef HYBRIDSE_NN_LAYERS_HPP_
#define HYBRIDSE_NN_LAYERS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hybridse/error.hpp"
#include "hybridse/nn/matrix.hpp"
#include "hybridse/nn/tensor_io.hpp"
#include "hybridse/rng.hpp"

namespace hybridse::nn {

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// y = x W + b with W stored as in_dim x out_dim.
inline Matrix linear(const Matrix& x, const Matrix& w, std::span<const double> b) {
  require(x.cols == w.rows, "linear: input has " + std::to_string(x.cols) +
                                " columns, weight expects " + std::to_string(w.rows));
  require(b.size() == w.cols, "linear: bias length does not match output width");
  Matrix y(x.rows, w.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    auto yr = y.row(i);
    std::copy(b.begin(), b.end(), yr.begin());
    vec_mat_accumulate(x.row(i), w, yr);
  }
  return y;
}

struct Linear {
  Matrix weight;  // in x out
  std::vector<double> bias;

  Linear() = default;
  Linear(std::size_t in, std::size_t out, Rng& rng)
      : weight(Matrix::uniform_init(in, out, in, rng)) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    bias.resize(out);
    for (double& v : bias) v = rng.uniform(-bound, bound);
  }
  static Linear zeros(std::size_t in, std::size_t out) {
    Linear l;
    l.weight = Matrix(in, out);
    l.bias.assign(out, 0.0);
    return l;
  }

  std::size_t in_dim() const { return weight.rows; }
  std::size_t out_dim() const { return weight.cols; }
  Matrix operator()(const Matrix& x) const { return linear(x, weight, bias); }

  void zero() {
    std::fill(weight.data.begin(), weight.data.end(), 0.0);
    std::fill(bias.begin(), bias.end(), 0.0);
  }

  void collect_params(std::vector<ParamRef>& out, const std::string& prefix) {
    add_param(out, prefix + ".weight", weight);
    add_param(out, prefix + ".bias", bias);
  }
};

// Gate column blocks in order input, forget, candidate, output.
struct LstmParams {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  Matrix w_input;   // input_dim x 4H
  Matrix w_hidden;  // H x 4H
  std::vector<double> bias;  // 4H

  LstmParams() = default;
  LstmParams(std::size_t in, std::size_t hidden)
      : input_dim(in), hidden_dim(hidden), w_input(in, 4 * hidden),
        w_hidden(hidden, 4 * hidden), bias(4 * hidden, 0.0) {}
  LstmParams(std::size_t in, std::size_t hidden, Rng& rng)
      : input_dim(in), hidden_dim(hidden),
        w_input(Matrix::uniform_init(in, 4 * hidden, hidden, rng)),
        w_hidden(Matrix::uniform_init(hidden, 4 * hidden, hidden, rng)), bias(4 * hidden) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (double& v : bias) v = rng.uniform(-bound, bound);
  }

  void collect_params(std::vector<ParamRef>& out, const std::string& prefix) {
    add_param(out, prefix + ".w_input", w_input);
    add_param(out, prefix + ".w_hidden", w_hidden);
    add_param(out, prefix + ".bias", bias);
  }
};

// Standard LSTM from zero state; `reverse` runs right-to-left and returns
// outputs in the original order.
inline Matrix lstm_forward(const Matrix& seq, const LstmParams& p, bool reverse = false) {
  require(seq.cols == p.input_dim, "lstm: input width " + std::to_string(seq.cols) +
                                       " does not match input_dim " + std::to_string(p.input_dim));
  require(p.w_input.rows == p.input_dim && p.w_input.cols == 4 * p.hidden_dim &&
              p.w_hidden.rows == p.hidden_dim && p.w_hidden.cols == 4 * p.hidden_dim &&
              p.bias.size() == 4 * p.hidden_dim,
          "lstm: parameter shapes inconsistent with dims");
  const std::size_t h_dim = p.hidden_dim;
  const std::size_t t_len = seq.rows;
  Matrix pre = linear(seq, p.w_input, p.bias);
  Matrix out(t_len, h_dim);
  std::vector<double> h(h_dim, 0.0), c(h_dim, 0.0), gates(4 * h_dim);
  for (std::size_t step = 0; step < t_len; ++step) {
    const std::size_t t = reverse ? t_len - 1 - step : step;
    auto pr = pre.row(t);
    std::copy(pr.begin(), pr.end(), gates.begin());
    vec_mat_accumulate(h, p.w_hidden, gates);
    for (std::size_t j = 0; j < h_dim; ++j) {
      const double i_g = sigmoid(gates[j]);
      const double f_g = sigmoid(gates[h_dim + j]);
      const double g_g = std::tanh(gates[2 * h_dim + j]);
      const double o_g = sigmoid(gates[3 * h_dim + j]);
      c[j] = f_g * c[j] + i_g * g_g;
      h[j] = o_g * std::tanh(c[j]);
    }
    std::copy(h.begin(), h.end(), out.row(t).begin());
  }
  return out;
}

// Forward and backward LSTMs concatenated along columns (T x 2H).
inline Matrix bilstm_forward(const Matrix& seq, const LstmParams& fwd, const LstmParams& bwd) {
  const Matrix a = lstm_forward(seq, fwd, false);
  const Matrix b = lstm_forward(seq, bwd, true);
  Matrix out(seq.rows, a.cols + b.cols);
  for (std::size_t t = 0; t < seq.rows; ++t) {
    std::copy(a.row(t).begin(), a.row(t).end(), out.row(t).begin());
    std::copy(b.row(t).begin(), b.row(t).end(), out.row(t).begin() + static_cast<long>(a.cols));
  }
  return out;
}

inline Matrix layer_norm(const Matrix& x, std::span<const double> gamma,
                         std::span<const double> beta, double eps = 1e-5) {
  require(gamma.size() == x.cols && beta.size() == x.cols,
          "layer_norm: gamma/beta length must equal column count");
  Matrix y(x.rows, x.cols);
  const double n = static_cast<double>(x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    auto r = x.row(i);
    double mean = 0.0;
    for (double v : r) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : r) var += (v - mean) * (v - mean);
    var /= n;
    const double inv = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < x.cols; ++j) y(i, j) = gamma[j] * ((r[j] - mean) * inv) + beta[j];
  }
  return y;
}

struct LayerNorm {
  std::vector<double> gamma, beta;
  double eps = 1e-5;

  LayerNorm() = default;
  explicit LayerNorm(std::size_t n) : gamma(n, 1.0), beta(n, 0.0) {}
  Matrix operator()(const Matrix& x) const { return layer_norm(x, gamma, beta, eps); }
  void collect_params(std::vector<ParamRef>& out, const std::string& prefix) {
    add_param(out, prefix + ".gamma", gamma);
    add_param(out, prefix + ".beta", beta);
  }
};

// x / rms(x) * gain, per row.
inline Matrix rms_norm(const Matrix& x, std::span<const double> gain, double eps = 1e-6) {
  require(gain.size() == x.cols, "rms_norm: gain length must equal column count");
  Matrix y(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    auto r = x.row(i);
    double ms = 0.0;
    for (double v : r) ms += v * v;
    const double inv = 1.0 / std::sqrt(ms / static_cast<double>(x.cols) + eps);
    for (std::size_t j = 0; j < x.cols; ++j) y(i, j) = r[j] * inv * gain[j];
  }
  return y;
}

// In-place max-subtracted softmax of one row.
inline void softmax_inplace(std::span<double> v) {
  const double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double& x : v) x /= sum;
}

// Single-head softmax(Q K^T / sqrt(d)) V. Optional causal masking assumes
// query i aligns with key i.
inline Matrix scaled_dot_attention(const Matrix& q, const Matrix& k, const Matrix& v,
                                   bool causal = false) {
  require(q.cols == k.cols, "attention: query and key widths differ");
  require(k.rows == v.rows, "attention: key and value row counts differ");
  require(k.rows > 0, "attention: no keys");
  const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols));
  Matrix scores = matmul_transposed(q, k);
  Matrix out(q.rows, v.cols);
  for (std::size_t i = 0; i < q.rows; ++i) {
    auto s = scores.row(i);
    const std::size_t visible = causal ? std::min(i + 1, k.rows) : k.rows;
    for (std::size_t j = 0; j < visible; ++j) s[j] *= scale;
    softmax_inplace(s.first(visible));
    auto o = out.row(i);
    for (std::size_t j = 0; j < visible; ++j) {
      const double a = s[j];
      auto vr = v.row(j);
      for (std::size_t c = 0; c < v.cols; ++c) o[c] += a * vr[c];
    }
  }
  return out;
}

struct CrossEntropyResult {
  double loss;
  Matrix grad;  // dloss/dlogits, T x K
};

// mean_t -log softmax(logits_t)[target_t] and its exact gradient.
inline CrossEntropyResult softmax_cross_entropy_with_grad(const Matrix& logits,
                                                          std::span<const int> targets) {
  require(targets.size() == logits.rows, "cross entropy: one target per row required");
  require(logits.rows > 0, "cross entropy: empty batch");
  const double inv_t = 1.0 / static_cast<double>(logits.rows);
  CrossEntropyResult res{0.0, Matrix(logits.rows, logits.cols)};
  for (std::size_t t = 0; t < logits.rows; ++t) {
    const int y = targets[t];
    if (y < 0 || static_cast<std::size_t>(y) >= logits.cols) {
      throw IndexError("cross entropy: target " + std::to_string(y) + " outside [0, " +
                       std::to_string(logits.cols) + ")");
    }
    auto z = logits.row(t);
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - mx);
    const double log_z = mx + std::log(sum);
    res.loss += (log_z - z[static_cast<std::size_t>(y)]) * inv_t;
    auto g = res.grad.row(t);
    for (std::size_t k = 0; k < logits.cols; ++k) g[k] = std::exp(z[k] - log_z) * inv_t;
    g[static_cast<std::size_t>(y)] -= inv_t;
  }
  return res;
}

// 1-D convolution over the rows of x (length x in_channels). Weight is
// (kernel * in_channels) x out_channels with row index k * in_channels + c.
struct Conv1d {
  std::size_t in_channels = 0, out_channels = 0, kernel = 3, stride = 1, padding = 1;
  Matrix weight;
  std::vector<double> bias;

  Conv1d() = default;
  Conv1d(std::size_t cin, std::size_t cout, std::size_t k, std::size_t s, std::size_t pad, Rng& rng)
      : in_channels(cin), out_channels(cout), kernel(k), stride(s), padding(pad),
        weight(Matrix::uniform_init(k * cin, cout, k * cin, rng)), bias(cout) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(k * cin));
    for (double& v : bias) v = rng.uniform(-bound, bound);
  }

  std::size_t output_length(std::size_t len) const {
    return (len + 2 * padding - kernel) / stride + 1;
  }

  Matrix operator()(const Matrix& x) const {
    require(x.cols == in_channels, "conv1d: channel mismatch");
    const std::size_t out_len = output_length(x.rows);
    Matrix y(out_len, out_channels);
    for (std::size_t o = 0; o < out_len; ++o) {
      auto yr = y.row(o);
      std::copy(bias.begin(), bias.end(), yr.begin());
      for (std::size_t k = 0; k < kernel; ++k) {
        const long long i = static_cast<long long>(o * stride + k) - static_cast<long long>(padding);
        if (i < 0 || i >= static_cast<long long>(x.rows)) continue;
        auto xr = x.row(static_cast<std::size_t>(i));
        for (std::size_t c = 0; c < in_channels; ++c) {
          const double s = xr[c];
          const double* wr = &weight.data[(k * in_channels + c) * out_channels];
          for (std::size_t j = 0; j < out_channels; ++j) yr[j] += s * wr[j];
        }
      }
    }
    return y;
  }

  void collect_params(std::vector<ParamRef>& out, const std::string& prefix) {
    add_param(out, prefix + ".weight", weight);
    add_param(out, prefix + ".bias", bias);
  }
};

// Transposed counterpart of Conv1d: output length (L-1)*stride - 2*pad + kernel.
struct ConvTranspose1d {
  std::size_t in_channels = 0, out_channels = 0, kernel = 3, stride = 2, padding = 1;
  Matrix weight;  // (kernel * in_channels) x out_channels
  std::vector<double> bias;

  ConvTranspose1d() = default;
  ConvTranspose1d(std::size_t cin, std::size_t cout, std::size_t k, std::size_t s, std::size_t pad,
                  Rng& rng)
      : in_channels(cin), out_channels(cout), kernel(k), stride(s), padding(pad),
        weight(Matrix::uniform_init(k * cin, cout, k * cin, rng)), bias(cout) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(k * cin));
    for (double& v : bias) v = rng.uniform(-bound, bound);
  }

  std::size_t output_length(std::size_t len) const {
    return (len - 1) * stride + kernel - 2 * padding;
  }

  Matrix operator()(const Matrix& x) const {
    require(x.cols == in_channels, "conv_transpose1d: channel mismatch");
    const std::size_t out_len = output_length(x.rows);
    Matrix y(out_len, out_channels);
    for (std::size_t o = 0; o < out_len; ++o) {
      std::copy(bias.begin(), bias.end(), y.row(o).begin());
    }
    for (std::size_t i = 0; i < x.rows; ++i) {
      auto xr = x.row(i);
      for (std::size_t k = 0; k < kernel; ++k) {
        const long long o = static_cast<long long>(i * stride + k) - static_cast<long long>(padding);
        if (o < 0 || o >= static_cast<long long>(out_len)) continue;
        auto yr = y.row(static_cast<std::size_t>(o));
        for (std::size_t c = 0; c < in_channels; ++c) {
          const double s = xr[c];
          const double* wr = &weight.data[(k * in_channels + c) * out_channels];
          for (std::size_t j = 0; j < out_channels; ++j) yr[j] += s * wr[j];
        }
      }
    }
    return y;
  }

  void zero() {
    std::fill(weight.data.begin(), weight.data.end(), 0.0);
    std::fill(bias.begin(), bias.end(), 0.0);
  }

  void collect_params(std::vector<ParamRef>& out, const std::string& prefix) {
    add_param(out, prefix + ".weight", weight);
    add_param(out, prefix + ".bias", bias);
  }
};

}  // namespace hybridse::nn

#endif  // HYBRIDSE_NN_LAYERS_HPP_
