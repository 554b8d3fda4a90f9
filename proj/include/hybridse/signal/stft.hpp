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

#ifndef HYBRIDSE_SIGNAL_STFT_HPP_
#define HYBRIDSE_SIGNAL_STFT_HPP_

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hybridse/error.hpp"
#include "hybridse/signal/fft.hpp"
#include "hybridse/signal/waveform.hpp"

namespace hybridse {

enum class WindowType { kHann };

// Window and hop are fixed in milliseconds so that the number of bins scales
// with the sample rate while the bin spacing in Hz stays constant.
struct StftConfig {
  double window_ms = 20.0;
  double hop_ms = 10.0;
  WindowType window = WindowType::kHann;

  friend bool operator==(const StftConfig&, const StftConfig&) = default;
};

// Sample-domain framing. Anything that frames audio ends up here.
struct FrameSpec {
  std::size_t window = 0;
  std::size_t hop = 0;

  std::size_t bins() const { return window / 2 + 1; }
  std::size_t frames_for(std::size_t length) const { return length / hop + 1; }
  friend bool operator==(const FrameSpec&, const FrameSpec&) = default;
};

namespace detail {

inline std::size_t integral_samples(double ms, int rate_hz, const char* what) {
  const double exact = ms * static_cast<double>(rate_hz) / 1000.0;
  const double rounded = std::round(exact);
  if (std::abs(exact - rounded) > 1e-9 * std::max(1.0, exact)) {
    throw ConfigError(std::string(what) + " of " + std::to_string(ms) +
                      " ms is not an integral number of samples at " +
                      std::to_string(rate_hz) + " Hz");
  }
  return static_cast<std::size_t>(rounded);
}

// Reflect an index of the centre-padded signal back into [0, length).
inline std::size_t reflect_index(long long i, std::size_t length) {
  if (length == 1) return 0;
  const long long period = 2 * (static_cast<long long>(length) - 1);
  i %= period;
  if (i < 0) i += period;
  if (i >= static_cast<long long>(length)) i = period - i;
  return static_cast<std::size_t>(i);
}

}  // namespace detail

inline FrameSpec frame_spec(int rate_hz, const StftConfig& cfg) {
  require_supported_rate(rate_hz);
  FrameSpec spec;
  spec.window = detail::integral_samples(cfg.window_ms, rate_hz, "window");
  // 10 ms is 220.5 samples at 22.05 kHz; the hop rounds down there.
  spec.hop = static_cast<std::size_t>(std::floor(cfg.hop_ms * rate_hz / 1000.0 + 1e-9));
  if (spec.window < 2) throw ConfigError("window must span at least 2 samples");
  if (spec.hop == 0 || spec.hop > spec.window) {
    throw ConfigError("hop must be in [1, window] samples");
  }
  return spec;
}

inline std::size_t frequency_bin_count(int rate_hz, const StftConfig& cfg = {}) {
  return frame_spec(rate_hz, cfg).bins();
}

// Periodic Hann: w[n] = 0.5 - 0.5 cos(2 pi n / N).
inline std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  }
  return w;
}

// Row-major frames x bins complex matrix.
struct CMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<cplx> data;

  CMatrix() = default;
  CMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

  cplx& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
  std::span<cplx> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const cplx> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }
  bool same_shape(const CMatrix& o) const { return rows == o.rows && cols == o.cols; }
  friend bool operator==(const CMatrix&, const CMatrix&) = default;
};

// Centre-padded (reflect, window/2 each side) analysis with a periodic Hann
// window and no zero padding inside the frame.
inline CMatrix stft_frames(std::span<const double> x, const FrameSpec& spec) {
  if (x.empty()) throw ShapeError("cannot analyse an empty signal");
  const std::size_t n = spec.window;
  const long long pad = static_cast<long long>(n / 2);
  const std::size_t frames = spec.frames_for(x.size());
  const auto w = hann_window(n);
  FftPlan plan(n);
  CMatrix out(frames, spec.bins());
  std::vector<cplx> buf(n);
  for (std::size_t m = 0; m < frames; ++m) {
    const long long start = static_cast<long long>(m * spec.hop) - pad;
    for (std::size_t j = 0; j < n; ++j) {
      buf[j] = w[j] * x[detail::reflect_index(start + static_cast<long long>(j), x.size())];
    }
    const auto spec_row = plan.forward(buf);
    std::copy_n(spec_row.begin(), out.cols, out.row(m).begin());
  }
  return out;
}

namespace detail {

// One-sided spectrum -> real frame (N-point inverse real DFT, 1/N scaling).
// Imaginary parts of DC and (for even N) Nyquist are ignored.
inline void irfft_frame(std::span<const cplx> half, const FftPlan& plan,
                        std::vector<cplx>& full, std::vector<double>& frame) {
  const std::size_t n = plan.size();
  full.assign(n, cplx(0.0, 0.0));
  full[0] = cplx(half[0].real(), 0.0);
  const bool even = n % 2 == 0;
  const std::size_t last = even ? n / 2 : (n - 1) / 2;
  for (std::size_t k = 1; k <= last; ++k) {
    if (even && k == n / 2) {
      full[k] = cplx(half[k].real(), 0.0);
    } else {
      full[k] = half[k];
      full[n - k] = std::conj(half[k]);
    }
  }
  const auto t = plan.inverse(full);
  frame.resize(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) frame[j] = t[j].real() * scale;
}

constexpr double kWindowSumFloor = 1e-11;

}  // namespace detail

// Weighted overlap-add with the analysis window as synthesis window,
// normalized by the accumulated squared window. Exact inverse of stft_frames
// whenever every output sample is covered by some frame.
inline std::vector<double> istft_frames(const CMatrix& spec, const FrameSpec& fs,
                                        std::size_t length) {
  if (spec.cols != fs.bins()) {
    throw ShapeError("spectrogram has " + std::to_string(spec.cols) +
                     " bins; framing expects " + std::to_string(fs.bins()));
  }
  const std::size_t n = fs.window;
  const std::size_t pad = n / 2;
  const std::size_t padded = spec.rows == 0 ? 0 : (spec.rows - 1) * fs.hop + n;
  const auto w = hann_window(n);
  std::vector<double> acc(padded, 0.0), wss(padded, 0.0);
  FftPlan plan(n);
  std::vector<cplx> full;
  std::vector<double> frame;
  for (std::size_t m = 0; m < spec.rows; ++m) {
    detail::irfft_frame(spec.row(m), plan, full, frame);
    const std::size_t start = m * fs.hop;
    for (std::size_t j = 0; j < n; ++j) {
      acc[start + j] += w[j] * frame[j];
      wss[start + j] += w[j] * w[j];
    }
  }
  std::vector<double> out(length, 0.0);
  for (std::size_t i = 0; i < length; ++i) {
    const std::size_t j = i + pad;
    if (j < padded && wss[j] > detail::kWindowSumFloor) out[i] = acc[j] / wss[j];
  }
  return out;
}

// Vector-Jacobian product of stft_frames: given dL/dRe S + i dL/dIm S per
// bin, returns dL/dx.
inline std::vector<double> stft_frames_adjoint(const CMatrix& grad, const FrameSpec& fs,
                                               std::size_t length) {
  const std::size_t n = fs.window;
  const long long pad = static_cast<long long>(n / 2);
  const auto w = hann_window(n);
  FftPlan plan(n);
  std::vector<double> gx(length, 0.0);
  std::vector<cplx> z(n);
  for (std::size_t m = 0; m < grad.rows; ++m) {
    std::fill(z.begin(), z.end(), cplx(0.0, 0.0));
    std::copy_n(grad.row(m).begin(), grad.cols, z.begin());
    const auto t = plan.inverse(z);
    const long long start = static_cast<long long>(m * fs.hop) - pad;
    for (std::size_t j = 0; j < n; ++j) {
      gx[detail::reflect_index(start + static_cast<long long>(j), length)] +=
          w[j] * t[j].real();
    }
  }
  return gx;
}

// Vector-Jacobian product of istft_frames: dL/dy -> dL/dRe S + i dL/dIm S.
inline CMatrix istft_frames_adjoint(std::span<const double> grad_out, const FrameSpec& fs,
                                    std::size_t frames) {
  const std::size_t n = fs.window;
  const std::size_t pad = n / 2;
  const std::size_t padded = frames == 0 ? 0 : (frames - 1) * fs.hop + n;
  const auto w = hann_window(n);
  std::vector<double> wss(padded, 0.0);
  for (std::size_t m = 0; m < frames; ++m) {
    for (std::size_t j = 0; j < n; ++j) wss[m * fs.hop + j] += w[j] * w[j];
  }
  // dL/dacc[j] for padded positions
  std::vector<double> gacc(padded, 0.0);
  for (std::size_t i = 0; i < grad_out.size(); ++i) {
    const std::size_t j = i + pad;
    if (j < padded && wss[j] > detail::kWindowSumFloor) gacc[j] = grad_out[i] / wss[j];
  }
  FftPlan plan(n);
  CMatrix out(frames, fs.bins());
  std::vector<cplx> buf(n);
  const bool even = n % 2 == 0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t m = 0; m < frames; ++m) {
    for (std::size_t j = 0; j < n; ++j) buf[j] = w[j] * gacc[m * fs.hop + j];
    const auto f = plan.forward(buf);
    for (std::size_t k = 0; k < out.cols; ++k) {
      const bool edge = k == 0 || (even && k == n / 2);
      const cplx g = f[k] * (edge ? inv_n : 2.0 * inv_n);
      out(m, k) = edge ? cplx(g.real(), 0.0) : g;
    }
  }
  return out;
}

// STFT of a waveform under a fixed-duration configuration. Carries the rate,
// config, and the analysed signal length so synthesis can restore it.
class ComplexSpectrogram {
 public:
  ComplexSpectrogram(CMatrix data, int sample_rate_hz, StftConfig config,
                     std::size_t num_samples)
      : data_(std::move(data)), rate_(sample_rate_hz), config_(config),
        num_samples_(num_samples) {
    const FrameSpec fs = hybridse::frame_spec(rate_, config_);
    if (data_.cols != fs.bins()) {
      throw ShapeError("spectrogram bin count " + std::to_string(data_.cols) +
                       " inconsistent with " + std::to_string(fs.bins()) +
                       " expected at " + std::to_string(rate_) + " Hz");
    }
    for (const auto& v : data_.data) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw DataError("spectrogram contains non-finite values");
      }
    }
  }

  const CMatrix& data() const { return data_; }
  std::size_t frames() const { return data_.rows; }
  std::size_t bins() const { return data_.cols; }
  int sample_rate_hz() const { return rate_; }
  const StftConfig& config() const { return config_; }
  FrameSpec frame_spec() const { return hybridse::frame_spec(rate_, config_); }
  std::size_t num_samples() const { return num_samples_; }
  const cplx& operator()(std::size_t t, std::size_t k) const { return data_(t, k); }

  // Same grid, rate, and config: the precondition for bin-wise combination.
  bool aligned_with(const ComplexSpectrogram& o) const {
    return data_.same_shape(o.data_) && rate_ == o.rate_ && config_ == o.config_;
  }

  ComplexSpectrogram with_data(CMatrix data) const {
    return ComplexSpectrogram(std::move(data), rate_, config_, num_samples_);
  }

 private:
  CMatrix data_;
  int rate_;
  StftConfig config_;
  std::size_t num_samples_;
};

inline ComplexSpectrogram stft(const Waveform& wave, const StftConfig& cfg = {}) {
  const FrameSpec fs = frame_spec(wave.sample_rate_hz(), cfg);
  return ComplexSpectrogram(stft_frames(wave.samples(), fs), wave.sample_rate_hz(),
                            cfg, wave.size());
}

// Reconstructs num_samples() samples (at least one).
inline Waveform istft(const ComplexSpectrogram& spec) {
  const std::size_t length = std::max<std::size_t>(1, spec.num_samples());
  return Waveform(istft_frames(spec.data(), spec.frame_spec(), length),
                  spec.sample_rate_hz());
}

}  // namespace hybridse

#endif  // HYBRIDSE_SIGNAL_STFT_HPP_
