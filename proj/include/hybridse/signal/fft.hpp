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

#ifndef HYBRIDSE_SIGNAL_FFT_HPP_
#define HYBRIDSE_SIGNAL_FFT_HPP_

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include "hybridse/error.hpp"

namespace hybridse {

using cplx = std::complex<double>;

// Arbitrary-length complex DFT. Lengths whose prime factors are all at most
// kMaxRadix go through a recursive mixed-radix Cooley-Tukey; anything else is
// computed with Bluestein's chirp-z on a power-of-two inner transform.
//
// forward:  X[k] = sum_n x[n] exp(-2 pi i k n / N)
// inverse:  x[n] = sum_k X[k] exp(+2 pi i k n / N)   (unnormalized)
class FftPlan {
 public:
  static constexpr std::size_t kMaxRadix = 31;

  explicit FftPlan(std::size_t n) : n_(n) {
    if (n == 0) throw ShapeError("FFT length must be positive");
    twiddle_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(j) /
                           static_cast<double>(n);
      twiddle_[j] = cplx(std::cos(angle), std::sin(angle));
    }
    std::size_t rest = n;
    for (std::size_t p = 2; p * p <= rest; ++p) {
      while (rest % p == 0) {
        factors_.push_back(p);
        rest /= p;
      }
    }
    if (rest > 1) factors_.push_back(rest);
    for (std::size_t p : factors_) {
      if (p > kMaxRadix) {
        init_bluestein();
        break;
      }
    }
  }

  std::size_t size() const { return n_; }

  std::vector<cplx> forward(std::span<const cplx> in) const {
    if (in.size() != n_) throw ShapeError("FFT input length mismatch");
    std::vector<cplx> out(n_);
    if (bluestein_) {
      run_bluestein(in, out);
    } else {
      std::vector<cplx> scratch(kMaxRadix);
      recurse(in.data(), out.data(), n_, 1, 0, scratch);
    }
    return out;
  }

  std::vector<cplx> inverse(std::span<const cplx> in) const {
    std::vector<cplx> conj_in(in.begin(), in.end());
    for (auto& v : conj_in) v = std::conj(v);
    auto out = forward(conj_in);
    for (auto& v : out) v = std::conj(v);
    return out;
  }

  std::vector<cplx> forward_real(std::span<const double> in) const {
    std::vector<cplx> c(in.begin(), in.end());
    return forward(c);
  }

 private:
  struct Bluestein {
    std::vector<cplx> chirp;        // exp(-i pi n^2 / N), n < N
    std::vector<cplx> kernel_fft;   // FFT of conj chirp, wrapped, length M
    std::unique_ptr<FftPlan> inner;
  };

  void init_bluestein() {
    auto b = std::make_unique<Bluestein>();
    std::size_t m = 1;
    while (m < 2 * n_ - 1) m <<= 1;
    b->inner = std::make_unique<FftPlan>(m);
    b->chirp.resize(n_);
    const std::size_t mod = 2 * n_;
    for (std::size_t k = 0; k < n_; ++k) {
      // k^2 mod 2N keeps the angle argument small for accuracy.
      const std::size_t k2 = (k * k) % mod;
      const double angle = -std::numbers::pi * static_cast<double>(k2) /
                           static_cast<double>(n_);
      b->chirp[k] = cplx(std::cos(angle), std::sin(angle));
    }
    std::vector<cplx> kernel(m, cplx(0.0, 0.0));
    kernel[0] = std::conj(b->chirp[0]);
    for (std::size_t k = 1; k < n_; ++k) {
      kernel[k] = std::conj(b->chirp[k]);
      kernel[m - k] = std::conj(b->chirp[k]);
    }
    b->kernel_fft = b->inner->forward(kernel);
    bluestein_ = std::move(b);
  }

  void run_bluestein(std::span<const cplx> in, std::span<cplx> out) const {
    const std::size_t m = bluestein_->inner->size();
    std::vector<cplx> a(m, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < n_; ++k) a[k] = in[k] * bluestein_->chirp[k];
    auto fa = bluestein_->inner->forward(a);
    for (std::size_t k = 0; k < m; ++k) fa[k] *= bluestein_->kernel_fft[k];
    auto conv = bluestein_->inner->inverse(fa);
    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n_; ++k) {
      out[k] = conv[k] * scale * bluestein_->chirp[k];
    }
  }

  // Decimation in time. `in` is strided by `stride`; `out` is contiguous of
  // length n. Twiddles for a sub-transform of length n are taken from the
  // top-level table at multiples of N/n.
  void recurse(const cplx* in, cplx* out, std::size_t n, std::size_t stride,
               std::size_t level, std::vector<cplx>& scratch) const {
    if (n == 1) {
      out[0] = in[0];
      return;
    }
    const std::size_t p = factors_[level];
    const std::size_t m = n / p;
    for (std::size_t q = 0; q < p; ++q) {
      recurse(in + q * stride, out + q * m, m, stride * p, level + 1, scratch);
    }
    const std::size_t tw_step = n_ / n;
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t q = 0; q < p; ++q) {
        scratch[q] = out[q * m + k] * twiddle_[(q * k * tw_step) % n_];
      }
      for (std::size_t r = 0; r < p; ++r) {
        cplx acc = scratch[0];
        const std::size_t step = r * m * tw_step;  // W_p^r expressed in W_N
        for (std::size_t q = 1; q < p; ++q) {
          acc += scratch[q] * twiddle_[(q * step) % n_];
        }
        out[r * m + k] = acc;
      }
    }
  }

  std::size_t n_;
  std::vector<std::size_t> factors_;
  std::vector<cplx> twiddle_;
  std::unique_ptr<Bluestein> bluestein_;
};

// Direct O(N^2) DFT; kept for cross-checking and tiny sizes.
inline std::vector<cplx> naive_dft(std::span<const cplx> in, bool inverse = false) {
  const std::size_t n = in.size();
  std::vector<cplx> out(n);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double angle = sign * 2.0 * std::numbers::pi *
                           static_cast<double>((k * j) % n) / static_cast<double>(n);
      acc += in[j] * cplx(std::cos(angle), std::sin(angle));
    }
    out[k] = acc;
  }
  return out;
}

// Linear convolution via zero-padded power-of-two FFT; returns the full
// a.size() + b.size() - 1 result.
inline std::vector<double> fft_convolve(std::span<const double> a,
                                        std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t full = a.size() + b.size() - 1;
  std::size_t m = 1;
  while (m < full) m <<= 1;
  FftPlan plan(m);
  std::vector<cplx> pa(m, cplx(0.0, 0.0)), pb(m, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < a.size(); ++i) pa[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) pb[i] = b[i];
  auto fa = plan.forward(pa);
  auto fb = plan.forward(pb);
  for (std::size_t i = 0; i < m; ++i) fa[i] *= fb[i];
  auto c = plan.inverse(fa);
  std::vector<double> out(full);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t i = 0; i < full; ++i) out[i] = c[i].real() * scale;
  return out;
}

}  // namespace hybridse

#endif  // HYBRIDSE_SIGNAL_FFT_HPP_
