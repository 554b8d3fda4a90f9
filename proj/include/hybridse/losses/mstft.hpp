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

#ifndef HYBRIDSE_LOSSES_MSTFT_HPP_
#define HYBRIDSE_LOSSES_MSTFT_HPP_

#include <cmath>
#include <vector>

#include "hybridse/error.hpp"
#include "hybridse/losses/spectral.hpp"
#include "hybridse/signal/stft.hpp"
#include "hybridse/signal/waveform.hpp"

namespace hybridse::losses {

struct MstftConfig {
  std::vector<FrameSpec> resolutions{{512, 128}, {1024, 256}, {2048, 512}};
  // Added to |S|^2 before the square root, which keeps the log finite and the
  // magnitude differentiable at zero.
  double power_floor = 1e-10;

  void validate() const {
    if (resolutions.size() < 2) throw ConfigError("MstftConfig: need at least two resolutions");
    for (const auto& r : resolutions) {
      if (r.window < 2 || r.hop == 0 || r.hop >= r.window) {
        throw ConfigError("MstftConfig: each resolution needs 0 < hop < window");
      }
    }
  }
};

// Mean over resolutions of spectral convergence plus mean absolute
// log-magnitude difference, with its gradient with respect to est.
inline WaveLoss mstft_loss(std::span<const double> est, std::span<const double> ref,
                           const MstftConfig& cfg = {}) {
  cfg.validate();
  if (est.size() != ref.size() || est.empty()) throw ShapeError("mstft_loss: length mismatch");
  if (energy(ref) == 0.0) throw DegenerateInputError("mstft_loss: reference is silent");
  const double inv_r = 1.0 / static_cast<double>(cfg.resolutions.size());
  WaveLoss out{0.0, std::vector<double>(est.size(), 0.0)};
  for (const FrameSpec& fs : cfg.resolutions) {
    const CMatrix se = stft_frames(est, fs);
    const CMatrix sr = stft_frames(ref, fs);
    const std::size_t n = se.data.size();
    std::vector<double> me(n), mr(n);
    double diff2 = 0.0, ref2 = 0.0, log_l1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      me[i] = std::sqrt(std::norm(se.data[i]) + cfg.power_floor);
      mr[i] = std::sqrt(std::norm(sr.data[i]) + cfg.power_floor);
      diff2 += (me[i] - mr[i]) * (me[i] - mr[i]);
      ref2 += mr[i] * mr[i];
      log_l1 += std::abs(std::log(me[i]) - std::log(mr[i]));
    }
    const double a = std::sqrt(diff2), b = std::sqrt(ref2);
    out.value += inv_r * (a / b + log_l1 / static_cast<double>(n));

    CMatrix g(se.rows, se.cols);
    for (std::size_t i = 0; i < n; ++i) {
      double dm = 0.0;
      if (a > 0.0) dm += (me[i] - mr[i]) / (a * b);
      const double ld = std::log(me[i]) - std::log(mr[i]);
      if (ld != 0.0) dm += (ld > 0.0 ? 1.0 : -1.0) / (static_cast<double>(n) * me[i]);
      g.data[i] = inv_r * dm * se.data[i] / me[i];
    }
    const auto gx = stft_frames_adjoint(g, fs, est.size());
    for (std::size_t i = 0; i < gx.size(); ++i) out.grad[i] += gx[i];
  }
  return out;
}

inline WaveLoss mstft_loss(const Waveform& est, const Waveform& ref, const MstftConfig& cfg = {}) {
  if (est.sample_rate_hz() != ref.sample_rate_hz()) throw RateError("mstft_loss: rate mismatch");
  return mstft_loss(est.samples(), ref.samples(), cfg);
}

}  // namespace hybridse::losses

#endif  // HYBRIDSE_LOSSES_MSTFT_HPP_
