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

#ifndef HYBRIDSE_LOSSES_OBJECTIVES_HPP_
#define HYBRIDSE_LOSSES_OBJECTIVES_HPP_

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "hybridse/error.hpp"
#include "hybridse/losses/loss_report.hpp"
#include "hybridse/losses/mstft.hpp"
#include "hybridse/losses/perceptual.hpp"
#include "hybridse/losses/spectral.hpp"
#include "hybridse/nn/layers.hpp"
#include "hybridse/signal/stft.hpp"

namespace hybridse::losses {

// Time-domain mean absolute error; gradient 0 at ties.
inline WaveLoss l1_loss(std::span<const double> est, std::span<const double> ref) {
  if (est.size() != ref.size() || est.empty()) throw ShapeError("l1_loss: length mismatch");
  const double n = static_cast<double>(est.size());
  WaveLoss out{0.0, std::vector<double>(est.size(), 0.0)};
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double d = est[i] - ref[i];
    out.value += std::abs(d);
    out.grad[i] = d > 0.0 ? 1.0 / n : (d < 0.0 ? -1.0 / n : 0.0);
  }
  out.value /= n;
  return out;
}

inline WaveLoss l1_loss(const Waveform& est, const Waveform& ref) {
  return l1_loss(est.samples(), ref.samples());
}

// Differentiable quality scorer: returns a loss-like score and its gradient
// with respect to the estimate's samples.
using SqaScorer = std::function<WaveLoss(const Waveform&)>;

inline SqaScorer null_sqa_scorer() {
  return [](const Waveform& w) { return WaveLoss{0.0, std::vector<double>(w.size(), 0.0)}; };
}

// Token NLL under the LM: mean cross entropy of the targets.
inline double nll_loss(const nn::Matrix& logits, std::span<const int> targets) {
  return nn::softmax_cross_entropy_with_grad(logits, targets).loss;
}

struct RegressionResult {
  LossReport report;
  CMatrix spec_grad;           // of the weighted total w.r.t. est_spec
  std::vector<double> wave_grad;  // of the weighted total w.r.t. est_wave
};

inline RegressionResult regression_loss(const ComplexSpectrogram& est_spec, const ComplexSpectrogram& ref_spec,
                                        const Waveform& est_wave, const Waveform& ref_wave) {
  const SpecLoss c = complex_mse(est_spec, ref_spec);
  const SpecLoss m = magnitude_mse(est_spec, ref_spec);
  const WaveLoss p = perceptual_surrogate(est_wave, ref_wave);
  RegressionResult r{compose_regression(c.value, m.value, p.value), CMatrix(c.grad.rows, c.grad.cols), p.grad};
  const double wc = r.report.weight("complex");
  const double wm = r.report.weight("magnitude");
  const double wp = r.report.weight("perceptual");
  for (std::size_t i = 0; i < r.spec_grad.data.size(); ++i) {
    r.spec_grad.data[i] = wc * c.grad.data[i] + wm * m.grad.data[i];
  }
  for (double& v : r.wave_grad) v *= wp;
  return r;
}

inline LossReport gen_loss(double nll, const LossReport& reg) { return compose_gen(nll, reg); }

struct FusionLossResult {
  LossReport report;
  std::vector<double> grad;  // of the weighted total w.r.t. est samples
};

inline FusionLossResult fusion_loss(const Waveform& est, const Waveform& ref, const SqaScorer& scorer,
                                    const MstftConfig& cfg = {}) {
  if (est.sample_rate_hz() != ref.sample_rate_hz()) throw RateError("fusion_loss: rate mismatch");
  const WaveLoss ms = mstft_loss(est.samples(), ref.samples(), cfg);
  const WaveLoss l1 = l1_loss(est.samples(), ref.samples());
  const WaveLoss sqa = scorer ? scorer(est) : null_sqa_scorer()(est);
  if (sqa.grad.size() != est.size()) throw ShapeError("fusion_loss: scorer gradient length mismatch");
  FusionLossResult r{compose_fusion(ms.value, l1.value, sqa.value), std::vector<double>(est.size())};
  const double w_ms = r.report.weight("mstft");
  const double w_l1 = r.report.weight("l1");
  const double w_sqa = r.report.weight("sqa");
  for (std::size_t i = 0; i < est.size(); ++i) {
    r.grad[i] = w_ms * ms.grad[i] + w_l1 * l1.grad[i] + w_sqa * sqa.grad[i];
  }
  return r;
}

}  // namespace hybridse::losses

#endif  // HYBRIDSE_LOSSES_OBJECTIVES_HPP_
