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

#ifndef HYBRIDSE_FUSION_FUSION_NET_HPP_
#define HYBRIDSE_FUSION_FUSION_NET_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hybridse/error.hpp"
#include "hybridse/fusion/fusion.hpp"
#include "hybridse/losses/objectives.hpp"
#include "hybridse/nn/layers.hpp"
#include "hybridse/nn/tensor_io.hpp"

namespace hybridse::fusion {

inline constexpr std::size_t kFusionFeatures = 3;

// Per-bin MLP: features (log1p|disc|, log1p|gen|, log1p|disc - gen|) ->
// tanh -> tanh -> sigmoid. The same network runs on every bin of every
// frame, at any sample rate.
struct FusionNet {
  nn::Matrix w1, w2, w3;  // 3 x H, H x H, H x 1
  std::vector<double> b1, b2, b3;

  static FusionNet init(std::size_t hidden, std::uint64_t seed) {
    if (hidden == 0) throw ConfigError("FusionNet: hidden width must be positive");
    Rng rng(seed);
    FusionNet n;
    n.w1 = nn::Matrix::uniform_init(kFusionFeatures, hidden, kFusionFeatures, rng);
    n.b1.assign(hidden, 0.0);
    n.w2 = nn::Matrix::uniform_init(hidden, hidden, hidden, rng);
    n.b2.assign(hidden, 0.0);
    n.w3 = nn::Matrix::uniform_init(hidden, 1, hidden, rng);
    n.b3.assign(1, 0.0);
    return n;
  }

  // Same shapes, all zero; used as a gradient accumulator.
  FusionNet zeros_like() const {
    FusionNet z;
    z.w1 = nn::Matrix(w1.rows, w1.cols);
    z.w2 = nn::Matrix(w2.rows, w2.cols);
    z.w3 = nn::Matrix(w3.rows, w3.cols);
    z.b1.assign(b1.size(), 0.0);
    z.b2.assign(b2.size(), 0.0);
    z.b3.assign(b3.size(), 0.0);
    return z;
  }

  std::size_t hidden() const { return w1.cols; }

  void collect_params(std::vector<nn::ParamRef>& out) {
    nn::add_param(out, "w1", w1);
    nn::add_param(out, "b1", b1);
    nn::add_param(out, "w2", w2);
    nn::add_param(out, "b2", b2);
    nn::add_param(out, "w3", w3);
    nn::add_param(out, "b3", b3);
  }

  // Flat parameter views, in collect_params order.
  std::vector<double*> flat() {
    std::vector<nn::ParamRef> refs;
    collect_params(refs);
    std::vector<double*> out;
    for (auto& r : refs)
      for (double& v : *r.values) out.push_back(&v);
    return out;
  }

  friend bool operator==(const FusionNet&, const FusionNet&) = default;
};

namespace detail {

inline nn::Matrix fusion_features(const ComplexSpectrogram& disc, const ComplexSpectrogram& gen) {
  const auto& d = disc.data().data;
  const auto& g = gen.data().data;
  nn::Matrix f(d.size(), kFusionFeatures);
  for (std::size_t i = 0; i < d.size(); ++i) {
    f(i, 0) = std::log1p(std::abs(d[i]));
    f(i, 1) = std::log1p(std::abs(g[i]));
    f(i, 2) = std::log1p(std::abs(d[i] - g[i]));
  }
  return f;
}

struct Activations {
  nn::Matrix features, a1, a2;
  std::vector<double> mask;
};

inline Activations forward(const FusionNet& net, const ComplexSpectrogram& disc, const ComplexSpectrogram& gen) {
  Activations act;
  act.features = fusion_features(disc, gen);
  act.a1 = nn::linear(act.features, net.w1, net.b1);
  for (double& v : act.a1.data) v = std::tanh(v);
  act.a2 = nn::linear(act.a1, net.w2, net.b2);
  for (double& v : act.a2.data) v = std::tanh(v);
  const nn::Matrix z = nn::linear(act.a2, net.w3, net.b3);
  act.mask.resize(z.rows);
  for (std::size_t i = 0; i < z.rows; ++i) act.mask[i] = nn::sigmoid(z(i, 0));
  return act;
}

// Accumulates dL/dparams into grad given dL/dmask per bin.
inline void backward(const FusionNet& net, const Activations& act, std::span<const double> dmask, FusionNet& grad) {
  const std::size_t h = net.hidden();
  const std::size_t n = act.mask.size();
  std::vector<double> dz2(h), dz1(h);
  for (std::size_t i = 0; i < n; ++i) {
    const double m = act.mask[i];
    const double dz3 = dmask[i] * m * (1.0 - m);
    if (dz3 == 0.0) continue;
    auto a2 = act.a2.row(i);
    auto a1 = act.a1.row(i);
    auto f = act.features.row(i);
    grad.b3[0] += dz3;
    for (std::size_t j = 0; j < h; ++j) {
      grad.w3(j, 0) += a2[j] * dz3;
      dz2[j] = dz3 * net.w3(j, 0) * (1.0 - a2[j] * a2[j]);
    }
    for (std::size_t j = 0; j < h; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < h; ++c) s += net.w2(j, c) * dz2[c];
      dz1[j] = s * (1.0 - a1[j] * a1[j]);
    }
    for (std::size_t j = 0; j < h; ++j) {
      grad.b2[j] += dz2[j];
      for (std::size_t c = 0; c < h; ++c) grad.w2(j, c) += a1[j] * dz2[c];
    }
    for (std::size_t c = 0; c < h; ++c) {
      grad.b1[c] += dz1[c];
      for (std::size_t j = 0; j < kFusionFeatures; ++j) grad.w1(j, c) += f[j] * dz1[c];
    }
  }
}

}  // namespace detail

inline FusionMask estimate_mask(const ComplexSpectrogram& disc, const ComplexSpectrogram& gen, const FusionNet& net) {
  require_aligned(disc, gen, "estimate_mask");
  auto act = detail::forward(net, disc, gen);
  return FusionMask(disc.frames(), disc.bins(), std::move(act.mask));
}

// One training triple. The clean waveform is synthesized once from the clean
// spectrogram and serves as the time-domain target.
struct FusionExample {
  ComplexSpectrogram disc, gen, clean;
  Waveform clean_wave;

  FusionExample(ComplexSpectrogram d, ComplexSpectrogram g, ComplexSpectrogram c)
      : disc(std::move(d)), gen(std::move(g)), clean(std::move(c)), clean_wave(istft(clean)) {
    require_aligned(disc, gen, "FusionExample");
    require_aligned(disc, clean, "FusionExample");
  }
};

struct ObjectiveResult {
  losses::LossReport report;  // averaged over examples
  FusionNet grad;
};

// Fusion objective averaged over examples, differentiated through the mask
// network, the blend, the inverse STFT and the time-domain losses.
inline ObjectiveResult fusion_objective(const FusionNet& net, std::span<const FusionExample> examples,
                                        const losses::SqaScorer& scorer, const losses::MstftConfig& cfg) {
  if (examples.empty()) throw ConfigError("fusion objective needs at least one example");
  FusionNet grad = net.zeros_like();
  double ms = 0.0, l1 = 0.0, sqa = 0.0;
  const double inv_n = 1.0 / static_cast<double>(examples.size());
  for (const auto& ex : examples) {
    const auto act = detail::forward(net, ex.disc, ex.gen);
    const FusionMask mask(ex.disc.frames(), ex.disc.bins(), act.mask);
    const Waveform est = istft(fuse(ex.disc, ex.gen, mask));
    const auto loss = losses::fusion_loss(est, ex.clean_wave, scorer, cfg);
    ms += loss.report.value("mstft") * inv_n;
    l1 += loss.report.value("l1") * inv_n;
    sqa += loss.report.value("sqa") * inv_n;
    std::vector<double> gw = loss.grad;
    for (double& v : gw) v *= inv_n;
    const CMatrix gspec = istft_frames_adjoint(gw, ex.disc.frame_spec(), ex.disc.frames());
    std::vector<double> dmask(act.mask.size());
    for (std::size_t i = 0; i < dmask.size(); ++i) {
      const cplx diff = ex.disc.data().data[i] - ex.gen.data().data[i];
      const cplx g = gspec.data[i];
      dmask[i] = g.real() * diff.real() + g.imag() * diff.imag();
    }
    detail::backward(net, act, dmask, grad);
  }
  return ObjectiveResult{losses::compose_fusion(ms, l1, sqa), std::move(grad)};
}

struct TrainOptions {
  int steps = 500;
  double learning_rate = 0.05;
  losses::SqaScorer scorer = losses::null_sqa_scorer();
  losses::MstftConfig mstft;
  std::function<void(int, const losses::LossReport&)> on_step;
};

struct TrainResult {
  FusionNet net;
  std::vector<losses::LossReport> log;  // entry s is the objective before update s; last entry after training
};

// Plain full-batch gradient descent.
inline TrainResult train_fusion(FusionNet net, std::span<const FusionExample> examples, const TrainOptions& opt) {
  if (examples.empty()) throw ConfigError("train_fusion: no training examples");
  TrainResult res{std::move(net), {}};
  if (opt.steps <= 0) return res;
  for (int step = 0; step <= opt.steps; ++step) {
    auto obj = fusion_objective(res.net, examples, opt.scorer, opt.mstft);
    if (opt.on_step) opt.on_step(step, obj.report);
    res.log.push_back(obj.report);
    if (step == opt.steps) break;
    auto params = res.net.flat();
    auto grads = obj.grad.flat();
    for (std::size_t i = 0; i < params.size(); ++i) *params[i] -= opt.learning_rate * *grads[i];
  }
  return res;
}

// step,mstft,l1,sqa,total
inline std::string training_log_csv(const std::vector<losses::LossReport>& log) {
  std::ostringstream os;
  os << "step,mstft,l1,sqa,total\n";
  for (std::size_t s = 0; s < log.size(); ++s) {
    const auto& r = log[s];
    os << s << ',' << losses::LossReport::fmt(r.value("mstft")) << ',' << losses::LossReport::fmt(r.value("l1"))
       << ',' << losses::LossReport::fmt(r.value("sqa")) << ',' << losses::LossReport::fmt(r.total()) << '\n';
  }
  return os.str();
}

}  // namespace hybridse::fusion

#endif  // HYBRIDSE_FUSION_FUSION_NET_HPP_
