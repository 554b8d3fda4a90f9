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

#ifndef HYBRIDSE_CLI_SELFTEST_HPP_
#define HYBRIDSE_CLI_SELFTEST_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "hybridse/fusion/fusion.hpp"
#include "hybridse/fusion/fusion_net.hpp"
#include "hybridse/fusion/hybrid.hpp"
#include "hybridse/losses/objectives.hpp"
#include "hybridse/losses/perceptual.hpp"
#include "hybridse/rng.hpp"
#include "hybridse/sim/corpus.hpp"
#include "hybridse/sim/degrade.hpp"
#include "hybridse/sim/metrics.hpp"

namespace hybridse::cli {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Check {
  std::string name;
  std::function<CheckResult()> run;
};

namespace selftest_detail {

inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline std::vector<double> random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

inline CMatrix random_cmatrix(Rng& rng, std::size_t r, std::size_t c) {
  CMatrix m(r, c);
  for (auto& v : m.data) v = cplx(rng.normal(), rng.normal());
  return m;
}

// max |analytic - central difference| / max |central difference| over the
// sampled coordinates of a real parameter vector.
inline double fd_error(std::vector<double> x, const std::function<double(const std::vector<double>&)>& f,
                       const std::vector<double>& analytic, Rng& rng, std::size_t coords, double h) {
  double num_max = 0.0, err_max = 0.0;
  for (std::size_t c = 0; c < coords; ++c) {
    const std::size_t i = static_cast<std::size_t>(rng.below(x.size()));
    const double keep = x[i];
    x[i] = keep + h;
    const double fp = f(x);
    x[i] = keep - h;
    const double fm = f(x);
    x[i] = keep;
    const double fd = (fp - fm) / (2.0 * h);
    num_max = std::max(num_max, std::abs(fd));
    err_max = std::max(err_max, std::abs(fd - analytic[i]));
  }
  return err_max / std::max(num_max, 1e-300);
}

// Re/Im interleaved views of complex data and gradients.
inline std::vector<double> interleave(const CMatrix& m) {
  std::vector<double> v;
  v.reserve(2 * m.data.size());
  for (const auto& z : m.data) {
    v.push_back(z.real());
    v.push_back(z.imag());
  }
  return v;
}
inline CMatrix deinterleave(const std::vector<double>& v, std::size_t r, std::size_t c) {
  CMatrix m(r, c);
  for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = cplx(v[2 * i], v[2 * i + 1]);
  return m;
}

inline CheckResult verdict(const std::string& name, double worst, double tol) {
  return {name, worst < tol, "max rel err " + num(worst) + " (tol " + num(tol) + ")"};
}

}  // namespace selftest_detail

// Every module's invariant checks. `models` supplies the pipeline used by
// the determinism and contract checks.
inline std::vector<Check> selftest_checks(const fusion::HybridModels& models) {
  using namespace selftest_detail;
  std::vector<Check> checks;

  checks.push_back({"sfi.bins", [] {
    const std::pair<int, std::size_t> want[] = {{8000, 81}, {16000, 161}, {32000, 321}, {48000, 481}};
    for (auto [rate, bins] : want) {
      if (frequency_bin_count(rate) != bins) return CheckResult{"sfi.bins", false, "wrong bin count at " + std::to_string(rate)};
    }
    for (int rate : kSupportedRates) {
      const FrameSpec fs = frame_spec(rate, {});
      if (static_cast<double>(rate) / static_cast<double>(fs.window) != 50.0) {
        return CheckResult{"sfi.bins", false, "bin spacing not 50 Hz at " + std::to_string(rate)};
      }
    }
    return CheckResult{"sfi.bins", true, "81/161/321/481 bins, 50 Hz spacing"};
  }});

  checks.push_back({"stft.roundtrip", [] {
    Rng rng(11);
    double worst = 0.0;
    for (int rate : kSupportedRates) {
      const Waveform w(random_vec(rng, static_cast<std::size_t>(rate / 2)), rate);
      const Waveform r = istft(stft(w));
      double num2 = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) num2 += (r[i] - w[i]) * (r[i] - w[i]);
      worst = std::max(worst, std::sqrt(num2 / energy(w.samples())));
    }
    return verdict("stft.roundtrip", worst, 1e-10);
  }});

  checks.push_back({"fusion.endpoints", [] {
    Rng rng(12);
    const Waveform a(random_vec(rng, 8000), 16000), b(random_vec(rng, 8000), 16000);
    const auto d = stft(a), g = stft(b);
    const bool one = fusion::fuse(d, g, fusion::FusionMask::constant(d.frames(), d.bins(), 1.0)).data().data == d.data().data;
    const bool zero = fusion::fuse(d, g, fusion::FusionMask::constant(d.frames(), d.bins(), 0.0)).data().data == g.data().data;
    return CheckResult{"fusion.endpoints", one && zero, one && zero ? "mask 1 -> disc, mask 0 -> gen, bit-exact" : "endpoint mismatch"};
  }});

  checks.push_back({"losses.weights", [] {
    const double reg = losses::compose_regression(1, 2, 3).total();
    const double fus = losses::compose_fusion(1, 2, 0.5).total();
    const auto g = losses::compose_gen(0.75, losses::compose_regression(1, 2, 3));
    const bool ok = reg == 1.93 && fus == 2.5 && g.total() == 0.75 + reg;
    return CheckResult{"losses.weights", ok, "regression " + losses::LossReport::fmt(reg) + ", fusion " + losses::LossReport::fmt(fus)};
  }});

  checks.push_back({"gradcheck.complex_mse", [] {
    Rng rng(21);
    double worst = 0.0;
    for (int inst = 0; inst < 5; ++inst) {
      const CMatrix ref = random_cmatrix(rng, 4, 9);
      const CMatrix est = random_cmatrix(rng, 4, 9);
      const auto an = interleave(losses::complex_mse(est, ref).grad);
      auto f = [&](const std::vector<double>& v) { return losses::complex_mse(deinterleave(v, 4, 9), ref).value; };
      worst = std::max(worst, fd_error(interleave(est), f, an, rng, 20, 1e-6));
    }
    return verdict("gradcheck.complex_mse", worst, 1e-4);
  }});

  checks.push_back({"gradcheck.magnitude_mse", [] {
    Rng rng(22);
    double worst = 0.0;
    for (int inst = 0; inst < 5; ++inst) {
      const CMatrix ref = random_cmatrix(rng, 4, 9);
      const CMatrix est = random_cmatrix(rng, 4, 9);
      const auto an = interleave(losses::magnitude_mse(est, ref).grad);
      auto f = [&](const std::vector<double>& v) { return losses::magnitude_mse(deinterleave(v, 4, 9), ref).value; };
      worst = std::max(worst, fd_error(interleave(est), f, an, rng, 20, 1e-6));
    }
    return verdict("gradcheck.magnitude_mse", worst, 1e-4);
  }});

  checks.push_back({"gradcheck.perceptual", [] {
    Rng rng(23);
    double worst = 0.0;
    for (int inst = 0; inst < 3; ++inst) {
      const Waveform ref(random_vec(rng, 1600, 0.1), 16000);
      const Waveform est(random_vec(rng, 1600, 0.1), 16000);
      const auto an = losses::perceptual_surrogate(est, ref).grad;
      auto f = [&](const std::vector<double>& v) { return losses::perceptual_surrogate(Waveform(v, 16000), ref).value; };
      worst = std::max(worst, fd_error(est.vec(), f, an, rng, 10, 1e-6));
    }
    return verdict("gradcheck.perceptual", worst, 1e-4);
  }});

  checks.push_back({"gradcheck.mstft", [] {
    Rng rng(24);
    double worst = 0.0;
    for (int inst = 0; inst < 3; ++inst) {
      const auto ref = random_vec(rng, 3000, 0.1);
      const auto est = random_vec(rng, 3000, 0.1);
      const auto an = losses::mstft_loss(est, ref, {}).grad;
      auto f = [&](const std::vector<double>& v) { return losses::mstft_loss(v, ref, {}).value; };
      worst = std::max(worst, fd_error(est, f, an, rng, 10, 1e-6));
    }
    return verdict("gradcheck.mstft", worst, 1e-4);
  }});

  checks.push_back({"gradcheck.l1", [] {
    Rng rng(25);
    double worst = 0.0;
    for (int inst = 0; inst < 5; ++inst) {
      const auto ref = random_vec(rng, 64);
      const auto est = random_vec(rng, 64);
      const auto an = losses::l1_loss(est, ref).grad;
      auto f = [&](const std::vector<double>& v) { return losses::l1_loss(v, ref).value; };
      worst = std::max(worst, fd_error(est, f, an, rng, 20, 1e-7));
    }
    return verdict("gradcheck.l1", worst, 1e-4);
  }});

  checks.push_back({"gradcheck.cross_entropy", [] {
    Rng rng(26);
    double worst = 0.0;
    for (int inst = 0; inst < 5; ++inst) {
      nn::Matrix logits(6, 11);
      for (double& v : logits.data) v = rng.normal();
      std::vector<int> targets(6);
      for (int& t : targets) t = static_cast<int>(rng.below(11));
      const auto an = nn::softmax_cross_entropy_with_grad(logits, targets).grad.data;
      auto f = [&](const std::vector<double>& v) {
        nn::Matrix m(6, 11);
        m.data = v;
        return nn::softmax_cross_entropy_with_grad(m, targets).loss;
      };
      worst = std::max(worst, fd_error(logits.data, f, an, rng, 20, 1e-5));
    }
    return verdict("gradcheck.cross_entropy", worst, 1e-6);
  }});

  checks.push_back({"gradcheck.fusion_net", [] {
    Rng rng(27);
    const Waveform c(random_vec(rng, 1600, 0.1), 8000);
    const auto clean = stft(c);
    auto perturb = [&](double s) {
      CMatrix m = clean.data();
      for (auto& v : m.data) v += s * cplx(rng.normal(), rng.normal());
      return clean.with_data(std::move(m));
    };
    const std::vector<fusion::FusionExample> ex{fusion::FusionExample(perturb(0.05), perturb(0.05), clean)};
    const auto net = fusion::FusionNet::init(8, 5);
    const auto obj = fusion::fusion_objective(net, ex, losses::null_sqa_scorer(), {});
    auto grads = obj.grad;
    std::vector<double> an;
    for (double* p : grads.flat()) an.push_back(*p);
    auto base = net;
    std::vector<double> x;
    for (double* p : base.flat()) x.push_back(*p);
    auto f = [&](const std::vector<double>& v) {
      auto n2 = net;
      auto ps = n2.flat();
      for (std::size_t i = 0; i < ps.size(); ++i) *ps[i] = v[i];
      return fusion::fusion_objective(n2, ex, losses::null_sqa_scorer(), {}).report.total();
    };
    return verdict("gradcheck.fusion_net", fd_error(x, f, an, rng, 12, 1e-6), 1e-4);
  }});

  checks.push_back({"fusion.oracle_dominance", [] {
    Rng rng(31);
    for (int i = 0; i < 20; ++i) {
      const auto c = stft(Waveform(random_vec(rng, 800), 8000));
      auto noisy = [&] {
        CMatrix m = c.data();
        for (auto& v : m.data) v += cplx(rng.normal(), rng.normal());
        return c.with_data(std::move(m));
      };
      const auto d = noisy(), g = noisy();
      const auto fused = fusion::fuse(d, g, fusion::oracle_mask(d, g, c));
      const double e = fusion::spectral_sq_error(fused, c);
      if (e > std::min(fusion::spectral_sq_error(d, c), fusion::spectral_sq_error(g, c))) {
        return CheckResult{"fusion.oracle_dominance", false, "oracle worse than a branch"};
      }
    }
    return CheckResult{"fusion.oracle_dominance", true, "oracle <= best branch on 20 triples"};
  }});

  checks.push_back({"sim.snr", [] {
    const auto clean = sim::synth_utterance(16000, 0.5, 3);
    const auto noise = sim::white_noise(16000, 4000, 4);
    double worst = 0.0;
    for (double snr : {-5.0, 0.0, 10.0, 20.0}) {
      const auto y = sim::add_noise_at_snr(clean, noise, snr, 9);
      worst = std::max(worst, std::abs(sim::measured_snr_db(clean, y) - snr));
      if (!(sim::add_noise_at_snr(clean, noise, snr, 9) == y)) return CheckResult{"sim.snr", false, "replay differs"};
    }
    return CheckResult{"sim.snr", worst < 1e-6, "max |measured - requested| " + num(worst) + " dB"};
  }});

  checks.push_back({"metrics.identities", [] {
    const auto x = sim::synth_utterance(16000, 0.5, 5);
    const auto noise = sim::white_noise(16000, x.size(), 8);
    std::vector<double> y(x.vec()), twice(x.size()), ten(x.vec());
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] += 0.1 * noise[i];
      twice[i] = 2.0 * y[i];
    }
    for (double& v : ten) v *= 10.0;
    const bool inf_ok = std::isinf(sim::si_sdr(x, x));
    const double scale = std::abs(sim::si_sdr(Waveform(twice, 16000), x) - sim::si_sdr(Waveform(y, 16000), x));
    const double l = sim::lsd(Waveform(ten, 16000), x);
    // The log guard can only pull the value below 20 dB, by at most the mean
    // per-bin bias of the guard on this reference.
    const CMatrix sx = stft_frames(x.samples(), sim::kLsdFrames);
    double bias = 0.0;
    for (const auto& z : sx.data) {
      const double a = std::abs(z);
      bias += std::abs(20.0 * std::log10((10.0 * a + sim::kLsdEpsilon) / (10.0 * (a + sim::kLsdEpsilon))));
    }
    bias /= static_cast<double>(sx.data.size());
    const bool lsd_ok = l <= 20.0 + 1e-12 && l >= 20.0 - bias - 1e-12 && bias < 1e-6;
    const bool ok = inf_ok && scale < 1e-9 && lsd_ok && sim::lsd(x, x) == 0.0;
    return CheckResult{"metrics.identities", ok, "lsd(10x, x) = " + num(l) + " dB, guard bias " + num(bias)};
  }});

  checks.push_back({"pipeline.determinism", [&models] {
    const auto w = sim::synth_utterance(24000, 0.3, 6);
    const auto a = fusion::hybrid_enhance(w, models);
    const auto b = fusion::hybrid_enhance(w, models);
    const bool same = a == b;
    const bool shape = a.sample_rate_hz() == w.sample_rate_hz() && a.size() == w.size();
    return CheckResult{"pipeline.determinism", same && shape, same ? "bit-identical reruns at native rate" : "reruns differ"};
  }});

  checks.push_back({"tokens.contracts", [&models] {
    const auto w = sim::synth_utterance(16000, 0.4, 7);
    const auto t1 = gen::gen_trace(w, models.gen);
    const auto t2 = gen::gen_trace(w, models.gen);
    const std::size_t frames = w.size() / 320 + 1;
    bool ok = t1.decoded.tokens.ids == t2.decoded.tokens.ids && t1.decoded.tokens.size() == frames;
    try {
      t1.decoded.tokens.validate();
    } catch (const IndexError&) {
      ok = false;
    }
    return CheckResult{"tokens.contracts", ok, std::to_string(t1.decoded.tokens.size()) + " tokens for " +
                                                   std::to_string(frames) + " frames"};
  }});

  return checks;
}

}  // namespace hybridse::cli

#endif  // HYBRIDSE_CLI_SELFTEST_HPP_
