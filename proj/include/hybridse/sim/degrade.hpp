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

#ifndef HYBRIDSE_SIM_DEGRADE_HPP_
#define HYBRIDSE_SIM_DEGRADE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hybridse/error.hpp"
#include "hybridse/rng.hpp"
#include "hybridse/signal/filter.hpp"
#include "hybridse/signal/waveform.hpp"

namespace hybridse::sim {

inline Waveform white_noise(int rate_hz, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = rng.normal();
  return Waveform(std::move(x), rate_hz);
}

// clean + alpha * noise with alpha chosen so that
// 10 log10(|clean|^2 / |alpha noise|^2) == snr_db. The noise is looped from
// a seeded random offset and cropped to the clean length.
inline Waveform add_noise_at_snr(const Waveform& clean, const Waveform& noise, double snr_db, std::uint64_t seed) {
  if (clean.sample_rate_hz() != noise.sample_rate_hz()) throw RateError("add_noise_at_snr: rate mismatch");
  const double ec = energy(clean.samples());
  if (ec == 0.0) throw DegenerateInputError("add_noise_at_snr: clean signal is silent");
  Rng rng(seed);
  const std::size_t offset = static_cast<std::size_t>(rng.below(noise.size()));
  std::vector<double> n(clean.size());
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = noise[(offset + i) % noise.size()];
  const double en = energy(n);
  if (en == 0.0) throw DegenerateInputError("add_noise_at_snr: noise segment is silent");
  const double alpha = std::sqrt(ec / (en * std::pow(10.0, snr_db / 10.0)));
  std::vector<double> out(clean.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = clean[i] + alpha * n[i];
  return Waveform(std::move(out), clean.sample_rate_hz());
}

// 10 log10(|clean|^2 / |degraded - clean|^2)
inline double measured_snr_db(const Waveform& clean, const Waveform& degraded) {
  if (clean.size() != degraded.size()) throw ShapeError("measured_snr_db: length mismatch");
  double ec = 0.0, en = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    ec += clean[i] * clean[i];
    const double d = degraded[i] - clean[i];
    en += d * d;
  }
  return 10.0 * std::log10(ec / en);
}

// Kaiser low-pass: passband to cutoff_hz, 70 dB design attenuation from
// 1.2 * cutoff_hz.
inline Waveform bandlimit(const Waveform& wave, double cutoff_hz) {
  const double nyq = wave.sample_rate_hz() / 2.0;
  if (!(cutoff_hz > 0.0 && cutoff_hz < nyq)) {
    throw ConfigError("bandlimit: cutoff must lie in (0, " + std::to_string(nyq) + ") Hz");
  }
  const double rate = wave.sample_rate_hz();
  const double stop = std::min(1.2 * cutoff_hz, nyq);
  const double transition = std::max((stop - cutoff_hz) / rate, 0.002);
  const double centre = std::min((cutoff_hz + stop) / 2.0 / rate, 0.499);
  constexpr double kAttenDb = 70.0;
  const auto h = kaiser_lowpass(centre, kaiser_length(kAttenDb, transition), kaiser_beta(kAttenDb));
  return Waveform(filter_same(wave.samples(), h), wave.sample_rate_hz());
}

inline Waveform clip(const Waveform& wave, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("clip: threshold must lie in (0, 1]");
  std::vector<double> out(wave.vec());
  for (double& v : out) v = std::clamp(v, -threshold, threshold);
  return Waveform(std::move(out), wave.sample_rate_hz());
}

// Full linear convolution cropped to the input length.
inline Waveform reverb_fir(const Waveform& wave, const Waveform& rir) {
  if (wave.sample_rate_hz() != rir.sample_rate_hz()) throw RateError("reverb_fir: rate mismatch");
  if (rir.duration_s() > 0.5) throw ConfigError("reverb_fir: impulse response longer than 0.5 s");
  std::vector<double> out(wave.size(), 0.0);
  if (rir.size() <= 64) {
    for (std::size_t i = 0; i < wave.size(); ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < rir.size() && k <= i; ++k) acc += rir[k] * wave[i - k];
      out[i] = acc;
    }
  } else {
    const auto full = fft_convolve(wave.samples(), rir.samples());
    std::copy_n(full.begin(), wave.size(), out.begin());
  }
  return Waveform(std::move(out), wave.sample_rate_hz());
}

// Direct path at t = 0 followed by seeded Gaussian noise decaying 60 dB over
// rt60_s, truncated at min(rt60_s, 0.5 s).
inline Waveform synthetic_rir(int rate_hz, int rir_id, double rt60_s) {
  if (!(rt60_s > 0.0)) throw ConfigError("synthetic_rir: rt60 must be positive");
  const auto n = static_cast<std::size_t>(std::max(1.0, std::round(std::min(rt60_s, 0.5) * rate_hz)));
  Rng rng(derive_seed(static_cast<std::uint64_t>(rir_id), "rir"));
  std::vector<double> h(n, 0.0);
  h[0] = 1.0;
  const double decay = 3.0 * std::log(10.0) / (rt60_s * rate_hz);
  const double tail_gain = 0.5 / std::sqrt(static_cast<double>(rate_hz) * 0.05);
  for (std::size_t i = 1; i < n; ++i) h[i] = tail_gain * rng.normal() * std::exp(-decay * static_cast<double>(i));
  return Waveform(std::move(h), rate_hz);
}

struct DegradationStep {
  enum class Kind { kAdditiveNoise, kBandlimit, kClip, kReverb };
  Kind kind;
  double value = 0.0;  // snr_db | cutoff_hz | threshold | rt60_s
  int rir_id = 0;

  static DegradationStep noise(double snr_db) { return {Kind::kAdditiveNoise, snr_db, 0}; }
  static DegradationStep lowpass(double cutoff_hz) { return {Kind::kBandlimit, cutoff_hz, 0}; }
  static DegradationStep clipping(double threshold) { return {Kind::kClip, threshold, 0}; }
  static DegradationStep reverb(int rir_id, double rt60_s) { return {Kind::kReverb, rt60_s, rir_id}; }

  std::string to_string() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
      case Kind::kAdditiveNoise: os << "noise(" << value << ")"; break;
      case Kind::kBandlimit: os << "bandlimit(" << value << ")"; break;
      case Kind::kClip: os << "clip(" << value << ")"; break;
      case Kind::kReverb: os << "reverb(" << rir_id << "," << value << ")"; break;
    }
    return os.str();
  }
};

struct DegradationRecipe {
  std::string name;
  std::vector<DegradationStep> steps;
  std::uint64_t seed = 0;

  void validate(int rate_hz) const {
    for (const auto& s : steps) {
      switch (s.kind) {
        case DegradationStep::Kind::kAdditiveNoise:
          if (s.value < -10.0 || s.value > 40.0) throw ConfigError("recipe '" + name + "': snr_db outside [-10, 40]");
          break;
        case DegradationStep::Kind::kBandlimit:
          if (!(s.value > 0.0 && s.value < rate_hz / 2.0)) throw ConfigError("recipe '" + name + "': cutoff not below Nyquist");
          break;
        case DegradationStep::Kind::kClip:
          if (!(s.value > 0.0 && s.value <= 1.0)) throw ConfigError("recipe '" + name + "': clip threshold outside (0, 1]");
          break;
        case DegradationStep::Kind::kReverb:
          if (!(s.value > 0.0)) throw ConfigError("recipe '" + name + "': rt60 must be positive");
          break;
      }
    }
  }

  std::string steps_text() const {
    std::string out;
    for (std::size_t i = 0; i < steps.size(); ++i) out += (i ? ";" : "") + steps[i].to_string();
    return out;
  }

  // First additive-noise step's SNR, if any.
  std::optional<double> first_snr_db() const {
    for (const auto& s : steps) {
      if (s.kind == DegradationStep::Kind::kAdditiveNoise) return s.value;
    }
    return std::nullopt;
  }
};

// Parses "noise(10); bandlimit(4000); clip(0.5); reverb(3, 0.4)".
inline std::vector<DegradationStep> parse_steps(const std::string& text) {
  std::vector<DegradationStep> steps;
  std::stringstream ss(text);
  std::string item;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  auto number = [&](const std::string& s, const std::string& ctx) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(trim(s), &used);
    } catch (const std::exception&) {
      throw ConfigError("recipe step '" + ctx + "': bad number '" + s + "'");
    }
    if (used != trim(s).size()) throw ConfigError("recipe step '" + ctx + "': bad number '" + s + "'");
    return v;
  };
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto open = item.find('(');
    const auto close = item.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open || close + 1 != item.size()) {
      throw ConfigError("recipe step '" + item + "': expected name(args)");
    }
    const std::string kind = trim(item.substr(0, open));
    const std::string args = item.substr(open + 1, close - open - 1);
    std::vector<std::string> parts;
    std::stringstream as(args);
    std::string a;
    while (std::getline(as, a, ',')) parts.push_back(a);
    auto want = [&](std::size_t n) {
      if (parts.size() != n) throw ConfigError("recipe step '" + item + "': expected " + std::to_string(n) + " argument(s)");
    };
    if (kind == "noise") {
      want(1);
      steps.push_back(DegradationStep::noise(number(parts[0], item)));
    } else if (kind == "bandlimit") {
      want(1);
      steps.push_back(DegradationStep::lowpass(number(parts[0], item)));
    } else if (kind == "clip") {
      want(1);
      steps.push_back(DegradationStep::clipping(number(parts[0], item)));
    } else if (kind == "reverb") {
      want(2);
      steps.push_back(DegradationStep::reverb(static_cast<int>(number(parts[0], item)), number(parts[1], item)));
    } else {
      throw ConfigError("recipe step '" + item + "': unknown distortion '" + kind + "'");
    }
  }
  return steps;
}

struct RecipeResult {
  Waveform wave;
  std::vector<double> measured_snr_db;  // one entry per additive-noise step
};

// Applies steps in order. Additive noise comes from `noise` when given,
// otherwise from seeded white noise of the clean length.
inline RecipeResult apply_recipe_traced(const Waveform& clean, const DegradationRecipe& recipe,
                                        const std::optional<Waveform>& noise = std::nullopt) {
  recipe.validate(clean.sample_rate_hz());
  RecipeResult res{clean, {}};
  Waveform& x = res.wave;
  for (std::size_t i = 0; i < recipe.steps.size(); ++i) {
    const auto& s = recipe.steps[i];
    const std::uint64_t step_seed = derive_seed(recipe.seed, "step" + std::to_string(i));
    switch (s.kind) {
      case DegradationStep::Kind::kAdditiveNoise: {
        const Waveform n = noise ? *noise : white_noise(x.sample_rate_hz(), x.size(), derive_seed(step_seed, "noise"));
        Waveform y = add_noise_at_snr(x, n, s.value, step_seed);
        res.measured_snr_db.push_back(measured_snr_db(x, y));
        x = std::move(y);
        break;
      }
      case DegradationStep::Kind::kBandlimit: x = bandlimit(x, s.value); break;
      case DegradationStep::Kind::kClip: x = clip(x, s.value); break;
      case DegradationStep::Kind::kReverb: x = reverb_fir(x, synthetic_rir(x.sample_rate_hz(), s.rir_id, s.value)); break;
    }
  }
  return res;
}

inline Waveform apply_recipe(const Waveform& clean, const DegradationRecipe& recipe,
                             const std::optional<Waveform>& noise = std::nullopt) {
  return apply_recipe_traced(clean, recipe, noise).wave;
}

}  // namespace hybridse::sim

#endif  // HYBRIDSE_SIM_DEGRADE_HPP_
