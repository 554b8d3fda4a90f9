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


#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "hybridse/disc/gridnet.hpp"
#include "hybridse/error.hpp"
#include "hybridse/fusion/hybrid.hpp"
#include "hybridse/sim/corpus.hpp"
#include "hybridse/sim/degrade.hpp"
#include "hybridse/sim/metrics.hpp"
#include "support/oracles.hpp"

using namespace hybridse;
using namespace hybridse::sim;

namespace {

Waveform tone(int rate, double f, std::size_t n, double amp = 0.5) { return Waveform(oracle::sine(rate, f, n, amp), rate); }

// Power of the component at f, measured on the interior to skip filter edges.
double tone_power(const Waveform& w, double f, std::size_t guard) {
  return std::norm(oracle::tone_phasor(w.vec(), w.sample_rate_hz(), f, guard, w.size() - 2 * guard));
}

DegradationRecipe recipe(const std::string& name, const std::string& steps, std::uint64_t seed = 1) {
  return DegradationRecipe{name, parse_steps(steps), seed};
}

}  // namespace

TEST(AddNoise, ZeroAndTwentyDecibelsAreExact) {
  const Waveform clean = synth_utterance(16000, 0.5, 1);
  const Waveform noise = white_noise(16000, 5000, 2);
  for (double snr : {-10.0, -5.0, 0.0, 10.0, 20.0, 40.0}) {
    const Waveform y = add_noise_at_snr(clean, noise, snr, 3);
    EXPECT_NEAR(measured_snr_db(clean, y), snr, 1e-9) << snr;
  }
  const Waveform y0 = add_noise_at_snr(clean, noise, 0.0, 3);
  std::vector<double> d(clean.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = y0[i] - clean[i];
  EXPECT_NEAR(energy(d) / energy(clean.samples()), 1.0, 1e-12);
}

TEST(AddNoise, SameSeedReplaysBitExactly) {
  const Waveform clean = synth_utterance(24000, 0.3, 4);
  const Waveform noise = white_noise(24000, 3000, 5);
  EXPECT_EQ(add_noise_at_snr(clean, noise, 5.0, 9), add_noise_at_snr(clean, noise, 5.0, 9));
  EXPECT_NE(add_noise_at_snr(clean, noise, 5.0, 9), add_noise_at_snr(clean, noise, 5.0, 10));
}

TEST(AddNoise, ShortNoiseIsLooped) {
  const Waveform clean = synth_utterance(8000, 0.5, 6);
  const Waveform noise = white_noise(8000, 37, 7);
  const Waveform y = add_noise_at_snr(clean, noise, 10.0, 1);
  EXPECT_EQ(y.size(), clean.size());
  EXPECT_NEAR(measured_snr_db(clean, y), 10.0, 1e-9);
  // Residual repeats with the noise period.
  for (std::size_t i = 0; i + 37 < y.size(); i += 101) {
    EXPECT_NEAR(y[i] - clean[i], y[i + 37] - clean[i + 37], 1e-15);
  }
}

TEST(AddNoise, DegenerateAndMismatchedInputs) {
  const Waveform clean = synth_utterance(16000, 0.1, 1);
  EXPECT_THROW(add_noise_at_snr(Waveform(std::vector<double>(100, 0.0), 16000), white_noise(16000, 100, 1), 0.0, 1),
               DegenerateInputError);
  EXPECT_THROW(add_noise_at_snr(clean, Waveform(std::vector<double>(100, 0.0), 16000), 0.0, 1), DegenerateInputError);
  EXPECT_THROW(add_noise_at_snr(clean, white_noise(8000, 100, 1), 0.0, 1), RateError);
}

TEST(Bandlimit, StopbandToneIsFortyDecibelsDown) {
  const std::size_t n = 16000;
  const Waveform in = tone(16000, 6000.0, n);
  const Waveform out = bandlimit(in, 4000.0);
  const double ratio_db = 10.0 * std::log10(energy(out.samples()) / energy(in.samples()));
  EXPECT_LE(ratio_db, -40.0);
}

TEST(Bandlimit, AttenuatesFromOnePointTwoTimesCutoff) {
  for (double cutoff : {1000.0, 3000.0, 4000.0}) {
    const Waveform in = tone(16000, 1.2 * cutoff, 16000);
    const Waveform out = bandlimit(in, cutoff);
    EXPECT_LE(10.0 * std::log10(tone_power(out, 1.2 * cutoff, 2000) / tone_power(in, 1.2 * cutoff, 2000)), -40.0)
        << cutoff;
  }
}

TEST(Bandlimit, PassbandToneWithinPointTwoDecibels) {
  const Waveform in = tone(16000, 1000.0, 16000);
  const Waveform out = bandlimit(in, 4000.0);
  const double db = 10.0 * std::log10(tone_power(out, 1000.0, 2000) / tone_power(in, 1000.0, 2000));
  EXPECT_LE(std::abs(db), 0.2);
}

TEST(Bandlimit, DcFreeInputStaysDcFree) {
  // Whole number of cycles, so the input mean is zero to rounding.
  const Waveform in = tone(16000, 500.0, 16000);
  const Waveform out = bandlimit(in, 4000.0);
  double mean = 0.0;
  for (double v : out.samples()) mean += v;
  mean /= static_cast<double>(out.size());
  EXPECT_LT(std::abs(mean), 1e-6);
}

TEST(Bandlimit, RejectsCutoffOutsideOpenInterval) {
  const Waveform in = tone(16000, 500.0, 1600);
  EXPECT_THROW(bandlimit(in, 0.0), ConfigError);
  EXPECT_THROW(bandlimit(in, 8000.0), ConfigError);
  EXPECT_THROW(bandlimit(in, -5.0), ConfigError);
  EXPECT_EQ(bandlimit(in, 7000.0).size(), in.size());
}

TEST(Clip, HardClampIdentityAndIdempotence) {
  const Waveform in = tone(16000, 440.0, 1600, 1.0);
  const Waveform c = clip(in, 0.5);
  double peak = 0.0;
  for (double v : c.samples()) peak = std::max(peak, std::abs(v));
  EXPECT_EQ(peak, 0.5);
  EXPECT_EQ(clip(c, 0.5), c);
  const Waveform quiet = tone(16000, 440.0, 1600, 0.3);
  EXPECT_EQ(clip(quiet, 0.5), quiet);
  EXPECT_THROW(clip(in, 0.0), ConfigError);
  EXPECT_THROW(clip(in, 1.5), ConfigError);
  EXPECT_NO_THROW(clip(in, 1.0));
}

TEST(Reverb, UnitImpulseIsIdentity) {
  const Waveform in = synth_utterance(16000, 0.2, 2);
  EXPECT_EQ(reverb_fir(in, Waveform({1.0}, 16000)), in);
}

TEST(Reverb, DelayedImpulseShifts) {
  const Waveform in = synth_utterance(16000, 0.2, 2);
  for (std::size_t k : {1u, 7u, 100u}) {
    std::vector<double> h(k + 1, 0.0);
    h[k] = 1.0;
    const Waveform out = reverb_fir(in, Waveform(h, 16000));
    ASSERT_EQ(out.size(), in.size());
    for (std::size_t i = 0; i < k; ++i) EXPECT_NEAR(out[i], 0.0, 1e-12);
    for (std::size_t i = k; i < in.size(); ++i) EXPECT_NEAR(out[i], in[i - k], 1e-12);
  }
}

TEST(Reverb, LinearInInputAndMatchesBruteForce) {
  const Waveform x(oracle::gaussian(3, 1000, 0.3), 16000);
  for (const Waveform& h : {Waveform(oracle::gaussian(4, 40, 0.2), 16000), synthetic_rir(16000, 2, 0.05)}) {
    std::vector<double> ax(x.vec()), bx(x.vec());
    for (double& v : ax) v *= 4.0;
    for (double& v : bx) v *= -0.3;
    const Waveform y = reverb_fir(x, h);
    const Waveform ya = reverb_fir(Waveform(ax, 16000), h);
    const Waveform yb = reverb_fir(Waveform(bx, 16000), h);
    // Power-of-two scaling commutes exactly with every rounding step.
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_EQ(ya[i], 4.0 * y[i]);
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(yb[i], -0.3 * y[i], 1e-13);
    const auto brute = oracle::brute_convolve(x.vec(), h.vec());
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(y[i], brute[i], 1e-12);
  }
}

TEST(Reverb, RejectsRateMismatchAndLongResponses) {
  const Waveform in = synth_utterance(16000, 0.1, 1);
  EXPECT_THROW(reverb_fir(in, Waveform({1.0}, 8000)), RateError);
  EXPECT_THROW(reverb_fir(in, Waveform(std::vector<double>(8001, 0.1), 16000)), ConfigError);
}

TEST(SyntheticRir, SeededDecayingAndBounded) {
  const Waveform a = synthetic_rir(16000, 3, 0.4), b = synthetic_rir(16000, 3, 0.4);
  EXPECT_EQ(a, b);
  EXPECT_NE(synthetic_rir(16000, 4, 0.4), a);
  EXPECT_EQ(a[0], 1.0);
  EXPECT_EQ(a.size(), 6400u);
  EXPECT_LE(synthetic_rir(16000, 3, 2.0).duration_s(), 0.5);
  auto band_energy = [&](std::size_t lo, std::size_t hi) {
    double e = 0.0;
    for (std::size_t i = lo; i < hi; ++i) e += a[i] * a[i];
    return e;
  };
  EXPECT_GT(band_energy(1, 1600), 10.0 * band_energy(4800, 6400));
  EXPECT_THROW(synthetic_rir(16000, 1, 0.0), ConfigError);
}

TEST(SiSdr, IdenticalIsPositiveInfinityAndCapped) {
  const Waveform x = synth_utterance(16000, 0.2, 1);
  EXPECT_EQ(si_sdr(x, x), std::numeric_limits<double>::infinity());
  EXPECT_EQ(capped_si_sdr(si_sdr(x, x)), kSiSdrReportCap);
  EXPECT_EQ(score("a", x, x).si_sdr_db, kSiSdrReportCap);
}

TEST(SiSdr, ScaleInvariantInEstimate) {
  const Waveform x = synth_utterance(16000, 0.2, 1);
  const auto n = oracle::gaussian(2, x.size(), 0.01);
  std::vector<double> y(x.size()), y2(x.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = x[i] + n[i];
    y2[i] = 2.0 * y[i];
  }
  EXPECT_NEAR(si_sdr(Waveform(y2, 16000), x), si_sdr(Waveform(y, 16000), x), 1e-10);
  std::vector<double> x2(x.vec());
  for (double& v : x2) v *= 2.0;
  EXPECT_EQ(capped_si_sdr(si_sdr(Waveform(x2, 16000), x)), capped_si_sdr(si_sdr(x, x)));
}

TEST(SiSdr, OrthogonalEqualNormNoiseGivesZeroDecibels) {
  const std::size_t n = 1600;
  const auto r = oracle::sine(16000, 500.0, n, 0.5);
  const auto c = oracle::sine(16000, 500.0, n, 0.5, std::numbers::pi / 2.0);
  // Gram-Schmidt the cosine against the zero-mean sine, then match norms.
  std::vector<double> noise(c);
  const double proj = dot(noise, r) / energy(r);
  for (std::size_t i = 0; i < n; ++i) noise[i] -= proj * r[i];
  double mean = 0.0;
  for (double v : noise) mean += v;
  mean /= n;
  for (double& v : noise) v -= mean;
  const double scale = std::sqrt(energy(r) / energy(noise));
  std::vector<double> est(n);
  for (std::size_t i = 0; i < n; ++i) est[i] = r[i] + scale * noise[i];
  EXPECT_NEAR(si_sdr(Waveform(est, 16000), Waveform(r, 16000)), 0.0, 1e-6);
}

TEST(SiSdr, DegenerateCases) {
  const Waveform x = synth_utterance(16000, 0.1, 1);
  EXPECT_THROW(si_sdr(x, Waveform(std::vector<double>(x.size(), 0.25), 16000)), DegenerateInputError);
  EXPECT_EQ(si_sdr(Waveform(std::vector<double>(x.size(), 0.0), 16000), x), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(capped_si_sdr(-std::numeric_limits<double>::infinity()), -kSiSdrReportCap);
  EXPECT_THROW(si_sdr(x, synth_utterance(16000, 0.2, 1)), ShapeError);
}

TEST(Lsd, IdentityScaleAndSign) {
  const Waveform x(oracle::gaussian(5, 8000, 0.1), 16000);
  EXPECT_EQ(lsd(x, x), 0.0);
  std::vector<double> x10(x.vec());
  for (double& v : x10) v *= 10.0;
  // 20 dB up to the log guard, whose pull is bounded independently.
  const double bias = oracle::lsd_guard_bias(x.vec(), 10.0, kLsdEpsilon);
  EXPECT_LT(bias, 1e-6);
  const double v = lsd(Waveform(x10, 16000), x);
  EXPECT_LE(v, 20.0 + 1e-12);
  EXPECT_GE(v, 20.0 - bias - 1e-12);
  for (std::uint64_t s = 0; s < 5; ++s) {
    EXPECT_GE(lsd(Waveform(oracle::gaussian(10 + s, 8000, 0.1), 16000), x), 0.0);
  }
  EXPECT_THROW(lsd(x, Waveform(oracle::gaussian(1, 4000, 0.1), 16000)), ShapeError);
}

TEST(SegSnr, CeilingFloorAndZeroEstimate) {
  const Waveform x = synth_utterance(16000, 0.3, 7);
  EXPECT_EQ(seg_snr(x, x), 35.0);
  EXPECT_NEAR(seg_snr(Waveform(std::vector<double>(x.size(), 0.0), 16000), x), 0.0, 1e-12);
  std::vector<double> bad(x.vec());
  for (double& v : bad) v *= -50.0;
  EXPECT_EQ(seg_snr(Waveform(bad, 16000), x), -10.0);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const double v = seg_snr(Waveform(oracle::gaussian(s, x.size(), std::pow(10.0, static_cast<double>(s) - 5.0)), 16000), x);
    EXPECT_GE(v, -10.0);
    EXPECT_LE(v, 35.0);
  }
}

TEST(SegSnr, SilentFramesAreSkippedAndAllSilentIsDegenerate) {
  std::vector<double> ref(3200, 0.0), est(3200, 0.0);
  for (std::size_t i = 1600; i < 3200; ++i) ref[i] = est[i] = std::sin(0.1 * static_cast<double>(i));
  // Error confined to frames 0..8, whose reference is entirely silent.
  for (std::size_t i = 0; i < 1440; ++i) est[i] = 0.3;
  EXPECT_EQ(seg_snr(Waveform(est, 16000), Waveform(ref, 16000)), 35.0);
  EXPECT_THROW(seg_snr(Waveform(est, 16000), Waveform(std::vector<double>(3200, 0.0), 16000)), DegenerateInputError);
}

TEST(Recipe, ParseRoundTripAndErrors) {
  const auto steps = parse_steps(" noise(10); bandlimit(4000) ;clip(0.5); reverb(3, 0.4)");
  ASSERT_EQ(steps.size(), 4u);
  EXPECT_EQ(steps[0].kind, DegradationStep::Kind::kAdditiveNoise);
  EXPECT_EQ(steps[3].rir_id, 3);
  EXPECT_EQ(steps[3].value, 0.4);
  const DegradationRecipe r{"mix", steps, 1};
  EXPECT_EQ(r.steps_text(), "noise(10);bandlimit(4000);clip(0.5);reverb(3,0.40000000000000002)");
  EXPECT_EQ(parse_steps(r.steps_text()).size(), 4u);
  EXPECT_EQ(r.first_snr_db(), 10.0);
  EXPECT_THROW(parse_steps("noise(abc)"), ConfigError);
  EXPECT_THROW(parse_steps("echo(1)"), ConfigError);
  EXPECT_THROW(parse_steps("reverb(1)"), ConfigError);
  EXPECT_THROW(parse_steps("noise 10"), ConfigError);
}

TEST(Recipe, ValidationBounds) {
  EXPECT_THROW(recipe("a", "noise(-11)").validate(16000), ConfigError);
  EXPECT_THROW(recipe("a", "noise(41)").validate(16000), ConfigError);
  EXPECT_NO_THROW(recipe("a", "noise(-10); noise(40)").validate(16000));
  EXPECT_THROW(recipe("a", "bandlimit(4000)").validate(8000), ConfigError);
  EXPECT_NO_THROW(recipe("a", "bandlimit(4000)").validate(16000));
  EXPECT_THROW(recipe("a", "clip(0)").validate(16000), ConfigError);
  EXPECT_THROW(recipe("a", "reverb(1, 0)").validate(16000), ConfigError);
}

TEST(Recipe, StepsApplyInOrderAndReplay) {
  const Waveform clean = synth_utterance(16000, 0.4, 3);
  const auto a = recipe("a", "clip(0.1); noise(10)", 5);
  const auto b = recipe("b", "noise(10); clip(0.1)", 5);
  const Waveform ya = apply_recipe(clean, a), yb = apply_recipe(clean, b);
  EXPECT_NE(ya, yb);
  double peak = 0.0;
  for (double v : yb.samples()) peak = std::max(peak, std::abs(v));
  EXPECT_LE(peak, 0.1);
  EXPECT_EQ(apply_recipe(clean, a), ya);
  EXPECT_NE(apply_recipe(clean, recipe("a", "clip(0.1); noise(10)", 6)), ya);
  const auto tr = apply_recipe_traced(clean, recipe("c", "noise(0); bandlimit(3000); noise(20)", 2));
  ASSERT_EQ(tr.measured_snr_db.size(), 2u);
  EXPECT_NEAR(tr.measured_snr_db[0], 0.0, 1e-9);
  EXPECT_NEAR(tr.measured_snr_db[1], 20.0, 1e-9);
}

TEST(Recipe, ExternalNoiseIsUsed) {
  const Waveform clean = synth_utterance(16000, 0.3, 3);
  const Waveform n1 = white_noise(16000, 2000, 1), n2 = white_noise(16000, 2000, 2);
  const auto r = recipe("a", "noise(5)", 1);
  EXPECT_NE(apply_recipe(clean, r, n1), apply_recipe(clean, r, n2));
  EXPECT_EQ(apply_recipe(clean, r, n1), apply_recipe(clean, r, n1));
}

TEST(Metrics, DegradationOrdersLsdForEveryRecipe) {
  const Waveform clean = synth_utterance(16000, 0.5, 11);
  for (const char* steps : {"noise(10)", "bandlimit(2000)", "clip(0.05)", "reverb(1, 0.3)", "noise(20); reverb(2, 0.2)"}) {
    const Waveform y = apply_recipe(clean, recipe("r", steps, 3));
    EXPECT_GT(lsd(y, clean), lsd(clean, clean)) << steps;
    EXPECT_EQ(lsd(clean, clean), 0.0);
    EXPECT_LT(si_sdr(y, clean), si_sdr(clean, clean)) << steps;
  }
}

TEST(MetricReport, CsvHasHeaderRowsAndMean) {
  MetricReport rep;
  rep.add({"a.wav", 10.0, 1.0, 5.0});
  rep.add({"b.wav", 20.0, 3.0, 7.0});
  EXPECT_EQ(rep.to_csv(),
            "file,si_sdr_db,lsd_db,seg_snr_db\n"
            "a.wav,10,1,5\n"
            "b.wav,20,3,7\n"
            "mean,15,2,6\n");
  EXPECT_EQ(MetricReport{}.to_csv(), "file,si_sdr_db,lsd_db,seg_snr_db\n");
}

TEST(Corpus, DeterministicMixedRatesBoundedPeak) {
  const auto a = desk_corpus(10, 0.5, 3), b = desk_corpus(10, 0.5, 3);
  ASSERT_EQ(a.size(), 10u);
  std::set<int> rates;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].name, b[i].name);
    EXPECT_EQ(a[i].wave, b[i].wave);
    rates.insert(a[i].wave.sample_rate_hz());
    double peak = 0.0;
    for (double v : a[i].wave.samples()) peak = std::max(peak, std::abs(v));
    EXPECT_LE(peak, 0.45);
    EXPECT_GT(peak, 0.05);
  }
  EXPECT_EQ(rates.size(), 7u);
  EXPECT_EQ(a[0].name, "utt00_8k.wav");
}

TEST(EnhancementSanity, IdentityDiscAndUnitMaskDoNotLoseSiSdr) {
  auto models = fusion::HybridModels::init({}, 5);
  models.disc.zero_block_projections();
  fusion::HybridOptions opt;
  opt.forced_mask = 1.0;
  const auto corpus = desk_corpus(7, 0.4, 9);
  for (const auto& item : corpus) {
    const Waveform noisy = apply_recipe(item.wave, recipe("n", "noise(5)", 4));
    const Waveform out = fusion::hybrid_enhance(noisy, models, opt);
    const double before = si_sdr(noisy, item.wave), after = si_sdr(out, item.wave);
    EXPECT_GE(after, before - 0.1) << item.name;
    EXPECT_NEAR(after, before, 0.1) << item.name;
  }
}
