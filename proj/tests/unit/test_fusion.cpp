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

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "hybridse/error.hpp"
#include "hybridse/fusion/fusion.hpp"
#include "hybridse/fusion/fusion_net.hpp"
#include "hybridse/fusion/hybrid.hpp"
#include "hybridse/rng.hpp"
#include "support/fusion_task.hpp"
#include "support/oracles.hpp"

using namespace hybridse;
using namespace hybridse::fusion;

namespace {

ComplexSpectrogram random_spec(std::uint64_t seed, int rate = 16000, std::size_t n = 1600) {
  const ComplexSpectrogram shape = stft(Waveform(std::vector<double>(n, 0.0), rate));
  Rng rng(seed);
  CMatrix m(shape.frames(), shape.bins());
  for (auto& v : m.data) v = cplx(rng.normal(), rng.normal());
  return shape.with_data(std::move(m));
}

FusionMask random_mask(std::uint64_t seed, std::size_t frames, std::size_t bins) {
  Rng rng(seed);
  std::vector<double> v(frames * bins);
  for (double& x : v) x = rng.uniform();
  return FusionMask(frames, bins, std::move(v));
}

const HybridModels& models() {
  static const HybridModels m = HybridModels::init({}, 77);
  return m;
}

Waveform test_input(int rate, double seconds, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(seconds * rate);
  auto x = oracle::gaussian(seed, n, 0.02);
  const auto s = oracle::sine(rate, 300.0, n, 0.3);
  for (std::size_t i = 0; i < n; ++i) x[i] += s[i];
  return Waveform(x, rate);
}

}  // namespace

TEST(FusionMask, RejectsOutOfRangeAndMisshapenValues) {
  EXPECT_THROW(FusionMask(2, 2, {0.0, 0.5, 1.0, 1.5}), DataError);
  EXPECT_THROW(FusionMask(2, 2, {0.0, 0.5, -0.1, 1.0}), DataError);
  EXPECT_THROW(FusionMask(2, 2, {0.0, 0.5, std::nan(""), 1.0}), DataError);
  EXPECT_THROW(FusionMask(2, 2, {0.0, 0.5, 1.0}), ShapeError);
  EXPECT_NO_THROW(FusionMask(1, 2, {0.0, 1.0}));
}

TEST(Fuse, MaskOfOneIsBitEqualToDisc) {
  const auto d = random_spec(1), g = random_spec(2);
  const auto f = fuse(d, g, FusionMask::constant(d.frames(), d.bins(), 1.0));
  EXPECT_EQ(f.data(), d.data());
}

TEST(Fuse, MaskOfZeroIsBitEqualToGen) {
  const auto d = random_spec(1), g = random_spec(2);
  const auto f = fuse(d, g, FusionMask::constant(d.frames(), d.bins(), 0.0));
  EXPECT_EQ(f.data(), g.data());
}

TEST(Fuse, HalfMaskAveragesHandComputedBins) {
  const auto shape = random_spec(1);
  CMatrix d(shape.frames(), shape.bins()), g(shape.frames(), shape.bins());
  for (auto& v : d.data) v = cplx(2.0, 0.0);
  for (auto& v : g.data) v = cplx(4.0, 0.0);
  const auto f = fuse(shape.with_data(d), shape.with_data(g), FusionMask::constant(d.rows, d.cols, 0.5));
  for (const auto& v : f.data().data) EXPECT_EQ(v, cplx(3.0, 0.0));
}

TEST(Fuse, MatchesElementwiseFormula) {
  const auto d = random_spec(3), g = random_spec(4);
  const auto m = random_mask(5, d.frames(), d.bins());
  const auto f = fuse(d, g, m);
  for (std::size_t t = 0; t < d.frames(); ++t) {
    for (std::size_t k = 0; k < d.bins(); ++k) {
      const cplx want = m(t, k) * d(t, k) + (1.0 - m(t, k)) * g(t, k);
      EXPECT_LE(std::abs(f(t, k) - want), 1e-15 * (1.0 + std::abs(want)));
    }
  }
}

TEST(Fuse, KeepsRateConfigAndLength) {
  const auto d = random_spec(3, 48000, 4800), g = random_spec(4, 48000, 4800);
  const auto f = fuse(d, g, random_mask(6, d.frames(), d.bins()));
  EXPECT_TRUE(f.aligned_with(d));
  EXPECT_EQ(f.num_samples(), d.num_samples());
}

TEST(Fuse, MisalignmentIsAnAlignmentError) {
  const auto d = random_spec(1, 16000, 1600);
  const auto other_rate = random_spec(2, 8000, 800);
  const auto other_len = random_spec(2, 16000, 3200);
  const auto m = FusionMask::constant(d.frames(), d.bins(), 0.5);
  EXPECT_THROW(fuse(d, other_rate, m), AlignmentError);
  EXPECT_THROW(fuse(d, other_len, m), AlignmentError);
  EXPECT_THROW(fuse(d, d, FusionMask::constant(d.frames() + 1, d.bins(), 0.5)), AlignmentError);
  // AlignmentError is a ShapeError.
  EXPECT_THROW(fuse(d, other_len, m), ShapeError);
}

TEST(Fuse, EveryBinLiesOnTheSegmentBetweenBranches) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto d = random_spec(100 + s), g = random_spec(200 + s);
    const auto f = fuse(d, g, random_mask(300 + s, d.frames(), d.bins()));
    for (std::size_t i = 0; i < f.data().data.size(); ++i) {
      const cplx a = d.data().data[i], b = g.data().data[i], x = f.data().data[i];
      const double seg = std::abs(a - b);
      EXPECT_NEAR(std::abs(x - a) + std::abs(x - b), seg, 1e-12 * (1.0 + seg));
    }
  }
}

TEST(EstimateMask, StrictlyInsideUnitIntervalAndDeterministic) {
  const auto net = FusionNet::init(16, 9);
  const auto d = random_spec(1), g = random_spec(2);
  const auto m = estimate_mask(d, g, net);
  ASSERT_EQ(m.frames(), d.frames());
  ASSERT_EQ(m.bins(), d.bins());
  for (double v : m.values()) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  EXPECT_EQ(estimate_mask(d, g, FusionNet::init(16, 9)).values(), m.values());
  EXPECT_NE(estimate_mask(d, g, FusionNet::init(16, 10)).values(), m.values());
}

TEST(EstimateMask, IdenticalBranchesGiveDiscBack) {
  const auto d = random_spec(7);
  const auto f = fuse(d, d, estimate_mask(d, d, FusionNet::init(16, 3)));
  EXPECT_EQ(f.data(), d.data());
}

TEST(EstimateMask, RejectsMisalignedBranches) {
  EXPECT_THROW(estimate_mask(random_spec(1, 16000, 1600), random_spec(2, 16000, 3200), FusionNet::init(4, 1)),
               AlignmentError);
  EXPECT_THROW(FusionNet::init(0, 1), ConfigError);
}

TEST(OracleMask, DiscEqualToCleanGivesOnes) {
  const auto c = random_spec(1), g = random_spec(2);
  const auto m = oracle_mask(c, g, c);
  for (double v : m.values()) EXPECT_EQ(v, 1.0);
}

TEST(OracleMask, GenEqualToCleanGivesZeros) {
  const auto c = random_spec(1), d = random_spec(2);
  const auto m = oracle_mask(d, c, c);
  for (double v : m.values()) EXPECT_EQ(v, 0.0);
}

TEST(OracleMask, FusedErrorNeverExceedsEitherBranch) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto d = random_spec(10 * s + 1), g = random_spec(10 * s + 2), c = random_spec(10 * s + 3);
    const auto f = fuse(d, g, oracle_mask(d, g, c));
    const double ef = spectral_sq_error(f, c);
    const double ed = spectral_sq_error(d, c), eg = spectral_sq_error(g, c);
    EXPECT_LE(ef, std::min(ed, eg));
    // Independent random branches disagree on per-bin winners, so the
    // oracle is strictly better than either.
    EXPECT_LT(ef, std::min(ed, eg));
    // Brute force: the per-bin minimum is exactly what the oracle reaches.
    double brute = 0.0;
    for (std::size_t i = 0; i < c.data().data.size(); ++i) {
      brute += std::min(std::norm(d.data().data[i] - c.data().data[i]), std::norm(g.data().data[i] - c.data().data[i]));
    }
    EXPECT_NEAR(ef, brute, 1e-12 * brute);
  }
}

TEST(FusionObjective, GradientMatchesFiniteDifferences) {
  const auto ex = task::split_band_set(3, 1);
  FusionNet net = FusionNet::init(6, 21);
  auto obj = fusion_objective(net, ex, losses::null_sqa_scorer(), {});
  auto params = net.flat();
  auto grads = obj.grad.flat();
  ASSERT_EQ(params.size(), grads.size());
  const auto coords = oracle::sample_coords(5, params.size(), 24);
  double max_err = 0.0, max_fd = 0.0;
  const double h = 1e-5;
  for (std::size_t c : coords) {
    const double keep = *params[c];
    *params[c] = keep + h;
    const double up = fusion_objective(net, ex, losses::null_sqa_scorer(), {}).report.total();
    *params[c] = keep - h;
    const double dn = fusion_objective(net, ex, losses::null_sqa_scorer(), {}).report.total();
    *params[c] = keep;
    const double fd = (up - dn) / (2.0 * h);
    max_err = std::max(max_err, std::abs(fd - *grads[c]));
    max_fd = std::max(max_fd, std::abs(fd));
  }
  ASSERT_GT(max_fd, 0.0);
  EXPECT_LT(max_err / max_fd, 1e-4);
}

TEST(FusionObjective, ReportsWeightedTerms) {
  const auto ex = task::split_band_set(3, 2);
  const auto obj = fusion_objective(FusionNet::init(4, 1), ex, losses::null_sqa_scorer(), {});
  EXPECT_EQ(obj.report.value("sqa"), 0.0);
  EXPECT_EQ(obj.report.total(), obj.report.recompute_total());
  EXPECT_THROW(fusion_objective(FusionNet::init(4, 1), {}, losses::null_sqa_scorer(), {}), ConfigError);
}

TEST(TrainFusion, ZeroLearningRateLeavesParametersBitExact) {
  const auto ex = task::split_band_set(3, 1);
  const FusionNet net = FusionNet::init(8, 4);
  TrainOptions opt;
  opt.steps = 3;
  opt.learning_rate = 0.0;
  const auto r = train_fusion(net, ex, opt);
  EXPECT_EQ(r.net, net);
  EXPECT_EQ(r.log.size(), 4u);
}

TEST(TrainFusion, ZeroStepsReturnsNetUnchanged) {
  const auto ex = task::split_band_set(3, 1);
  const FusionNet net = FusionNet::init(8, 4);
  TrainOptions opt;
  opt.steps = 0;
  const auto r = train_fusion(net, ex, opt);
  EXPECT_EQ(r.net, net);
  EXPECT_TRUE(r.log.empty());
}

TEST(TrainFusion, EmptyExampleSetIsRejected) {
  EXPECT_THROW(train_fusion(FusionNet::init(4, 1), {}, TrainOptions{}), ConfigError);
}

TEST(TrainFusion, LearnsSplitBandPreference) {
  const auto ex = task::split_band_set(7, 2);
  TrainOptions opt;
  opt.steps = 60;
  int calls = 0;
  opt.on_step = [&](int, const losses::LossReport&) { ++calls; };
  const auto r = train_fusion(FusionNet::init(16, 11), ex, opt);
  EXPECT_EQ(calls, 61);
  ASSERT_EQ(r.log.size(), 61u);
  const double first = r.log.front().total(), last = r.log.back().total();
  EXPECT_LT(last, 0.8 * first);
  const auto b = task::band_means(estimate_mask(ex[0].disc, ex[0].gen, r.net), 50.0);
  EXPECT_GT(b.high, b.low);
}

TEST(TrainFusion, LogCsvHasOneRowPerEntry) {
  const auto ex = task::split_band_set(3, 1);
  TrainOptions opt;
  opt.steps = 2;
  const auto csv = training_log_csv(train_fusion(FusionNet::init(4, 1), ex, opt).log);
  EXPECT_EQ(csv.rfind("step,mstft,l1,sqa,total\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_NE(csv.find("\n2,"), std::string::npos);
}

TEST(HybridEnhance, OutputStaysAtNativeRateAndLength) {
  const Waveform in = test_input(48000, 0.3, 1);
  const Waveform out = hybrid_enhance(in, models());
  EXPECT_EQ(out.sample_rate_hz(), 48000);
  EXPECT_EQ(out.size(), in.size());
}

TEST(HybridEnhance, ForcedUnitMaskEqualsDiscOnly) {
  const Waveform in = test_input(24000, 0.3, 2);
  HybridOptions opt;
  opt.forced_mask = 1.0;
  const Waveform h = hybrid_enhance(in, models(), opt);
  const Waveform d = disc_only_enhance(in, models());
  ASSERT_EQ(h.size(), d.size());
  for (std::size_t i = 0; i < h.size(); ++i) EXPECT_NEAR(h[i], d[i], 1e-10);
}

TEST(HybridEnhance, DeterministicUnderSeeds) {
  const Waveform in = test_input(16000, 0.3, 3);
  const Waveform a = hybrid_enhance(in, HybridModels::init({}, 5));
  const Waveform b = hybrid_enhance(in, HybridModels::init({}, 5));
  EXPECT_EQ(a, b);
}

TEST(HybridEnhance, WorksAtEverySupportedRate) {
  for (int rate : kSupportedRates) {
    const Waveform in = test_input(rate, 0.2, 4);
    const auto tr = hybrid_trace(in, models());
    EXPECT_EQ(tr.output.sample_rate_hz(), rate);
    EXPECT_EQ(tr.output.size(), in.size());
    EXPECT_TRUE(tr.gen.aligned_with(tr.disc));
    EXPECT_EQ(tr.disc.bins(), frequency_bin_count(rate));
  }
}

TEST(HybridEnhance, UpsampledGenSpectrumIsEmptyAboveEightKilohertz) {
  const Waveform in = test_input(48000, 0.3, 5);
  const auto tr = hybrid_trace(in, models());
  const double bin_hz = 50.0;
  double total = 0.0, above8 = 0.0;
  for (std::size_t t = 0; t < tr.gen.frames(); ++t) {
    double frame = 0.0, beyond_transition = 0.0;
    for (std::size_t k = 0; k < tr.gen.bins(); ++k) {
      const double p = std::norm(tr.gen(t, k));
      frame += p;
      if (k * bin_hz > 8000.0) above8 += p;
      if (k * bin_hz >= 8800.0) beyond_transition += p;
    }
    total += frame;
    // The two boundary frames see the truncation edge; interior frames
    // show the resampler's stopband.
    if (t > 0 && t + 1 < tr.gen.frames() && frame > 0.0) {
      EXPECT_LT(beyond_transition / frame, 1e-8) << "frame " << t;
    }
  }
  ASSERT_GT(total, 0.0);
  EXPECT_LT(above8 / total, 1e-3);

  // A unit mask there keeps the discriminative content intact.
  std::vector<double> m(tr.disc.frames() * tr.disc.bins(), 0.0);
  for (std::size_t t = 0; t < tr.disc.frames(); ++t)
    for (std::size_t k = 0; k < tr.disc.bins(); ++k)
      if (k * bin_hz > 8000.0) m[t * tr.disc.bins() + k] = 1.0;
  const auto f = fuse(tr.disc, tr.gen, FusionMask(tr.disc.frames(), tr.disc.bins(), m));
  for (std::size_t t = 0; t < f.frames(); ++t) {
    for (std::size_t k = 0; k < f.bins(); ++k) {
      if (k * bin_hz > 8000.0) {
        EXPECT_EQ(f(t, k), tr.disc(t, k));
      }
    }
  }
}
