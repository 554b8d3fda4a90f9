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

#include "hybridse/error.hpp"
#include "hybridse/gen/ar_lm.hpp"
#include "hybridse/gen/dprnn.hpp"
#include "hybridse/gen/gen_branch.hpp"
#include "hybridse/gen/quantizer.hpp"
#include "hybridse/gen/semantic.hpp"
#include "hybridse/losses/objectives.hpp"
#include "support/oracles.hpp"

using namespace hybridse;
using namespace hybridse::gen;

namespace {

Waveform speechish(int rate, std::size_t n, std::uint64_t seed) {
  auto x = oracle::gaussian(seed, n, 0.05);
  const auto s = oracle::sine(rate, 220.0, n, 0.3);
  for (std::size_t i = 0; i < n; ++i) x[i] += s[i];
  return Waveform(x, rate);
}

const GenModels& models() {
  static const GenModels m = GenModels::init({}, 2024);
  return m;
}

}  // namespace

TEST(Semantic, FrameCountFollowsTwentyMsHop) {
  const auto f = extract_semantic(speechish(16000, 16000, 1), models().semantic);
  EXPECT_EQ(f.frames(), 51u);
  EXPECT_EQ(f.features.cols, 64u);
  EXPECT_EQ(f.frame_hop_ms, 20.0);
  EXPECT_TRUE(f.features.all_finite());
  EXPECT_EQ(extract_semantic(speechish(16000, 1000, 1), models().semantic).frames(), 4u);
}

TEST(Semantic, SilenceGivesConstantRows) {
  const auto f = extract_semantic(Waveform(std::vector<double>(8000, 0.0), 16000), models().semantic);
  for (std::size_t t = 1; t < f.frames(); ++t)
    for (std::size_t j = 0; j < f.features.cols; ++j) EXPECT_EQ(f.features(t, j), f.features(0, j));
}

TEST(Semantic, DeterministicAndRateChecked) {
  const auto w = speechish(16000, 4000, 2);
  const auto a = extract_semantic(w, SemanticExtractor::init({}, 5));
  const auto b = extract_semantic(w, SemanticExtractor::init({}, 5));
  EXPECT_EQ(a.features, b.features);
  EXPECT_THROW(extract_semantic(speechish(48000, 4800, 2), models().semantic), RateError);
}

TEST(Quantizer, IdenticalFramesShareIdsAndIdsInRange) {
  auto f = extract_semantic(speechish(16000, 8000, 3), models().semantic);
  for (std::size_t j = 0; j < f.features.cols; ++j) f.features(5, j) = f.features(2, j);
  const auto tok = quantize_tokens(f, models().quantizer);
  ASSERT_EQ(tok.size(), f.frames());
  EXPECT_EQ(tok.ids[5], tok.ids[2]);
  for (int id : tok.ids) {
    EXPECT_GE(id, 0);
    EXPECT_LT(id, 256);
  }
  EXPECT_NO_THROW(tok.validate());
}

TEST(Quantizer, ExactCodewordMapsToItsIndexByExhaustiveScan) {
  const auto& q = models().quantizer;
  for (int k : {0, 17, 128, 255}) {
    const auto c = q.codebook.row(static_cast<std::size_t>(k));
    // Independent scan: k is the unique minimum of squared distance.
    for (std::size_t j = 0; j < q.codebook.rows; ++j) {
      if (static_cast<int>(j) == k) continue;
      double d = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) d += (q.codebook(j, i) - c[i]) * (q.codebook(j, i) - c[i]);
      ASSERT_GT(d, 0.0);
    }
    EXPECT_EQ(q.nearest_codeword(c), k);
  }
}

TEST(Quantizer, WidthMismatchIsAShapeError) {
  SemanticFeatures f{nn::Matrix(3, 10), 20.0};
  EXPECT_THROW(quantize_tokens(f, models().quantizer), ShapeError);
}

TEST(Tokens, FormatParseRoundTripAndRangeCheck) {
  const TokenSequence t{{3, 0, 255, 9}, 256};
  EXPECT_EQ(format_tokens(t), "3\n0\n255\n9\n");
  EXPECT_EQ(parse_tokens(format_tokens(t), 256).ids, t.ids);
  EXPECT_THROW(parse_tokens("1\n256\n", 256), IndexError);
}

TEST(ArLmConfig, HeadsMustDivideHidden) {
  ArLmConfig c;
  EXPECT_EQ(c.vocab(), 257);
  c.num_heads = 5;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(ArDecode, GreedyIsDeterministicWithExpectedShapes) {
  const auto f = extract_semantic(speechish(16000, 6400, 4), models().semantic);
  const auto a = ar_decode(f, models().lm, f.frames());
  const auto b = ar_decode(f, models().lm, f.frames());
  EXPECT_EQ(a.tokens.ids, b.tokens.ids);
  EXPECT_EQ(a.hidden, b.hidden);
  EXPECT_EQ(a.tokens.size(), f.frames());
  EXPECT_EQ(a.hidden.rows, f.frames());
  EXPECT_EQ(a.hidden.cols, 64u);
  for (int id : a.tokens.ids) {
    EXPECT_GE(id, 0);
    EXPECT_LT(id, 256);
  }
  // Argmax of the recorded logits is the emitted token.
  for (std::size_t j = 0; j < a.tokens.size(); ++j) {
    auto z = a.logits.row(j);
    EXPECT_EQ(std::max_element(z.begin(), z.end()) - z.begin(), a.tokens.ids[j]);
  }
}

TEST(ArDecode, ShorterDecodeIsAPrefix) {
  const auto f = extract_semantic(speechish(16000, 6400, 5), models().semantic);
  const auto full = ar_decode(f, models().lm, 12);
  const auto part = ar_decode(f, models().lm, 5);
  for (std::size_t j = 0; j < 5; ++j) {
    EXPECT_EQ(part.tokens.ids[j], full.tokens.ids[j]);
    for (std::size_t c = 0; c < 64; ++c) EXPECT_EQ(part.hidden(j, c), full.hidden(j, c));
  }
}

TEST(ArLm, CausalMaskHidesLaterPositions) {
  const auto& lm = models().lm;
  nn::Matrix x(9, 64, oracle::gaussian(6, 9 * 64));
  const auto base = lm_forward_embeddings(lm, x);
  for (std::size_t c = 0; c < 64; ++c) x(6, c) += 3.0;
  const auto pert = lm_forward_embeddings(lm, x);
  for (std::size_t t = 0; t < 6; ++t)
    for (std::size_t c = 0; c < 64; ++c) EXPECT_EQ(base(t, c), pert(t, c)) << t;
  double moved = 0.0;
  for (std::size_t c = 0; c < 64; ++c) moved += std::abs(base(6, c) - pert(6, c));
  EXPECT_GT(moved, 0.0);
}

TEST(ArLm, TruncatedPrefixGivesIdenticalEarlyOutputs) {
  const auto& lm = models().lm;
  nn::Matrix x(8, 64, oracle::gaussian(7, 8 * 64));
  nn::Matrix head(5, 64, std::vector<double>(x.data.begin(), x.data.begin() + 5 * 64));
  const auto a = lm_forward_embeddings(lm, x), b = lm_forward_embeddings(lm, head);
  for (std::size_t t = 0; t < 5; ++t)
    for (std::size_t c = 0; c < 64; ++c) EXPECT_EQ(a(t, c), b(t, c));
}

TEST(ArLm, TeacherForcedNllMatchesLossModuleAndIsFinite) {
  const auto f = extract_semantic(speechish(16000, 4800, 8), models().semantic);
  const auto targets = quantize_tokens(f, models().quantizer);
  const auto tf = teacher_forced(f, models().lm, targets);
  double manual = 0.0;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    auto z = tf.logits.row(j);
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : z) mx = std::max(mx, v);
    double s = 0.0;
    for (double v : z) s += std::exp(v - mx);
    manual += (mx + std::log(s) - z[static_cast<std::size_t>(targets.ids[j])]) / static_cast<double>(targets.size());
  }
  const double nll = losses::nll_loss(tf.logits, targets.ids);
  EXPECT_TRUE(std::isfinite(nll));
  EXPECT_NEAR(nll, manual, 1e-12);
  // The first teacher-forced step sees the same context as greedy decoding.
  const auto g = ar_decode(f, models().lm, 1);
  for (std::size_t c = 0; c < 64; ++c) EXPECT_EQ(g.hidden(0, c), tf.hidden(0, c));
}

TEST(Dprnn, OutputShapeAndMaskBound) {
  const auto w = speechish(16000, 8000, 9);
  const auto spec = stft(w, gen_stft_config());
  ASSERT_EQ(spec.bins(), 321u);
  nn::Matrix hidden(spec.frames(), 64, oracle::gaussian(10, spec.frames() * 64));
  const auto out = dprnn_refine(spec, hidden, models().dprnn);
  EXPECT_TRUE(out.aligned_with(spec));
  for (std::size_t i = 0; i < out.data().data.size(); ++i) {
    const cplx y = spec.data().data[i];
    if (std::abs(y) > 1e-9) {
      EXPECT_LE(std::abs(out.data().data[i]) / std::abs(y), 2.0 + 1e-12);
    }
  }
}

TEST(Dprnn, BoundedMaskKeepsDirectionAndLimit) {
  for (double a : {-50.0, -0.3, 0.0, 0.2, 7.0}) {
    for (double b : {-9.0, 0.0, 0.01, 30.0}) {
      const cplx m = bounded_mask(a, b, 2.0);
      EXPECT_LE(std::abs(m), 2.0);
      if (a != 0.0 || b != 0.0) {
        EXPECT_NEAR(std::arg(m), std::atan2(b, a), 1e-12);
      }
    }
  }
  EXPECT_EQ(bounded_mask(0.0, 0.0, 2.0), cplx(0.0, 0.0));
}

TEST(Dprnn, ZeroDecoderGivesZeroSpectrum) {
  auto m = DprnnModel::init({}, 11);
  m.zero_decoder();
  const auto spec = stft(speechish(16000, 4000, 12), gen_stft_config());
  nn::Matrix hidden(spec.frames(), 64, oracle::gaussian(13, spec.frames() * 64));
  const auto out = dprnn_refine(spec, hidden, m);
  for (const auto& v : out.data().data) EXPECT_EQ(v, cplx(0.0, 0.0));
}

TEST(Dprnn, FrameMismatchIsAnAlignmentError) {
  const auto spec = stft(speechish(16000, 4000, 14), gen_stft_config());
  nn::Matrix hidden(spec.frames() + 1, 64);
  EXPECT_THROW(dprnn_refine(spec, hidden, models().dprnn), AlignmentError);
  EXPECT_THROW(dprnn_refine(stft(speechish(16000, 4000, 14)), nn::Matrix(41, 64), models().dprnn), ConfigError);
}

TEST(Dprnn, CrossAttentionRowsAreConvexInLmValues) {
  const auto& block = models().dprnn.blocks.front();
  nn::Matrix q(30, 32, oracle::gaussian(15, 30 * 32, 2.0));
  nn::Matrix hidden(7, 64, oracle::gaussian(16, 7 * 64, 2.0));
  const auto att = cross_attend(q, hidden, block);
  const auto v = block.value(hidden);
  for (std::size_t c = 0; c < v.cols; ++c) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t r = 0; r < v.rows; ++r) {
      lo = std::min(lo, v(r, c));
      hi = std::max(hi, v(r, c));
    }
    for (std::size_t r = 0; r < att.rows; ++r) {
      EXPECT_GE(att(r, c), lo - 1e-12);
      EXPECT_LE(att(r, c), hi + 1e-12);
    }
  }
}

TEST(GenEnhance, RunsAtSixteenKilohertzFromAnyRate) {
  for (int rate : {48000, 8000, 44100}) {
    const auto w = speechish(rate, static_cast<std::size_t>(rate / 2), 17);
    const auto out = gen_enhance(w, models());
    EXPECT_EQ(out.sample_rate_hz(), 16000);
    EXPECT_LE(std::abs(static_cast<double>(out.size()) - 8000.0), 320.0) << rate;
  }
}

TEST(GenEnhance, DeterministicAndFrameAligned) {
  const auto w = speechish(24000, 12000, 18);
  EXPECT_EQ(gen_enhance(w, models()), gen_enhance(w, models()));
  const auto w16 = resample(w, 16000);
  const auto tr = gen_trace(w16, models());
  EXPECT_EQ(tr.semantic.frames(), tr.refined.frames());
  EXPECT_EQ(tr.decoded.tokens.size(), tr.refined.frames());
  EXPECT_EQ(tr.decoded.tokens.size(), w16.size() / 320 + 1);
}

TEST(GenConfig, MismatchedWidthsAreRejected) {
  GenConfig c;
  c.lm.prefix_dim = 32;
  EXPECT_THROW(c.validate(), ConfigError);
  GenConfig d;
  d.dprnn.lm_dim = 16;
  EXPECT_THROW(d.validate(), ConfigError);
}
