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

#ifndef HYBRIDSE_SIM_METRICS_HPP_
#define HYBRIDSE_SIM_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "hybridse/error.hpp"
#include "hybridse/signal/stft.hpp"
#include "hybridse/signal/waveform.hpp"

namespace hybridse::sim {

// Reported in place of +/-inf SI-SDR (identical or orthogonal signals).
inline constexpr double kSiSdrReportCap = 100.0;

inline void require_same_length(const Waveform& est, const Waveform& ref, const char* what) {
  if (est.size() != ref.size()) {
    throw ShapeError(std::string(what) + ": length mismatch (" + std::to_string(est.size()) + " vs " +
                     std::to_string(ref.size()) + ")");
  }
}

// Both signals are made zero-mean first. Returns +inf when the residual is
// exactly zero and -inf when est has no component along ref.
inline double si_sdr(const Waveform& est, const Waveform& ref) {
  require_same_length(est, ref, "si_sdr");
  const std::size_t n = ref.size();
  const double me = std::accumulate(est.samples().begin(), est.samples().end(), 0.0) / static_cast<double>(n);
  const double mr = std::accumulate(ref.samples().begin(), ref.samples().end(), 0.0) / static_cast<double>(n);
  std::vector<double> e(n), r(n);
  for (std::size_t i = 0; i < n; ++i) {
    e[i] = est[i] - me;
    r[i] = ref[i] - mr;
  }
  const double rr = energy(r);
  if (rr == 0.0) throw DegenerateInputError("si_sdr: reference is silent");
  const double alpha = dot(e, r) / rr;
  double target = 0.0, residual = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = alpha * r[i];
    target += s * s;
    residual += (e[i] - s) * (e[i] - s);
  }
  if (target == 0.0) return -std::numeric_limits<double>::infinity();
  if (residual == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(target / residual);
}

inline double capped_si_sdr(double v) { return std::clamp(v, -kSiSdrReportCap, kSiSdrReportCap); }

inline constexpr double kLsdEpsilon = 1e-10;
inline constexpr FrameSpec kLsdFrames{512, 256};

inline double lsd(const Waveform& est, const Waveform& ref) {
  require_same_length(est, ref, "lsd");
  if (est.sample_rate_hz() != ref.sample_rate_hz()) throw RateError("lsd: rate mismatch");
  const CMatrix se = stft_frames(est.samples(), kLsdFrames);
  const CMatrix sr = stft_frames(ref.samples(), kLsdFrames);
  double total = 0.0;
  for (std::size_t t = 0; t < se.rows; ++t) {
    double acc = 0.0;
    for (std::size_t k = 0; k < se.cols; ++k) {
      const double d = 20.0 * std::log10(std::abs(se(t, k)) + kLsdEpsilon) -
                       20.0 * std::log10(std::abs(sr(t, k)) + kLsdEpsilon);
      acc += d * d;
    }
    total += std::sqrt(acc / static_cast<double>(se.cols));
  }
  return total / static_cast<double>(se.rows);
}

inline constexpr std::size_t kSegFrame = 320;
inline constexpr std::size_t kSegHop = 160;
inline constexpr double kSegSilence = 1e-8;
inline constexpr double kSegFloorDb = -10.0;
inline constexpr double kSegCeilDb = 35.0;

// Signals shorter than one frame are scored as a single frame.
inline double seg_snr(const Waveform& est, const Waveform& ref) {
  require_same_length(est, ref, "seg_snr");
  const std::size_t n = ref.size();
  const std::size_t frame = std::min(kSegFrame, n);
  const std::size_t count = n <= kSegFrame ? 1 : (n - kSegFrame) / kSegHop + 1;
  double sum = 0.0;
  std::size_t voiced = 0;
  for (std::size_t f = 0; f < count; ++f) {
    double er = 0.0, ee = 0.0;
    for (std::size_t i = f * kSegHop; i < f * kSegHop + frame; ++i) {
      er += ref[i] * ref[i];
      const double d = ref[i] - est[i];
      ee += d * d;
    }
    if (er < kSegSilence) continue;
    const double v = ee == 0.0 ? kSegCeilDb : 10.0 * std::log10(er / ee);
    sum += std::clamp(v, kSegFloorDb, kSegCeilDb);
    ++voiced;
  }
  if (voiced == 0) throw DegenerateInputError("seg_snr: every reference frame is silent");
  return sum / static_cast<double>(voiced);
}

struct MetricRow {
  std::string file;
  double si_sdr_db = 0.0;  // capped
  double lsd_db = 0.0;
  double seg_snr_db = 0.0;
};

inline MetricRow score(const std::string& file, const Waveform& est, const Waveform& ref) {
  return {file, capped_si_sdr(si_sdr(est, ref)), lsd(est, ref), seg_snr(est, ref)};
}

class MetricReport {
 public:
  void add(MetricRow row) { rows_.push_back(std::move(row)); }
  const std::vector<MetricRow>& rows() const { return rows_; }

  MetricRow mean() const {
    MetricRow m{"mean", 0.0, 0.0, 0.0};
    if (rows_.empty()) return m;
    for (const auto& r : rows_) {
      m.si_sdr_db += r.si_sdr_db;
      m.lsd_db += r.lsd_db;
      m.seg_snr_db += r.seg_snr_db;
    }
    const double n = static_cast<double>(rows_.size());
    m.si_sdr_db /= n;
    m.lsd_db /= n;
    m.seg_snr_db /= n;
    return m;
  }

  static constexpr const char* kHeader = "file,si_sdr_db,lsd_db,seg_snr_db";

  std::string to_csv() const {
    std::string out = std::string(kHeader) + "\n";
    auto line = [&](const MetricRow& r) {
      char buf[128];
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g\n", r.si_sdr_db, r.lsd_db, r.seg_snr_db);
      out += r.file + buf;
    };
    for (const auto& r : rows_) line(r);
    if (!rows_.empty()) line(mean());
    return out;
  }

 private:
  std::vector<MetricRow> rows_;
};

}  // namespace hybridse::sim

#endif  // HYBRIDSE_SIM_METRICS_HPP_
