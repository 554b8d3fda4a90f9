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

#ifndef HYBRIDSE_LOSSES_LOSS_REPORT_HPP_
#define HYBRIDSE_LOSSES_LOSS_REPORT_HPP_

#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <string>
#include <vector>

#include "hybridse/error.hpp"

namespace hybridse::losses {

// Named loss terms with rational weights numerator/denominator. The total is
// (sum_i numerator_i * value_i) / denominator, so decimal weights such as
// 0.1 or 0.01 are applied without first rounding them to binary.
class LossReport {
 public:
  struct Term {
    std::string name;
    double value;
    std::int64_t weight_numerator;
  };

  LossReport() = default;
  LossReport(std::vector<Term> terms, std::int64_t denominator)
      : terms_(std::move(terms)), denominator_(denominator) {
    if (denominator_ <= 0) throw ConfigError("LossReport: denominator must be positive");
    total_ = recompute_total();
  }

  const std::vector<Term>& terms() const { return terms_; }
  std::int64_t denominator() const { return denominator_; }
  double total() const { return total_; }

  double weight(const std::string& name) const { return static_cast<double>(term(name).weight_numerator) / static_cast<double>(denominator_); }
  double value(const std::string& name) const { return term(name).value; }
  bool has(const std::string& name) const {
    for (const auto& t : terms_) {
      if (t.name == name) return true;
    }
    return false;
  }

  double recompute_total() const {
    double acc = 0.0;
    for (const auto& t : terms_) acc += static_cast<double>(t.weight_numerator) * t.value;
    return acc / static_cast<double>(denominator_);
  }

  // Unweighted extra values carried along for logging (e.g. sub-terms of a
  // nested report). They never enter the total.
  std::vector<std::pair<std::string, double>> details;

  // "name=value" pairs separated by spaces, total last.
  std::string to_kv_text() const {
    std::string out;
    for (const auto& t : terms_) out += t.name + "=" + fmt(t.value) + " ";
    for (const auto& [k, v] : details) out += k + "=" + fmt(v) + " ";
    out += "total=" + fmt(total_);
    return out;
  }

  static std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }

 private:
  const Term& term(const std::string& name) const {
    for (const auto& t : terms_) {
      if (t.name == name) return t;
    }
    throw IndexError("LossReport: no term named '" + name + "'");
  }

  std::vector<Term> terms_;
  std::int64_t denominator_ = 1;
  double total_ = 0.0;
};

// Regression objective of the spectral head:
// 0.1 * complex + 0.9 * magnitude + 0.01 * perceptual.
inline LossReport compose_regression(double complex_mse, double magnitude_mse, double perceptual) {
  return LossReport({{"complex", complex_mse, 10}, {"magnitude", magnitude_mse, 90}, {"perceptual", perceptual, 1}}, 100);
}

// Generative-branch objective: token NLL + regression, unweighted.
inline LossReport compose_gen(double nll, const LossReport& reg) {
  LossReport r({{"nll", nll, 1}, {"reg", reg.total(), 1}}, 1);
  for (const auto& t : reg.terms()) r.details.emplace_back("reg." + t.name, t.value);
  return r;
}

// Fusion objective: mstft + 0.5 * l1 + sqa.
inline LossReport compose_fusion(double mstft, double l1, double sqa) {
  return LossReport({{"mstft", mstft, 2}, {"l1", l1, 1}, {"sqa", sqa, 2}}, 2);
}

}  // namespace hybridse::losses

#endif  // HYBRIDSE_LOSSES_LOSS_REPORT_HPP_
