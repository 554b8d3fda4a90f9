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

#ifndef HYBRIDSE_GEN_QUANTIZER_HPP_
#define HYBRIDSE_GEN_QUANTIZER_HPP_

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "hybridse/error.hpp"
#include "hybridse/gen/semantic.hpp"
#include "hybridse/nn/matrix.hpp"
#include "hybridse/nn/tensor_io.hpp"

namespace hybridse::gen {

// Discrete codes of a single codebook, i.e. the first residual layer of a
// neural codec.
struct TokenSequence {
  std::vector<int> ids;
  int codebook_size = 256;

  std::size_t size() const { return ids.size(); }
  void validate() const {
    for (int id : ids) {
      if (id < 0 || id >= codebook_size) {
        throw IndexError("token id " + std::to_string(id) + " outside [0, " +
                         std::to_string(codebook_size) + ")");
      }
    }
  }
  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

// Frozen random projection followed by nearest-codeword search on the unit
// sphere. Codewords are unit-norm.
struct TokenQuantizer {
  nn::Matrix projection;  // feat_dim x code_dim
  nn::Matrix codebook;    // codebook_size x code_dim

  static TokenQuantizer init(int feat_dim, int code_dim, int codebook_size, std::uint64_t seed) {
    if (feat_dim <= 0 || code_dim <= 0 || codebook_size <= 0) {
      throw ConfigError("TokenQuantizer: dims must be positive");
    }
    Rng rng(seed);
    TokenQuantizer q;
    q.projection = nn::Matrix(static_cast<std::size_t>(feat_dim), static_cast<std::size_t>(code_dim));
    for (double& v : q.projection.data) v = rng.normal() / std::sqrt(static_cast<double>(feat_dim));
    q.codebook = nn::Matrix(static_cast<std::size_t>(codebook_size), static_cast<std::size_t>(code_dim));
    for (std::size_t k = 0; k < q.codebook.rows; ++k) {
      auto r = q.codebook.row(k);
      double n2 = 0.0;
      for (double& v : r) {
        v = rng.normal();
        n2 += v * v;
      }
      const double inv = 1.0 / std::sqrt(n2);
      for (double& v : r) v *= inv;
    }
    return q;
  }

  int codebook_size() const { return static_cast<int>(codebook.rows); }

  // Index of the closest codeword (smallest index on exact ties).
  int nearest_codeword(std::span<const double> code) const {
    nn::require(code.size() == codebook.cols, "quantizer: code width mismatch");
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < codebook.rows; ++k) {
      auto c = codebook.row(k);
      double d = 0.0;
      for (std::size_t j = 0; j < c.size(); ++j) d += (code[j] - c[j]) * (code[j] - c[j]);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(k);
      }
    }
    return best;
  }

  // Projects one feature row and normalizes it onto the unit sphere.
  std::vector<double> embed(std::span<const double> feature) const {
    nn::require(feature.size() == projection.rows,
                "quantizer: feature width " + std::to_string(feature.size()) +
                    " does not match projection input " + std::to_string(projection.rows));
    std::vector<double> code(projection.cols, 0.0);
    nn::vec_mat_accumulate(feature, projection, code);
    double n2 = 0.0;
    for (double v : code) n2 += v * v;
    if (n2 > 0.0) {
      const double inv = 1.0 / std::sqrt(n2);
      for (double& v : code) v *= inv;
    }
    return code;
  }

  void collect_params(std::vector<nn::ParamRef>& out) {
    nn::add_param(out, "projection", projection);
    nn::add_param(out, "codebook", codebook);
  }
};

inline TokenSequence quantize_tokens(const SemanticFeatures& features, const TokenQuantizer& q) {
  TokenSequence seq;
  seq.codebook_size = q.codebook_size();
  seq.ids.reserve(features.frames());
  for (std::size_t t = 0; t < features.frames(); ++t) {
    seq.ids.push_back(q.nearest_codeword(q.embed(features.features.row(t))));
  }
  return seq;
}

// Newline-delimited integer ids.
inline std::string format_tokens(const TokenSequence& seq) {
  std::ostringstream os;
  for (int id : seq.ids) os << id << '\n';
  return os.str();
}

inline TokenSequence parse_tokens(const std::string& text, int codebook_size) {
  TokenSequence seq;
  seq.codebook_size = codebook_size;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::size_t used = 0;
    int id = 0;
    try {
      id = std::stoi(line, &used);
    } catch (const std::exception&) {
      throw FormatError("token list: not an integer: '" + line + "'");
    }
    if (used != line.size()) throw FormatError("token list: trailing characters in '" + line + "'");
    seq.ids.push_back(id);
  }
  seq.validate();
  return seq;
}

}  // namespace hybridse::gen

#endif  // HYBRIDSE_GEN_QUANTIZER_HPP_
