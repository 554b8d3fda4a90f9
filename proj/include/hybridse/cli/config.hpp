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

#ifndef HYBRIDSE_CLI_CONFIG_HPP_
#define HYBRIDSE_CLI_CONFIG_HPP_

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hybridse/error.hpp"
#include "hybridse/fusion/hybrid.hpp"
#include "hybridse/sim/degrade.hpp"
#include "hybridse/signal/wav_io.hpp"

namespace hybridse::cli {

enum class Mode { kHybrid, kDisc, kGen };

inline Mode parse_mode(const std::string& s) {
  if (s == "hybrid") return Mode::kHybrid;
  if (s == "disc") return Mode::kDisc;
  if (s == "gen") return Mode::kGen;
  throw ConfigError("mode must be one of disc, gen, hybrid (got '" + s + "')");
}

inline std::string mode_name(Mode m) {
  switch (m) {
    case Mode::kHybrid: return "hybrid";
    case Mode::kDisc: return "disc";
    case Mode::kGen: return "gen";
  }
  return "?";
}

struct RecipeSpec {
  sim::DegradationRecipe recipe;
  std::string noise_file;  // empty: seeded white noise
};

struct RunConfig {
  Mode mode = Mode::kHybrid;
  int workers = 1;
  std::uint64_t seed = 20260101;
  WavSampleFormat output_format = WavSampleFormat::kFloat32;
  fusion::HybridConfig model;
  std::optional<double> forced_mask;
  std::string disc_model_path, gen_model_path, fusion_model_path;
  std::vector<RecipeSpec> recipes;

  void validate() const {
    if (workers < 1) throw ConfigError("run.workers must be >= 1");
    if (forced_mask && !(*forced_mask >= 0.0 && *forced_mask <= 1.0)) {
      throw ConfigError("fusion.forced_mask must lie in [0, 1]");
    }
    if (model.fusion_hidden == 0) throw ConfigError("fusion.hidden must be positive");
    for (int rate : kSupportedRates) frame_spec(rate, model.stft);
    model.disc.validate();
    model.gen.validate();
    std::set<std::string> names;
    for (const auto& r : recipes) {
      if (!names.insert(r.recipe.name).second) throw ConfigError("duplicate recipe '" + r.recipe.name + "'");
      r.recipe.validate(kSupportedRates.back());
    }
  }
};

namespace detail {

namespace pt = boost::property_tree;

template <class T>
T parse_value(const std::string& section, const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T v{};
  in >> v;
  if (in.fail() || !(in >> std::ws).eof()) {
    throw ConfigError("[" + section + "] " + key + ": cannot parse '" + text + "'");
  }
  return v;
}

inline void assign(const std::string& sec, const std::string& key, const std::string& val, int& out) {
  out = parse_value<int>(sec, key, val);
}
inline void assign(const std::string& sec, const std::string& key, const std::string& val, double& out) {
  out = parse_value<double>(sec, key, val);
}
inline void assign(const std::string& sec, const std::string& key, const std::string& val, std::uint64_t& out) {
  if (!val.empty() && val.front() == '-') throw ConfigError("[" + sec + "] " + key + ": must be non-negative");
  out = parse_value<std::uint64_t>(sec, key, val);
}
inline void assign(const std::string& sec, const std::string& key, const std::string& val, std::size_t& out,
                   int /*tag*/) {
  int v = parse_value<int>(sec, key, val);
  if (v <= 0) throw ConfigError("[" + sec + "] " + key + ": must be positive");
  out = static_cast<std::size_t>(v);
}

}  // namespace detail

// INI-style text: `key = value` lines under [section] headers. Unknown
// sections and keys are rejected.
inline RunConfig parse_config(const std::string& text, const std::string& origin = "<config>") {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  RunConfig cfg;
  auto& m = cfg.model;
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) throw ConfigError(origin + ": key '" + section + "' outside any section");
    auto each = [&](auto&& handle) {
      for (const auto& [key, node] : body) {
        if (!handle(key, node.data())) {
          throw ConfigError(origin + ": unknown key '" + key + "' in [" + section + "]");
        }
      }
    };
    using detail::assign;
    if (section == "run") {
      each([&](const std::string& k, const std::string& v) {
        if (k == "mode") cfg.mode = parse_mode(v);
        else if (k == "workers") assign(section, k, v, cfg.workers);
        else if (k == "seed") assign(section, k, v, cfg.seed);
        else if (k == "output_format") {
          if (v == "float32") cfg.output_format = WavSampleFormat::kFloat32;
          else if (v == "float64") cfg.output_format = WavSampleFormat::kFloat64;
          else if (v == "pcm16") cfg.output_format = WavSampleFormat::kPcm16;
          else throw ConfigError("[run] output_format must be float32, float64 or pcm16");
        } else return false;
        return true;
      });
    } else if (section == "stft") {
      each([&](const std::string& k, const std::string& v) {
        if (k == "window_ms") assign(section, k, v, m.stft.window_ms);
        else if (k == "hop_ms") assign(section, k, v, m.stft.hop_ms);
        else return false;
        return true;
      });
    } else if (section == "disc") {
      each([&](const std::string& k, const std::string& v) {
        if (k == "blocks") assign(section, k, v, m.disc.num_blocks);
        else if (k == "embed_dim") assign(section, k, v, m.disc.embed_dim);
        else if (k == "lstm_hidden") assign(section, k, v, m.disc.lstm_hidden);
        else if (k == "model") cfg.disc_model_path = v;
        else return false;
        return true;
      });
    } else if (section == "gen") {
      each([&](const std::string& k, const std::string& v) {
        auto& g = m.gen;
        if (k == "n_mels") assign(section, k, v, g.semantic.n_mels);
        else if (k == "feat_dim") assign(section, k, v, g.semantic.feat_dim);
        else if (k == "code_dim") assign(section, k, v, g.code_dim);
        else if (k == "codebook_size") assign(section, k, v, g.lm.codebook_size);
        else if (k == "lm_layers") assign(section, k, v, g.lm.num_layers);
        else if (k == "lm_hidden") assign(section, k, v, g.lm.hidden_dim);
        else if (k == "lm_heads") assign(section, k, v, g.lm.num_heads);
        else if (k == "lm_ffn") assign(section, k, v, g.lm.ffn_dim);
        else if (k == "dprnn_blocks") assign(section, k, v, g.dprnn.num_blocks);
        else if (k == "dprnn_channels") assign(section, k, v, g.dprnn.channels);
        else if (k == "mask_bound") assign(section, k, v, g.dprnn.mask_bound);
        else if (k == "model") cfg.gen_model_path = v;
        else return false;
        return true;
      });
      m.gen.lm.prefix_dim = m.gen.semantic.feat_dim;
      m.gen.dprnn.lm_dim = m.gen.lm.hidden_dim;
    } else if (section == "fusion") {
      each([&](const std::string& k, const std::string& v) {
        if (k == "hidden") assign(section, k, v, m.fusion_hidden, 0);
        else if (k == "model") cfg.fusion_model_path = v;
        else if (k == "forced_mask") {
          double x = 0.0;
          assign(section, k, v, x);
          cfg.forced_mask = x;
        } else return false;
        return true;
      });
    } else if (section.rfind("recipe.", 0) == 0 && section.size() > 7) {
      RecipeSpec r;
      r.recipe.name = section.substr(7);
      bool have_steps = false;
      each([&](const std::string& k, const std::string& v) {
        if (k == "steps") {
          r.recipe.steps = sim::parse_steps(v);
          have_steps = true;
        } else if (k == "seed") assign(section, k, v, r.recipe.seed);
        else if (k == "noise_file") r.noise_file = v;
        else return false;
        return true;
      });
      if (!have_steps) throw ConfigError(origin + ": [" + section + "] needs a steps key");
      cfg.recipes.push_back(std::move(r));
    } else {
      throw ConfigError(origin + ": unknown section [" + section + "]");
    }
  }
  cfg.validate();
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

// Builds seeded models and overlays any archives named in the config.
inline fusion::HybridModels build_models(const RunConfig& cfg) {
  auto models = fusion::HybridModels::init(cfg.model, cfg.seed);
  auto overlay = [](auto& model, const std::string& path) {
    if (path.empty()) return;
    if (!std::filesystem::is_regular_file(path)) throw ConfigError(path + ": model archive is not a file");
    try {
      nn::from_archive(model, nn::TensorArchive::load(path));
    } catch (const FormatError& e) {
      throw FormatError(path + ": " + e.what());
    }
  };
  overlay(models.disc, cfg.disc_model_path);
  overlay(models.gen, cfg.gen_model_path);
  overlay(models.fusion, cfg.fusion_model_path);
  return models;
}

}  // namespace hybridse::cli

#endif  // HYBRIDSE_CLI_CONFIG_HPP_
