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

#ifndef HYBRIDSE_CLI_COMMANDS_HPP_
#define HYBRIDSE_CLI_COMMANDS_HPP_

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "hybridse/cli/config.hpp"
#include "hybridse/cli/selftest.hpp"
#include "hybridse/fusion/hybrid.hpp"
#include "hybridse/gen/gen_branch.hpp"
#include "hybridse/gen/quantizer.hpp"
#include "hybridse/nn/tensor_io.hpp"
#include "hybridse/sim/degrade.hpp"
#include "hybridse/sim/metrics.hpp"
#include "hybridse/signal/resample.hpp"
#include "hybridse/signal/wav_io.hpp"

namespace hybridse::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kExitOk = 0, kExitInput = 1, kExitVerify = 2, kExitInternal = 3 };

// Files are taken as given; directories contribute their *.wav entries.
// The result is sorted by file name.
inline std::vector<fs::path> collect_wavs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == ".wav") out.push_back(e.path());
      }
    } else {
      out.push_back(p);
    }
  }
  std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename() == b.filename() ? a < b : a.filename() < b.filename();
  });
  return out;
}

// Runs job(i) for i in [0, n) on `workers` threads.
template <class Job>
void parallel_for(std::size_t n, int workers, Job&& job) {
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, workers)), std::max<std::size_t>(n, 1));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < w; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) job(i);
    });
  }
  for (auto& th : pool) th.join();
}

// Brings an estimate onto the reference rate and length for scoring.
inline Waveform align_to(const Waveform& est, const Waveform& ref) {
  const Waveform r = resample(est, ref.sample_rate_hz());
  return Waveform(fit_length(r.samples(), ref.size()), ref.sample_rate_hz());
}

struct EnhanceOptions {
  std::string output_dir;
  std::string reference_dir;
  bool write_tokens = false;
};

inline int cmd_enhance(const RunConfig& cfg, const std::vector<std::string>& inputs, const EnhanceOptions& opt,
                       std::ostream& out, std::ostream& err) {
  const auto files = collect_wavs(inputs);
  if (files.empty()) {
    err << "enhance: no input files\n";
    return kExitInput;
  }
  fs::create_directories(opt.output_dir);
  const fusion::HybridModels models = build_models(cfg);
  fusion::HybridOptions hopt;
  hopt.forced_mask = cfg.forced_mask;

  std::vector<std::string> errors(files.size());
  std::vector<std::optional<sim::MetricRow>> rows(files.size());
  std::atomic<bool> internal{false};
  parallel_for(files.size(), cfg.workers, [&](std::size_t i) {
    const std::string name = files[i].filename().string();
    try {
      const Waveform in = read_wav(files[i].string());
      Waveform result = [&] {
        switch (cfg.mode) {
          case Mode::kDisc: return fusion::disc_only_enhance(in, models);
          case Mode::kGen: return gen::gen_enhance(in, models.gen);
          case Mode::kHybrid: break;
        }
        return fusion::hybrid_enhance(in, models, hopt);
      }();
      write_wav((fs::path(opt.output_dir) / name).string(), result, cfg.output_format);
      if (opt.write_tokens && cfg.mode != Mode::kDisc) {
        const auto trace = gen::gen_trace(resample(in, gen::kGenRate), models.gen);
        std::ofstream tok(fs::path(opt.output_dir) / (files[i].stem().string() + ".tokens"));
        tok << gen::format_tokens(trace.decoded.tokens);
      }
      if (!opt.reference_dir.empty()) {
        const Waveform ref = read_wav((fs::path(opt.reference_dir) / name).string());
        rows[i] = sim::score(name, align_to(result, ref), ref);
      }
    } catch (const Error& e) {
      errors[i] = e.what();
    } catch (const std::exception& e) {
      errors[i] = std::string("internal: ") + e.what();
      internal = true;
    }
  });

  int failures = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!errors[i].empty()) {
      err << "enhance: " << files[i].string() << ": " << errors[i] << "\n";
      ++failures;
    }
  }
  if (!opt.reference_dir.empty()) {
    sim::MetricReport report;
    for (auto& r : rows) {
      if (r) report.add(*r);
    }
    const std::string csv = report.to_csv();
    std::ofstream(fs::path(opt.output_dir) / "metrics.csv") << csv;
    out << csv;
  }
  out << "enhance: " << files.size() - failures << "/" << files.size() << " files written to " << opt.output_dir
      << " (mode " << mode_name(cfg.mode) << ")\n";
  if (internal) return kExitInternal;
  return failures ? kExitInput : kExitOk;
}

inline constexpr const char* kManifestHeader = "clean,degraded,recipe,seed,snr_db";

// Per-file recipe seed: the recipe seed mixed with the clean file name.
inline std::uint64_t file_recipe_seed(const sim::DegradationRecipe& r, const std::string& clean_name) {
  return derive_seed(r.seed, clean_name);
}

inline int cmd_simulate(const RunConfig& cfg, const std::vector<std::string>& inputs, const std::string& output_dir,
                        std::ostream& out, std::ostream& err) {
  const auto files = collect_wavs(inputs);
  if (files.empty()) {
    err << "simulate: empty input set\n";
    return kExitInput;
  }
  if (cfg.recipes.empty()) {
    err << "simulate: no [recipe.NAME] sections in the config\n";
    return kExitInput;
  }
  fs::create_directories(output_dir);
  std::vector<std::optional<Waveform>> noises;
  for (const auto& r : cfg.recipes) {
    noises.push_back(r.noise_file.empty() ? std::nullopt : std::optional<Waveform>(read_wav(r.noise_file)));
  }

  const std::size_t jobs = files.size() * cfg.recipes.size();
  std::vector<std::string> lines(jobs), errors(jobs);
  std::atomic<bool> internal{false};
  parallel_for(jobs, cfg.workers, [&](std::size_t j) {
    const auto& file = files[j / cfg.recipes.size()];
    const std::size_t ri = j % cfg.recipes.size();
    const auto& spec = cfg.recipes[ri];
    try {
      const Waveform clean = read_wav(file.string());
      sim::DegradationRecipe recipe = spec.recipe;
      recipe.seed = file_recipe_seed(spec.recipe, file.filename().string());
      std::optional<Waveform> noise;
      if (noises[ri]) noise = resample(*noises[ri], clean.sample_rate_hz());
      const auto res = sim::apply_recipe_traced(clean, recipe, noise);
      const std::string name = file.stem().string() + "__" + recipe.name + ".wav";
      write_wav((fs::path(output_dir) / name).string(), res.wave, cfg.output_format);
      std::string snr;
      if (!res.measured_snr_db.empty()) snr = losses::LossReport::fmt(res.measured_snr_db.front());
      lines[j] = file.string() + "," + name + "," + recipe.name + "," + std::to_string(recipe.seed) + "," + snr;
    } catch (const Error& e) {
      errors[j] = file.string() + " [" + spec.recipe.name + "]: " + e.what();
    } catch (const std::exception& e) {
      errors[j] = file.string() + " [" + spec.recipe.name + "]: internal: " + e.what();
      internal = true;
    }
  });

  std::ofstream manifest(fs::path(output_dir) / "manifest.csv");
  manifest << kManifestHeader << "\n";
  int failures = 0;
  for (std::size_t j = 0; j < jobs; ++j) {
    if (!errors[j].empty()) {
      err << "simulate: " << errors[j] << "\n";
      ++failures;
    } else {
      manifest << lines[j] << "\n";
    }
  }
  out << "simulate: " << jobs - failures << " degraded files, manifest at "
      << (fs::path(output_dir) / "manifest.csv").string() << "\n";
  if (internal) return kExitInternal;
  return failures ? kExitInput : kExitOk;
}

// Scores every estimate against the same-named reference. Estimates at a
// different rate are resampled to the reference rate first.
inline int cmd_evaluate(const RunConfig& cfg, const std::string& est_dir, const std::string& ref_dir,
                        const std::string& csv_path, std::ostream& out, std::ostream& err) {
  std::map<std::string, fs::path> est, ref;
  for (const auto& p : collect_wavs({est_dir})) est[p.filename().string()] = p;
  for (const auto& p : collect_wavs({ref_dir})) ref[p.filename().string()] = p;
  int problems = 0;
  for (const auto& [name, p] : est) {
    if (!ref.count(name)) {
      err << "evaluate: unmatched estimate " << name << " (no reference)\n";
      ++problems;
    }
  }
  for (const auto& [name, p] : ref) {
    if (!est.count(name)) {
      err << "evaluate: unmatched reference " << name << " (no estimate)\n";
      ++problems;
    }
  }
  std::vector<std::string> names;
  for (const auto& [name, p] : est) {
    if (ref.count(name)) names.push_back(name);
  }
  if (names.empty() && problems == 0) {
    err << "evaluate: no files to score\n";
    return kExitInput;
  }
  std::vector<std::optional<sim::MetricRow>> rows(names.size());
  std::vector<std::string> errors(names.size());
  std::atomic<bool> internal{false};
  parallel_for(names.size(), cfg.workers, [&](std::size_t i) {
    try {
      const Waveform r = read_wav(ref[names[i]].string());
      const Waveform e = read_wav(est[names[i]].string());
      rows[i] = sim::score(names[i], align_to(e, r), r);
    } catch (const Error& ex) {
      errors[i] = ex.what();
    } catch (const std::exception& ex) {
      errors[i] = std::string("internal: ") + ex.what();
      internal = true;
    }
  });
  sim::MetricReport report;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (rows[i]) {
      report.add(*rows[i]);
    } else {
      err << "evaluate: " << names[i] << ": " << errors[i] << "\n";
      ++problems;
    }
  }
  const std::string csv = report.to_csv();
  if (!csv_path.empty()) std::ofstream(csv_path) << csv;
  out << csv;
  if (internal) return kExitInternal;
  return problems ? kExitInput : kExitOk;
}

inline int cmd_selftest(const RunConfig& cfg, const std::string& only, std::ostream& out, std::ostream& err) {
  const fusion::HybridModels models = build_models(cfg);
  const auto checks = selftest_checks(models);
  std::size_t ran = 0, failed = 0;
  for (const auto& c : checks) {
    if (!only.empty() && c.name.rfind(only, 0) != 0) continue;
    ++ran;
    CheckResult r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = CheckResult{c.name, false, std::string("threw: ") + e.what()};
    }
    char line[96];
    std::snprintf(line, sizeof line, "%-26s %s  ", r.name.c_str(), r.pass ? "PASS" : "FAIL");
    out << line << r.detail << "\n";
    if (!r.pass) {
      err << "selftest: check failed: " << r.name << "\n";
      ++failed;
    }
  }
  if (ran == 0) {
    err << "selftest: no check matches '" << only << "'\n";
    return kExitInput;
  }
  out << ran - failed << "/" << ran << " checks passed\n";
  return failed ? kExitVerify : kExitOk;
}

// Writes disc.hst, gen.hst and fusion.hst for the configured models.
inline int cmd_export_models(const RunConfig& cfg, const std::string& output_dir, std::ostream& out) {
  fs::create_directories(output_dir);
  fusion::HybridModels models = build_models(cfg);
  nn::to_archive(models.disc).save((fs::path(output_dir) / "disc.hst").string());
  nn::to_archive(models.gen).save((fs::path(output_dir) / "gen.hst").string());
  nn::to_archive(models.fusion).save((fs::path(output_dir) / "fusion.hst").string());
  out << "export-models: wrote disc.hst, gen.hst, fusion.hst to " << output_dir << "\n";
  return kExitOk;
}

}  // namespace hybridse::cli

#endif  // HYBRIDSE_CLI_COMMANDS_HPP_
