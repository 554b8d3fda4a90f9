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

#include <CLI11.hpp>
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hybridse/cli/commands.hpp"
#include "hybridse/cli/config.hpp"
#include "hybridse/error.hpp"

namespace {

struct GlobalFlags {
  std::string config;
  std::string mode;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
};

hybridse::cli::RunConfig resolve(const GlobalFlags& g) {
  hybridse::cli::RunConfig cfg = g.config.empty() ? hybridse::cli::RunConfig{} : hybridse::cli::load_config(g.config);
  if (!g.mode.empty()) cfg.mode = hybridse::cli::parse_mode(g.mode);
  if (g.workers) cfg.workers = *g.workers;
  if (g.seed) cfg.seed = *g.seed;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace hybridse::cli;
  CLI::App app{"hybridse: hybrid discriminative/generative speech enhancement"};
  app.require_subcommand(1);
  GlobalFlags g;
  auto add_globals = [&g](CLI::App* cmd) {
    cmd->add_option("--config", g.config, "INI config file");
    cmd->add_option("--mode", g.mode, "disc, gen or hybrid")->check(CLI::IsMember({"disc", "gen", "hybrid"}));
    cmd->add_option("--workers", g.workers, "parallel file workers")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", g.seed, "model seed (u64)");
  };

  EnhanceOptions enh;
  std::vector<std::string> enh_inputs;
  auto* enhance = app.add_subcommand("enhance", "enhance WAV files");
  add_globals(enhance);
  enhance->add_option("inputs", enh_inputs, "WAV files or directories")->required();
  enhance->add_option("-o,--output", enh.output_dir, "output directory")->required();
  enhance->add_option("--reference", enh.reference_dir, "directory of same-named clean references");
  enhance->add_flag("--tokens", enh.write_tokens, "also write decoded token ids");

  std::vector<std::string> sim_inputs;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "degrade clean WAV files with the configured recipes");
  add_globals(simulate);
  simulate->add_option("inputs", sim_inputs, "clean WAV files or directories")->required();
  simulate->add_option("-o,--output", sim_out, "output directory")->required();

  std::string est_dir, ref_dir, csv_path;
  auto* evaluate = app.add_subcommand("evaluate", "score estimates against references");
  add_globals(evaluate);
  evaluate->add_option("estimates", est_dir, "estimate directory")->required();
  evaluate->add_option("references", ref_dir, "reference directory")->required();
  evaluate->add_option("--csv", csv_path, "also write the report to this file");

  std::string only;
  auto* selftest = app.add_subcommand("selftest", "run the built-in invariant checks");
  add_globals(selftest);
  selftest->add_option("--only", only, "run only checks whose name starts with this prefix");

  std::string export_dir;
  auto* exporter = app.add_subcommand("export-models", "write the configured model weights as tensor archives");
  add_globals(exporter);
  exporter->add_option("-o,--output", export_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    const RunConfig cfg = resolve(g);
    if (*enhance) return cmd_enhance(cfg, enh_inputs, enh, std::cout, std::cerr);
    if (*simulate) return cmd_simulate(cfg, sim_inputs, sim_out, std::cout, std::cerr);
    if (*evaluate) return cmd_evaluate(cfg, est_dir, ref_dir, csv_path, std::cout, std::cerr);
    if (*selftest) return cmd_selftest(cfg, only, std::cout, std::cerr);
    if (*exporter) return cmd_export_models(cfg, export_dir, std::cout);
  } catch (const hybridse::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
