// Copyright 2026 The bivi Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// bivi: command line front end for the experiment harness.
//
//   bivi run    --config FILE [--preset NAME] [--out DIR] [--check LEVEL]
//   bivi sweep  --config FILE [--preset NAME] --grid FILE --out DIR
//   bivi verify --records CSV
//
// Exit codes: 0 ok, 2 invariant violation, 3 divergence, 4 config error,
// 1 any other failure (for instance I/O).

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bivi/harness/config.hpp"
#include "bivi/harness/experiment.hpp"
#include "bivi/harness/verify.hpp"

namespace {

using nlohmann::json;

json resolve_config(const std::string& config_path, const std::string& preset) {
  if (config_path.empty() && preset.empty()) {
    throw bivi::ConfigError("either --config or --preset is required");
  }
  json j = preset.empty() ? json::object() : bivi::preset_json(preset);
  if (!config_path.empty()) j = bivi::merge_config(std::move(j), bivi::load_json_file(config_path));
  return j;
}

void print_run(const bivi::RunOutcome& r, const std::string& out) {
  std::printf("run %s: %ld iterations, stop=%s, invariants=%s, bounds=%s, exit=%d\n",
              r.summary.value("run_id", std::string()).c_str(), r.iterations,
              std::string(bivi::to_string(r.reason)).c_str(), r.invariants_ok ? "ok" : "VIOLATED",
              r.bounds_ok ? "ok" : "VIOLATED", r.exit_code);
  const json& fin = r.summary["final"];
  if (fin.contains("err_x")) std::printf("  final |x - x*| = %.6e\n", fin["err_x"].get<double>());
  if (r.summary.contains("divergence")) {
    std::printf("  divergence: %s\n", r.summary["divergence"].get<std::string>().c_str());
  }
  std::printf("  wrote %s/{records.csv,summary.json,config.json}\n", out.c_str());
}

int cmd_run(const std::string& config_path, const std::string& preset, std::string out,
            const std::string& check) {
  json j = resolve_config(config_path, preset);
  if (!check.empty()) j["check_level"] = check;
  bivi::RunConfig cfg = bivi::parse_run_config(j);
  if (out.empty()) out = cfg.output.empty() ? "runs/" + cfg.name : cfg.output;
  const bivi::RunOutcome r = bivi::run_experiment(cfg, out);
  print_run(r, out);
  return r.exit_code;
}

int cmd_sweep(const std::string& config_path, const std::string& preset,
              const std::string& grid_path, const std::string& out) {
  const json base = resolve_config(config_path, preset);
  const auto variants = bivi::parse_grid(bivi::load_json_file(grid_path));
  const unsigned threads = bivi::thread_budget();
  const bivi::SweepOutcome s = bivi::run_sweep(base, variants, out, threads);
  for (std::size_t i = 0; i < s.names.size(); ++i) {
    std::printf("variant %-24s exit=%d%s%s\n", s.names[i].c_str(), s.exit_codes[i],
                s.errors[i].empty() ? "" : " error: ", s.errors[i].c_str());
  }
  std::printf("wrote %s/compare.csv (%zu rows) using %u worker(s)\n", out.c_str(),
              s.compare.size(), threads);
  return s.exit_code;
}

int cmd_verify(const std::string& records) {
  const bivi::RecordTable t = bivi::RecordTable::read_csv(records);
  const bivi::VerifyResult v = bivi::verify_records(t);
  for (const auto& m : v.messages) std::printf("violation: %s\n", m.c_str());
  std::printf("verify %s: %ld checks, %ld violations\n", records.c_str(), v.checked,
              v.violations);
  return v.ok() ? bivi::kExitOk : bivi::kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bivi: inertial regularized extragradient experiments"};
  app.require_subcommand(1);

  std::string config, preset, out, check, grid, records;

  auto* run = app.add_subcommand("run", "run one experiment");
  run->add_option("--config", config, "run config JSON")->check(CLI::ExistingFile);
  run->add_option("--preset", preset, "built-in parameters: example1, example2 or example3");
  run->add_option("--out", out, "output directory");
  run->add_option("--check", check, "invariant checks")
      ->check(CLI::IsMember({"off", "sampled", "full"}));

  auto* sweep = app.add_subcommand("sweep", "run a grid of variants");
  sweep->add_option("--config", config, "base run config JSON")->check(CLI::ExistingFile);
  sweep->add_option("--preset", preset, "built-in base parameters");
  sweep->add_option("--grid", grid, "grid JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out, "output directory")->required();

  auto* verify = app.add_subcommand("verify", "re-check a records.csv");
  verify->add_option("--records", records, "records CSV")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return bivi::kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, preset, out, check);
    if (*sweep) return cmd_sweep(config, preset, grid, out);
    if (*verify) return cmd_verify(records);
  } catch (const bivi::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return bivi::kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
