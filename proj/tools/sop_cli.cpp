// SPDX-License-Identifier: Apache-2.0
//
// Copyright (C) 2026 The sop authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// sop: classify patterns, build atlases, simulate soundings and identify
// channels. Thin shell over the C interface in libsop.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sop/sop.h"

using nlohmann::json;

namespace {

std::optional<std::uint64_t> seed_from_env() {
  const char* env = std::getenv("SOP_SEED");
  if (!env || !*env) return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used, 0);
    if (used != std::string(env).size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

using Runner = sop_status (*)(const char*, int*, char**);

int run(Runner fn, const json& config) {
  int exit_code = 1;
  char* report = nullptr;
  const sop_status st = fn(config.dump().c_str(), &exit_code, &report);
  if (report) {
    std::cout << report << '\n';
    sop_string_free(report);
  }
  if (st != SOP_OK) {
    std::cerr << "sop: " << sop_status_name(st) << ": " << sop_last_error() << '\n';
    if (exit_code == 0) exit_code = 1;
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic operator identification by delta-train sounding"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sop_version()));

  std::optional<std::uint64_t> seed;
  int jobs = 1;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Random seed (falls back to SOP_SEED)");
    sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  };

  std::string pattern, out, mode = "tensor", path = "exact", in, window;
  int trials = 0, L = 3, M = 4, budget = -1, factors = 2;
  double a = 1.0;
  std::optional<double> tolerance;
  std::uint64_t realizations = 1;
  bool diagrams = false, unimodular = false, with_truth = false;
  std::vector<int> boxes;

  auto* classify = app.add_subcommand("classify", "Classify an SPD pattern as permissible or defective");
  classify->add_option("--pattern", pattern, "Pattern JSON file")->required()->check(CLI::ExistingFile);
  classify->add_option("--trials", trials, "Random windows to test (default 100)");
  classify->add_option("--out", out, "Report file");
  add_common(classify);

  auto* atlas = app.add_subcommand("atlas", "Enumerate and classify every SPD pattern for small L");
  atlas->add_option("--L", L, "Grid size (2 or 3)")->required();
  atlas->add_option("--budget", budget, "Largest pattern size (default L^2)");
  atlas->add_option("--trials", trials, "Random windows per pattern (default 16)");
  atlas->add_option("--out", out, "Output directory")->required();
  atlas->add_flag("--diagrams", diagrams, "Also write text and PGM renderings");
  add_common(atlas);

  auto* simulate = app.add_subcommand("simulate", "Simulate delta-train soundings of a stochastic channel");
  simulate->add_option("--mode", mode, "tensor | general | wssus")
      ->check(CLI::IsMember({"tensor", "general", "wssus"}));
  simulate->add_option("--L", L, "Grid size");
  simulate->add_option("--M", M, "Samples per box edge");
  simulate->add_option("--a", a, "Box width in time; b = 1 / (a L)");
  simulate->add_option("--realizations", realizations, "Number of response records");
  simulate->add_option("--pattern", pattern, "Pattern JSON (general: support; tensor: boxes from its diagonal)");
  simulate->add_option("--window", window, "Window JSON (default: random from the seed)");
  simulate->add_option("--factors", factors, "Random factors per clique");
  simulate->add_option("--boxes", boxes, "WSSUS support boxes (flat indices)")->delimiter(',');
  simulate->add_flag("--unimodular", unimodular, "Draw a unimodular window");
  simulate->add_flag("--with-truth", with_truth, "Store ground truth next to the records");
  simulate->add_option("--out", out, "Output directory")->required();
  add_common(simulate);

  auto* identify = app.add_subcommand("identify", "Reconstruct a channel from a simulated dataset");
  identify->add_option("--mode", mode, "tensor | general | wssus")
      ->check(CLI::IsMember({"tensor", "general", "wssus"}));
  identify->add_option("--path", path, "exact | empirical")->check(CLI::IsMember({"exact", "empirical"}));
  identify->add_option("--in", in, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  identify->add_option("--out", out, "Report file")->required();
  identify->add_option("--pattern", pattern, "Override the dataset pattern");
  identify->add_option("--tolerance", tolerance, "Pass threshold on the relative error");
  add_common(identify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (!seed) seed = seed_from_env();
  const bool needs_seed = !identify->parsed();
  if (needs_seed && !seed) {
    std::cerr << "sop: a seed is required (--seed or SOP_SEED)\n";
    return 1;
  }

  json cfg = {{"jobs", jobs}};
  if (seed) cfg["seed"] = *seed;
  if (classify->parsed()) {
    cfg["pattern"] = pattern;
    cfg["trials"] = trials > 0 ? trials : 100;
    if (!out.empty()) cfg["out"] = out;
    return run(sop_run_classify, cfg);
  }
  if (atlas->parsed()) {
    cfg["L"] = L;
    cfg["budget"] = budget >= 0 ? budget : L * L;
    cfg["trials"] = trials > 0 ? trials : 16;
    cfg["out"] = out;
    cfg["diagrams"] = diagrams;
    return run(sop_run_atlas, cfg);
  }
  if (simulate->parsed()) {
    cfg.update({{"mode", mode}, {"L", L}, {"M", M}, {"a", a}, {"realizations", realizations},
                {"factors", factors}, {"boxes", boxes}, {"unimodular", unimodular},
                {"with_truth", with_truth}, {"out", out}});
    if (!pattern.empty()) cfg["pattern"] = pattern;
    if (!window.empty()) cfg["window"] = window;
    return run(sop_run_simulate, cfg);
  }
  cfg.update({{"mode", mode}, {"path", path}, {"in", in}, {"out", out}});
  if (!pattern.empty()) cfg["pattern"] = pattern;
  if (tolerance) cfg["tolerance"] = *tolerance;
  return run(sop_run_identify, cfg);
}
