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

#pragma once

// Batch commands behind the command-line tool. Each returns an exit code
// and a JSON report; files are written as a side effect.

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace sop {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitDefective = 3;
inline constexpr int kExitTolerance = 4;

struct CommandResult {
  int exit_code = kExitOk;
  nlohmann::json report;
};

struct ClassifyConfig {
  std::filesystem::path pattern_file;
  int trials = 100;
  std::uint64_t seed = 0;
  std::filesystem::path out_file;  // optional
  int jobs = 1;
};

struct AtlasConfig {
  int L = 2;
  int cell_budget = 4;
  std::filesystem::path out_dir;
  int trials = 16;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool diagrams = false;
};

struct SimulateConfig {
  std::string mode = "tensor";  // tensor | general | wssus
  int L = 3;
  int M = 4;
  double a = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t realizations = 1;
  std::filesystem::path pattern_file;  // general: required; tensor: optional gamma via its diagonal
  std::filesystem::path window_file;   // optional
  bool unimodular = false;
  bool with_truth = false;
  int factors_per_clique = 2;
  std::vector<int> boxes;  // wssus support; empty = all boxes
  std::filesystem::path out_dir;
  int jobs = 1;
};

struct IdentifyConfig {
  std::string mode = "tensor";
  std::string path = "exact";  // exact | empirical
  std::filesystem::path in_dir;
  std::filesystem::path out_file;
  std::filesystem::path pattern_file;  // optional override
  std::optional<double> tolerance;
  int jobs = 1;
};

CommandResult cmd_classify(const ClassifyConfig& cfg);
CommandResult cmd_atlas(const AtlasConfig& cfg);
CommandResult cmd_simulate(const SimulateConfig& cfg);
CommandResult cmd_identify(const IdentifyConfig& cfg);

/// Counting note for the L^2-cell SPD patterns, included in atlas reports.
nlohmann::json count_reconciliation(int L);

}  // namespace sop
