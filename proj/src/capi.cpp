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

#include "sop/sop.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "sop/io.hpp"
#include "sop/workflow.hpp"

struct sop_window {
  sop::Window w;
};
struct sop_pattern {
  sop::Pattern p;
};

namespace {

thread_local std::string g_last_error;

sop_status to_status(sop::ErrorCode c) {
  using sop::ErrorCode;
  switch (c) {
    case ErrorCode::InvalidArgument: return SOP_ERR_INVALID_ARGUMENT;
    case ErrorCode::Parse: return SOP_ERR_PARSE;
    case ErrorCode::Io: return SOP_ERR_IO;
    case ErrorCode::BudgetExceeded: return SOP_ERR_BUDGET_EXCEEDED;
    case ErrorCode::NotLeftInvertible: return SOP_ERR_NOT_LEFT_INVERTIBLE;
    case ErrorCode::ResidualTooLarge: return SOP_ERR_RESIDUAL_TOO_LARGE;
    case ErrorCode::SingularSubframe: return SOP_ERR_SINGULAR_SUBFRAME;
    case ErrorCode::SupportViolation: return SOP_ERR_SUPPORT_VIOLATION;
    case ErrorCode::CollisionModL: return SOP_ERR_COLLISION_MOD_L;
    case ErrorCode::AsymmetricMask: return SOP_ERR_ASYMMETRIC_MASK;
    case ErrorCode::TrainTooShort: return SOP_ERR_TRAIN_TOO_SHORT;
    case ErrorCode::InsufficientExtent: return SOP_ERR_INSUFFICIENT_EXTENT;
    case ErrorCode::MetadataMismatch: return SOP_ERR_METADATA_MISMATCH;
  }
  return SOP_ERR_INTERNAL;
}

sop_status fail(sop_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
sop_status guard(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const sop::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(SOP_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SOP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SOP_ERR_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define SOP_REQUIRE(cond, msg) \
  if (!(cond)) return fail(SOP_ERR_INVALID_ARGUMENT, msg)

using nlohmann::json;

std::uint64_t required_seed(const json& j) {
  if (!j.contains("seed")) throw sop::Error(sop::ErrorCode::InvalidArgument, "a seed is required for this command");
  return j.at("seed").get<std::uint64_t>();
}

sop_status finish(const sop::CommandResult& r, int* exit_code, char** report) {
  *exit_code = r.exit_code;
  *report = dup_string(r.report.dump(2));
  if (r.report.contains("error")) {
    const std::string name = r.report.at("error").get<std::string>();
    const std::string msg = r.report.value("message", name);
    for (int c = 0; c <= static_cast<int>(sop::ErrorCode::MetadataMismatch); ++c) {
      const auto code = static_cast<sop::ErrorCode>(c);
      if (name == sop::error_code_name(code)) return fail(to_status(code), msg);
    }
    return fail(name == "Parse" ? SOP_ERR_PARSE : SOP_ERR_INTERNAL, msg);
  }
  return SOP_OK;
}

}  // namespace

extern "C" {

const char* sop_version(void) { return "1.0.0"; }

const char* sop_status_name(sop_status s) {
  switch (s) {
    case SOP_OK: return "OK";
    case SOP_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case SOP_ERR_PARSE: return "Parse";
    case SOP_ERR_IO: return "Io";
    case SOP_ERR_BUDGET_EXCEEDED: return "BudgetExceeded";
    case SOP_ERR_NOT_LEFT_INVERTIBLE: return "NotLeftInvertible";
    case SOP_ERR_RESIDUAL_TOO_LARGE: return "ResidualTooLarge";
    case SOP_ERR_SINGULAR_SUBFRAME: return "SingularSubframe";
    case SOP_ERR_SUPPORT_VIOLATION: return "SupportViolation";
    case SOP_ERR_COLLISION_MOD_L: return "CollisionModL";
    case SOP_ERR_ASYMMETRIC_MASK: return "AsymmetricMask";
    case SOP_ERR_TRAIN_TOO_SHORT: return "TrainTooShort";
    case SOP_ERR_INSUFFICIENT_EXTENT: return "InsufficientExtent";
    case SOP_ERR_METADATA_MISMATCH: return "MetadataMismatch";
    case SOP_ERR_INTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* sop_last_error(void) { return g_last_error.c_str(); }

void sop_string_free(char* s) { std::free(s); }

sop_status sop_window_create(const double* re_im, int L, int unimodular, sop_window** out) {
  SOP_REQUIRE(re_im && out, "null argument");
  return guard([&] {
    sop::CVector v(L < 0 ? 0 : L);
    for (int p = 0; p < L; ++p) v[p] = {re_im[2 * p], re_im[2 * p + 1]};
    *out = new sop_window{sop::Window(std::move(v), unimodular != 0)};
    return SOP_OK;
  });
}

sop_status sop_window_random(int L, int unimodular, uint64_t seed, sop_window** out) {
  SOP_REQUIRE(out, "null argument");
  return guard([&] {
    *out = new sop_window{sop::random_window(L, unimodular != 0, seed)};
    return SOP_OK;
  });
}

sop_status sop_window_from_json(const char* text, sop_window** out) {
  SOP_REQUIRE(text && out, "null argument");
  return guard([&] {
    *out = new sop_window{sop::io::window_from_json(json::parse(text))};
    return SOP_OK;
  });
}

sop_status sop_window_to_json(const sop_window* w, char** text) {
  SOP_REQUIRE(w && text, "null argument");
  return guard([&] {
    *text = dup_string(sop::io::window_to_json(w->w).dump());
    return SOP_OK;
  });
}

int sop_window_length(const sop_window* w) { return w ? w->w.length() : 0; }
void sop_window_destroy(sop_window* w) { delete w; }

sop_status sop_pattern_create(int L, const int* cells, size_t count, sop_pattern** out) {
  SOP_REQUIRE(out && (cells || count == 0), "null argument");
  return guard([&] {
    std::vector<sop::Cell> v;
    for (size_t i = 0; i < count; ++i) v.push_back({cells[2 * i], cells[2 * i + 1]});
    *out = new sop_pattern{sop::Pattern(L, std::move(v))};
    return SOP_OK;
  });
}

sop_status sop_pattern_from_json(const char* text, sop_pattern** out) {
  SOP_REQUIRE(text && out, "null argument");
  return guard([&] {
    *out = new sop_pattern{sop::io::pattern_from_json(json::parse(text))};
    return SOP_OK;
  });
}

sop_status sop_pattern_to_json(const sop_pattern* p, char** text) {
  SOP_REQUIRE(p && text, "null argument");
  return guard([&] {
    *text = dup_string(sop::io::pattern_to_json(p->p).dump());
    return SOP_OK;
  });
}

int sop_pattern_L(const sop_pattern* p) { return p ? p->p.L() : 0; }
size_t sop_pattern_size(const sop_pattern* p) { return p ? p->p.size() : 0; }
int sop_pattern_is_spd(const sop_pattern* p) { return p && sop::validate_spd(p->p) ? 1 : 0; }
void sop_pattern_destroy(sop_pattern* p) { delete p; }

sop_status sop_tensor_rank(const sop_window* w, const sop_pattern* p, int* rank) {
  SOP_REQUIRE(w && p && rank, "null argument");
  return guard([&] {
    const sop::RestrictedTensorFrame r(sop::GaborFrame(w->w), p->p);
    *rank = sop::rank_and_left_inverse(r, false).rank;
    return SOP_OK;
  });
}

sop_status sop_classify(const sop_pattern* p, int trials, uint64_t seed, int jobs, char** report) {
  SOP_REQUIRE(p && report, "null argument");
  return guard([&] {
    const auto c = sop::classify_pattern(p->p, trials, seed, {.jobs = jobs});
    *report = dup_string(sop::io::classification_to_json(c, seed).dump(2));
    return SOP_OK;
  });
}

sop_status sop_count_spd_patterns(int L, int cells, double* count) {
  SOP_REQUIRE(count, "null argument");
  return guard([&] {
    *count = sop::count_spd_patterns(L, cells);
    return SOP_OK;
  });
}

sop_status sop_run_classify(const char* config, int* exit_code, char** report) {
  SOP_REQUIRE(config && exit_code && report, "null argument");
  *exit_code = sop::kExitError;
  *report = nullptr;
  return guard([&] {
    const json j = json::parse(config);
    sop::ClassifyConfig c;
    c.pattern_file = j.at("pattern").get<std::string>();
    c.trials = j.value("trials", c.trials);
    c.seed = required_seed(j);
    c.out_file = j.value("out", std::string());
    c.jobs = j.value("jobs", 1);
    return finish(sop::cmd_classify(c), exit_code, report);
  });
}

sop_status sop_run_atlas(const char* config, int* exit_code, char** report) {
  SOP_REQUIRE(config && exit_code && report, "null argument");
  *exit_code = sop::kExitError;
  *report = nullptr;
  return guard([&] {
    const json j = json::parse(config);
    sop::AtlasConfig c;
    c.L = j.at("L").get<int>();
    c.cell_budget = j.value("budget", c.L * c.L);
    c.out_dir = j.at("out").get<std::string>();
    c.trials = j.value("trials", c.trials);
    c.seed = required_seed(j);
    c.jobs = j.value("jobs", 1);
    c.diagrams = j.value("diagrams", false);
    return finish(sop::cmd_atlas(c), exit_code, report);
  });
}

sop_status sop_run_simulate(const char* config, int* exit_code, char** report) {
  SOP_REQUIRE(config && exit_code && report, "null argument");
  *exit_code = sop::kExitError;
  *report = nullptr;
  return guard([&] {
    const json j = json::parse(config);
    sop::SimulateConfig c;
    c.mode = j.value("mode", c.mode);
    c.L = j.value("L", c.L);
    c.M = j.value("M", c.M);
    c.a = j.value("a", c.a);
    c.seed = required_seed(j);
    c.realizations = j.value("realizations", c.realizations);
    c.pattern_file = j.value("pattern", std::string());
    c.window_file = j.value("window", std::string());
    c.unimodular = j.value("unimodular", false);
    c.with_truth = j.value("with_truth", false);
    c.factors_per_clique = j.value("factors", c.factors_per_clique);
    c.boxes = j.value("boxes", std::vector<int>());
    c.out_dir = j.at("out").get<std::string>();
    c.jobs = j.value("jobs", 1);
    return finish(sop::cmd_simulate(c), exit_code, report);
  });
}

sop_status sop_run_identify(const char* config, int* exit_code, char** report) {
  SOP_REQUIRE(config && exit_code && report, "null argument");
  *exit_code = sop::kExitError;
  *report = nullptr;
  return guard([&] {
    const json j = json::parse(config);
    sop::IdentifyConfig c;
    c.mode = j.value("mode", c.mode);
    c.path = j.value("path", c.path);
    c.in_dir = j.at("in").get<std::string>();
    c.out_file = j.at("out").get<std::string>();
    c.pattern_file = j.value("pattern", std::string());
    if (j.contains("tolerance") && !j.at("tolerance").is_null()) c.tolerance = j.at("tolerance").get<double>();
    c.jobs = j.value("jobs", 1);
    return finish(sop::cmd_identify(c), exit_code, report);
  });
}

}  // extern "C"
