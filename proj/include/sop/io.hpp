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

// File formats.
//
//   window      {"L": int, "entries": [[re, im], ...], "unimodular": bool}
//   pattern     {"L": int, "pairs": [[[k, n], [kp, np]], ...]}
//   mask        {"L", "M", "a", "extent_t", "extent_nu", "runs": [...]}
//               runs alternate false/true starting with false, or dense
//               binary: "SOPMASK1", uint16 L, M, extent_t, extent_nu (LE),
//               then one byte per cell
//   matrix      {"n": int, "entries": [[re, im], ...]} row-major, or CSV
//               with one quoted "re,im" cell per entry
//   field       "SOPFLD1\0", uint64 LE header length, JSON header, then
//               complex128 LE payload

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "sop/channel.hpp"
#include "sop/gabor.hpp"
#include "sop/patterns.hpp"
#include "sop/tensor_solver.hpp"

namespace sop::io {

using nlohmann::json;

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

json window_to_json(const Window& c);
Window window_from_json(const json& j);

json pattern_to_json(const Pattern& p);
Pattern pattern_from_json(const json& j);

json mask_to_json(const SupportMask& m);
SupportMask mask_from_json(const json& j);
void write_mask_binary(std::ostream& os, const SupportMask& m);
/// The binary header stores no spacing; `a` is supplied by the caller.
SupportMask read_mask_binary(std::istream& is, double a = 1.0);

json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j);
std::string matrix_to_csv(const CMatrix& m);
CMatrix matrix_from_csv(const std::string& text);

json classification_to_json(const Classification& c, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Binary fields

struct FieldHeader {
  std::string kind;  // spreading | scattering | autocorrelation | response | response_autocorrelation
  GridSpec grid;
  std::vector<std::int64_t> shape;
  std::uint64_t seed = 0;
  json extra = json::object();
};

void write_field(std::ostream& os, const FieldHeader& h, const cplx* data, std::size_t count);
/// Returns the header; `data` receives the payload.
FieldHeader read_field(std::istream& is, std::vector<cplx>& data);

void save_spreading(const std::filesystem::path& path, const SpreadingField& f, std::uint64_t seed,
                    const std::string& kind = "spreading");
SpreadingField load_spreading(const std::filesystem::path& path, std::uint64_t* seed = nullptr,
                              std::string* kind = nullptr);

void save_response(const std::filesystem::path& path, const ResponseRecord& r);
ResponseRecord load_response(const std::filesystem::path& path);

void save_autocorrelation(const std::filesystem::path& path, const AutocorrelationField& R, std::uint64_t seed);
AutocorrelationField load_autocorrelation(const std::filesystem::path& path, std::uint64_t* seed = nullptr);

void save_response_autocorrelation(const std::filesystem::path& path, const ResponseAutocorrelation& R,
                                   const DeltaTrain& train, std::uint64_t seed);
ResponseAutocorrelation load_response_autocorrelation(const std::filesystem::path& path, std::uint64_t* seed = nullptr);

}  // namespace sop::io
