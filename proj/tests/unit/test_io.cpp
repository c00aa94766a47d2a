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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <unistd.h>

#include "sop/io.hpp"
#include "sop/random.hpp"

namespace sop {
namespace {

namespace fs = std::filesystem;
using io::json;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sop_io_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

std::optional<ErrorCode> code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

TEST(IoJson, WindowRoundTrip) {
  const Window c = random_window(5, false, 3);
  const Window back = io::window_from_json(io::window_to_json(c));
  EXPECT_EQ(back.entries(), c.entries());
  const json u = io::window_to_json(random_window(3, true, 1));
  EXPECT_TRUE(u.at("unimodular").get<bool>());
  EXPECT_TRUE(io::window_from_json(u).unimodular());
  EXPECT_EQ(code_of([] { io::window_from_json(json::parse(R"({"L": 3, "entries": [[1, 0]]})")); }),
            ErrorCode::Parse);
  EXPECT_EQ(code_of([] { io::window_from_json(json::parse(R"({"entries": []})")); }), ErrorCode::Parse);
}

TEST(IoJson, PatternRoundTrip) {
  const Pattern p = tensor_pattern(3, {{0, 1}, {2, 2}});
  const json j = io::pattern_to_json(p);
  EXPECT_EQ(j.at("pairs").size(), 4u);
  EXPECT_EQ(j.at("pairs")[0], json::parse("[[0, 1], [0, 1]]"));
  EXPECT_EQ(io::pattern_from_json(j), p);
  EXPECT_EQ(code_of([] { io::pattern_from_json(json::parse(R"({"L": 2, "pairs": [[0, 1]]})")); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { io::pattern_from_json(json::parse(R"({"L": 2, "pairs": [[[0, 5], [0, 0]]]})")); }),
            ErrorCode::InvalidArgument);
}

TEST(IoJson, MaskRoundTrip) {
  SupportMask m(3, 2, 1.0);
  mark_box(m, 0, 1, 0, 1);
  m.set(1, 1, 1, 1);
  const json j = io::mask_to_json(m);
  const SupportMask back = io::mask_from_json(j);
  EXPECT_EQ(back.raw(), m.raw());
  json bad = j;
  bad["runs"].push_back(5);
  EXPECT_EQ(code_of([&] { io::mask_from_json(bad); }), ErrorCode::Parse);

  std::stringstream ss;
  io::write_mask_binary(ss, m);
  EXPECT_EQ(ss.str().size(), 16 + m.cell_count());
  EXPECT_EQ(ss.str().substr(0, 8), "SOPMASK1");
  const SupportMask bin = io::read_mask_binary(ss);
  EXPECT_EQ(bin.raw(), m.raw());
  EXPECT_EQ(rectify_support(bin), rectify_support(m));
  std::stringstream trunc(ss.str().substr(0, 20));
  EXPECT_EQ(code_of([&] { io::read_mask_binary(trunc); }), ErrorCode::Parse);
  std::stringstream wrong("NOTAMASKxxxxxxxx");
  EXPECT_EQ(code_of([&] { io::read_mask_binary(wrong); }), ErrorCode::Parse);
}

TEST(IoJson, MatrixJsonAndCsv) {
  Rng rng(4);
  const CMatrix A = random_complex_matrix(4, 4, rng);
  const json j = io::matrix_to_json(A);
  EXPECT_EQ(j.at("n").get<int>(), 4);
  EXPECT_EQ(j.at("entries").size(), 16u);
  EXPECT_EQ(io::matrix_from_json(j), A);
  const std::string csv = io::matrix_to_csv(A);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_LT((io::matrix_from_csv(csv) - A).norm(), 1e-15);
  EXPECT_EQ(code_of([] { io::matrix_from_csv("\"1,0\",\"2,0\"\n\"3,0\"\n"); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { io::matrix_from_json(json::parse(R"({"n": 2, "entries": [[1, 0]]})")); }), ErrorCode::Parse);
}

TEST(IoJson, ClassificationReport) {
  const auto c = classify_pattern(diagonal_pattern(2), 4, 9);
  const json j = io::classification_to_json(c, 9);
  EXPECT_EQ(j.at("verdict"), "permissible");
  EXPECT_TRUE(j.at("certificate").is_null());
  EXPECT_EQ(j.at("trials"), 4);
  EXPECT_EQ(j.at("seed"), 9);
  EXPECT_TRUE(j.contains("rank_histogram"));

  std::vector<Cell> all;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) all.push_back({i, k});
  const json d = io::classification_to_json(classify_pattern(Pattern(2, all), 2, 1), 1);
  EXPECT_EQ(d.at("verdict"), "defective-proved");
  EXPECT_TRUE(d.at("certificate").contains("counting"));
}

TEST_F(TempDir, SpreadingFieldRoundTrip) {
  const GridSpec g = GridSpec::with_a(3, 2.0, 4);
  Rng rng(5);
  SpreadingField f(g);
  for (auto& v : f.values()) v = complex_normal(rng);
  io::save_spreading(dir_ / "eta.sopfld", f, 77);
  std::uint64_t seed = 0;
  std::string kind;
  const SpreadingField back = io::load_spreading(dir_ / "eta.sopfld", &seed, &kind);
  EXPECT_EQ(back.values(), f.values());
  EXPECT_EQ(back.grid(), g);
  EXPECT_EQ(seed, 77u);
  EXPECT_EQ(kind, "spreading");

  // header layout: magic, length, JSON, then complex128 little endian
  const std::string raw = io::read_text(dir_ / "eta.sopfld");
  ASSERT_GT(raw.size(), 16u);
  EXPECT_EQ(raw.substr(0, 7), "SOPFLD1");
  std::uint64_t len = 0;
  for (int i = 7; i >= 0; --i) len = (len << 8) | static_cast<unsigned char>(raw[8 + i]);
  const json header = json::parse(raw.substr(16, len));
  EXPECT_EQ(header.at("L"), 3);
  EXPECT_EQ(header.at("M"), 4);
  EXPECT_EQ(header.at("dim"), 4);
  EXPECT_EQ(header.at("shape"), json::parse("[3, 3, 4, 4]"));
  EXPECT_EQ(raw.size(), 16 + len + 16 * static_cast<std::size_t>(g.node_count()));
}

TEST_F(TempDir, ResponseRoundTrip) {
  const GridSpec g = GridSpec::with_a(3, 1.0, 2);
  const Window c = random_window(3, false, 6);
  Rng rng(6);
  SpreadingField eta(g);
  for (auto& v : eta.values()) v = complex_normal(rng);
  const ResponseRecord r = apply_channel(eta, DeltaTrain::standard(c, g), {}, 41);
  io::save_response(dir_ / "rec.sopfld", r);
  const ResponseRecord back = io::load_response(dir_ / "rec.sopfld");
  EXPECT_EQ(back.samples, r.samples);
  EXPECT_EQ(back.window, r.window);
  EXPECT_EQ(back.seed, 41u);
  EXPECT_EQ(back.train.k_begin, r.train.k_begin);
  EXPECT_EQ(back.train.k_end, r.train.k_end);
  EXPECT_EQ(back.train.window.entries(), c.entries());
  EXPECT_EQ(code_of([&] { io::load_spreading(dir_ / "rec.sopfld"); }), ErrorCode::MetadataMismatch);
}

TEST_F(TempDir, AutocorrelationRoundTrips) {
  const GridSpec g = GridSpec::with_a(2, 1.0, 2);
  Rng rng(7);
  const CMatrix A = random_complex_matrix(g.node_count(), g.node_count(), rng);
  io::save_autocorrelation(dir_ / "R.sopfld", {g, A}, 3);
  EXPECT_EQ(io::load_autocorrelation(dir_ / "R.sopfld").values, A);

  const Window c = random_window(2, false, 1);
  const auto m = random_clique_model(g, diagonal_pattern(2), 1, 1);
  const auto Rf = simulate_ensemble(m, DeltaTrain::standard(c, g), 20, 2);
  io::save_response_autocorrelation(dir_ / "Rf.sopfld", Rf, DeltaTrain::standard(c, g), 2);
  std::uint64_t seed = 0;
  const auto back = io::load_response_autocorrelation(dir_ / "Rf.sopfld", &seed);
  EXPECT_EQ(back.values, Rf.values);
  EXPECT_EQ(back.realizations, 20u);
  EXPECT_EQ(back.window, Rf.window);
  EXPECT_EQ(seed, 2u);
}

TEST_F(TempDir, MalformedFields) {
  io::write_text(dir_ / "junk.sopfld", "hello world, this is not a field");
  EXPECT_EQ(code_of([&] { io::load_spreading(dir_ / "junk.sopfld"); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([&] { io::load_spreading(dir_ / "missing.sopfld"); }), ErrorCode::Io);

  const GridSpec g = GridSpec::with_a(2, 1.0, 1);
  io::save_spreading(dir_ / "f.sopfld", SpreadingField(g), 1);
  std::string raw = io::read_text(dir_ / "f.sopfld");
  io::write_text(dir_ / "short.sopfld", raw.substr(0, raw.size() - 5));
  EXPECT_EQ(code_of([&] { io::load_spreading(dir_ / "short.sopfld"); }), ErrorCode::Parse);

  std::stringstream ss;
  io::FieldHeader h{"spreading", g, {2, 2, 1, 2}, 0, json::object()};
  std::vector<cplx> data(8);
  io::write_field(ss, h, data.data(), data.size());
  io::write_text(dir_ / "shape.sopfld", ss.str());
  EXPECT_EQ(code_of([&] { io::load_spreading(dir_ / "shape.sopfld"); }), ErrorCode::MetadataMismatch);
  EXPECT_EQ(code_of([&] { io::write_field(ss, h, data.data(), 3); }), ErrorCode::InvalidArgument);
  io::write_text(dir_ / "bad.json", "{ not json");
  EXPECT_EQ(code_of([&] { io::read_json(dir_ / "bad.json"); }), ErrorCode::Parse);
}

}  // namespace
}  // namespace sop
