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

#include "sop/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace sop::io {

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::Parse, what); }

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    parse_fail(std::string(what) + ": " + e.what());
  }
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    parse_fail("complex entries must be [re, im] number pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

template <class T>
void put_le(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) parse_fail("truncated binary header");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return static_cast<T>(v);
}

void put_double(std::ostream& os, double d) { put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(d)); }
double get_double(std::istream& is) { return std::bit_cast<double>(get_le<std::uint64_t>(is)); }

constexpr char kMaskMagic[8] = {'S', 'O', 'P', 'M', 'A', 'S', 'K', '1'};
constexpr char kFieldMagic[8] = {'S', 'O', 'P', 'F', 'L', 'D', '1', '\0'};

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

json read_json(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    parse_fail(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------

json window_to_json(const Window& c) {
  json e = json::array();
  for (int p = 0; p < c.length(); ++p) e.push_back(complex_json(c[p]));
  return {{"L", c.length()}, {"entries", e}, {"unimodular", c.unimodular()}};
}

Window window_from_json(const json& j) {
  return guarded("window", [&] {
    const int L = j.at("L").get<int>();
    const json& e = j.at("entries");
    if (!e.is_array() || static_cast<int>(e.size()) != L) parse_fail("window: entries must have L elements");
    CVector v(L);
    for (int p = 0; p < L; ++p) v[p] = complex_from(e[p]);
    return Window(std::move(v), j.value("unimodular", false));
  });
}

json pattern_to_json(const Pattern& p) {
  json pairs = json::array();
  for (const Cell& c : p.cells()) {
    const TorusIndex a = torus_index(c.row, p.L()), b = torus_index(c.col, p.L());
    pairs.push_back(json::array({json::array({a.k, a.n}), json::array({b.k, b.n})}));
  }
  return {{"L", p.L()}, {"pairs", pairs}};
}

Pattern pattern_from_json(const json& j) {
  return guarded("pattern", [&] {
    const int L = j.at("L").get<int>();
    const json& pj = j.at("pairs");
    if (!pj.is_array()) parse_fail("pattern: pairs must be an array");
    std::vector<std::pair<TorusIndex, TorusIndex>> pairs;
    for (const json& q : pj) {
      if (!q.is_array() || q.size() != 2 || q[0].size() != 2 || q[1].size() != 2)
        parse_fail("pattern: each pair must be [[k, n], [kp, np]]");
      pairs.push_back({{q[0][0].get<int>(), q[0][1].get<int>()}, {q[1][0].get<int>(), q[1][1].get<int>()}});
    }
    return Pattern::from_pairs(L, pairs);
  });
}

json mask_to_json(const SupportMask& m) {
  json runs = json::array();
  std::uint8_t cur = 0;
  std::uint64_t count = 0;
  for (std::uint8_t v : m.raw()) {
    if (v != cur) {
      runs.push_back(count);
      cur = v;
      count = 0;
    }
    ++count;
  }
  runs.push_back(count);
  return {{"L", m.L()}, {"M", m.M()}, {"a", m.a()}, {"extent_t", m.extent_t()}, {"extent_nu", m.extent_nu()},
          {"runs", runs}};
}

SupportMask mask_from_json(const json& j) {
  return guarded("mask", [&] {
    SupportMask m(j.at("L").get<int>(), j.at("M").get<int>(), j.at("a").get<double>(), j.value("extent_t", 0),
                  j.value("extent_nu", 0));
    std::size_t pos = 0;
    std::uint8_t cur = 0;
    for (const json& r : j.at("runs")) {
      const auto n = r.get<std::uint64_t>();
      if (pos + n > m.cell_count()) parse_fail("mask: runs exceed the cell count");
      std::fill_n(m.raw().begin() + static_cast<std::ptrdiff_t>(pos), n, cur);
      pos += n;
      cur ^= 1;
    }
    if (pos != m.cell_count()) parse_fail("mask: runs do not cover every cell");
    return m;
  });
}

void write_mask_binary(std::ostream& os, const SupportMask& m) {
  os.write(kMaskMagic, 8);
  put_le<std::uint16_t>(os, static_cast<std::uint16_t>(m.L()));
  put_le<std::uint16_t>(os, static_cast<std::uint16_t>(m.M()));
  put_le<std::uint16_t>(os, static_cast<std::uint16_t>(m.extent_t()));
  put_le<std::uint16_t>(os, static_cast<std::uint16_t>(m.extent_nu()));
  os.write(reinterpret_cast<const char*>(m.raw().data()), static_cast<std::streamsize>(m.raw().size()));
  if (!os) throw Error(ErrorCode::Io, "mask write failed");
}

SupportMask read_mask_binary(std::istream& is, double a) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMaskMagic, 8) != 0) parse_fail("mask: bad magic");
  const int L = get_le<std::uint16_t>(is), M = get_le<std::uint16_t>(is);
  const int et = get_le<std::uint16_t>(is), en = get_le<std::uint16_t>(is);
  SupportMask m(L, M, a, et, en);
  if (!is.read(reinterpret_cast<char*>(m.raw().data()), static_cast<std::streamsize>(m.raw().size())))
    parse_fail("mask: truncated payload");
  for (auto& v : m.raw())
    if (v > 1) parse_fail("mask: cells must be 0 or 1");
  return m;
}

// ---------------------------------------------------------------------------

json matrix_to_json(const CMatrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::InvalidArgument, "matrix serialization expects a square matrix");
  json e = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) e.push_back(complex_json(m(i, k)));
  return {{"n", m.rows()}, {"entries", e}};
}

CMatrix matrix_from_json(const json& j) {
  return guarded("matrix", [&] {
    const int n = j.at("n").get<int>();
    const json& e = j.at("entries");
    if (n < 0 || !e.is_array() || e.size() != static_cast<std::size_t>(n) * n)
      parse_fail("matrix: entries must hold n * n values");
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) m(i, k) = complex_from(e[static_cast<std::size_t>(i) * n + k]);
    return m;
  });
}

std::string matrix_to_csv(const CMatrix& m) {
  std::ostringstream os;
  os.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      if (k) os << ',';
      os << '"' << m(i, k).real() << ',' << m(i, k).imag() << '"';
    }
    os << '\n';
  }
  return os.str();
}

CMatrix matrix_from_csv(const std::string& text) {
  std::vector<std::vector<cplx>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<cplx> row;
    std::size_t pos = 0;
    while (pos < line.size()) {
      if (line[pos] != '"') parse_fail("csv: cells must be quoted \"re,im\"");
      const std::size_t close = line.find('"', pos + 1);
      if (close == std::string::npos) parse_fail("csv: unterminated cell");
      const std::string cell = line.substr(pos + 1, close - pos - 1);
      const std::size_t comma = cell.find(',');
      if (comma == std::string::npos) parse_fail("csv: cell lacks a comma");
      try {
        std::size_t used_re = 0, used_im = 0;
        const std::string re_s = cell.substr(0, comma), im_s = cell.substr(comma + 1);
        const double re = std::stod(re_s, &used_re), im = std::stod(im_s, &used_im);
        if (used_re != re_s.size() || used_im != im_s.size()) parse_fail("csv: trailing characters in a cell");
        row.emplace_back(re, im);
      } catch (const std::logic_error&) {
        parse_fail("csv: non-numeric cell '" + cell + "'");
      }
      pos = close + 1;
      if (pos < line.size()) {
        if (line[pos] != ',') parse_fail("csv: expected ',' between cells");
        ++pos;
      }
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n) parse_fail("csv: matrix must be square");
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = rows[i][k];
  }
  return m;
}

json classification_to_json(const Classification& c, std::uint64_t seed) {
  json hist = json::object();
  for (auto [rank, count] : c.rank_histogram) hist[std::to_string(rank)] = count;
  json cert = nullptr;
  if (c.proved()) {
    cert = json::object();
    if (c.counting_certificate) cert["counting"] = {{"cells", c.columns}, {"rows", c.full_rank}};
    if (c.tall) cert["tall"] = {{"lambda0", {c.tall->lambda0.k, c.tall->lambda0.n}}, {"height", c.tall->height}};
    if (c.two_squares) {
      auto pts = [](const std::vector<TorusIndex>& v) {
        json a = json::array();
        for (auto t : v) a.push_back({t.k, t.n});
        return a;
      };
      cert["two_squares"] = {{"gamma1", pts(c.two_squares->gamma1)}, {"gamma2", pts(c.two_squares->gamma2)}};
    }
  }
  return {{"verdict", verdict_name(c.verdict)},
          {"certificate", cert},
          {"rank_histogram", hist},
          {"max_rank", c.max_rank},
          {"columns", c.columns},
          {"spd", c.spd},
          {"best_inverse_condition", c.best_inverse_condition},
          {"trials", c.trials},
          {"seed", seed}};
}

// ---------------------------------------------------------------------------

void write_field(std::ostream& os, const FieldHeader& h, const cplx* data, std::size_t count) {
  std::size_t expect = 1;
  for (auto d : h.shape) expect *= static_cast<std::size_t>(d);
  if (expect != count) throw Error(ErrorCode::InvalidArgument, "field payload does not match its shape");
  json hj = {{"magic", "SOPFLD1"}, {"kind", h.kind}, {"L", h.grid.L},       {"M", h.grid.M},
             {"a", h.grid.a},      {"b", h.grid.b},  {"dim", h.shape.size()}, {"shape", h.shape},
             {"seed", h.seed}};
  for (auto it = h.extra.begin(); it != h.extra.end(); ++it) hj[it.key()] = it.value();
  const std::string text = hj.dump();
  os.write(kFieldMagic, 8);
  put_le<std::uint64_t>(os, text.size());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (std::size_t i = 0; i < count; ++i) {
    put_double(os, data[i].real());
    put_double(os, data[i].imag());
  }
  if (!os) throw Error(ErrorCode::Io, "field write failed");
}

FieldHeader read_field(std::istream& is, std::vector<cplx>& data) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kFieldMagic, 8) != 0) parse_fail("field: bad magic");
  const auto len = get_le<std::uint64_t>(is);
  if (len > (1ull << 26)) parse_fail("field: header too long");
  std::string text(len, '\0');
  if (!is.read(text.data(), static_cast<std::streamsize>(len))) parse_fail("field: truncated header");
  return guarded("field header", [&] {
    json hj = json::parse(text);
    if (hj.at("magic").get<std::string>() != "SOPFLD1") parse_fail("field: header magic mismatch");
    FieldHeader h;
    h.kind = hj.at("kind").get<std::string>();
    h.grid = GridSpec(hj.at("L").get<int>(), hj.at("a").get<double>(), hj.at("b").get<double>(), hj.at("M").get<int>());
    h.shape = hj.at("shape").get<std::vector<std::int64_t>>();
    if (hj.at("dim").get<std::size_t>() != h.shape.size()) parse_fail("field: dim does not match shape");
    h.seed = hj.at("seed").get<std::uint64_t>();
    for (const char* k : {"magic", "kind", "L", "M", "a", "b", "dim", "shape", "seed"}) hj.erase(k);
    h.extra = std::move(hj);
    std::size_t count = 1;
    for (auto d : h.shape) {
      if (d < 0) parse_fail("field: negative extent");
      count *= static_cast<std::size_t>(d);
    }
    data.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double re = get_double(is);
      const double im = get_double(is);
      data[i] = {re, im};
    }
    return h;
  });
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + p.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + p.string());
  return in;
}

json train_json(const DeltaTrain& t) {
  return {{"window", window_to_json(t.window)}, {"spacing", t.a}, {"k_begin", t.k_begin}, {"k_end", t.k_end}};
}

DeltaTrain train_from(const json& j) {
  return DeltaTrain{window_from_json(j.at("window")), j.at("spacing").get<double>(), j.at("k_begin").get<long long>(),
                    j.at("k_end").get<long long>()};
}

void expect_kind(const FieldHeader& h, std::initializer_list<const char*> kinds) {
  for (const char* k : kinds)
    if (h.kind == k) return;
  throw Error(ErrorCode::MetadataMismatch, "field: unexpected kind '" + h.kind + "'");
}

}  // namespace

void save_spreading(const std::filesystem::path& path, const SpreadingField& f, std::uint64_t seed,
                    const std::string& kind) {
  const GridSpec& g = f.grid();
  FieldHeader h{kind, g, {g.L, g.L, g.M, g.M}, seed, json::object()};
  auto out = open_out(path);
  write_field(out, h, f.values().data(), static_cast<std::size_t>(f.values().size()));
}

SpreadingField load_spreading(const std::filesystem::path& path, std::uint64_t* seed, std::string* kind) {
  auto in = open_in(path);
  std::vector<cplx> data;
  const FieldHeader h = read_field(in, data);
  expect_kind(h, {"spreading", "scattering"});
  const GridSpec& g = h.grid;
  if (h.shape != std::vector<std::int64_t>{g.L, g.L, g.M, g.M})
    throw Error(ErrorCode::MetadataMismatch, "field: shape does not match the grid");
  if (seed) *seed = h.seed;
  if (kind) *kind = h.kind;
  return SpreadingField(g, Eigen::Map<const CVector>(data.data(), static_cast<Eigen::Index>(data.size())));
}

void save_response(const std::filesystem::path& path, const ResponseRecord& r) {
  FieldHeader h{"response", r.grid, {static_cast<std::int64_t>(r.samples.size())}, r.seed,
                {{"train", train_json(r.train)},
                 {"first_translate", r.window.first_translate},
                 {"translates", r.window.translates}}};
  auto out = open_out(path);
  write_field(out, h, r.samples.data(), static_cast<std::size_t>(r.samples.size()));
}

ResponseRecord load_response(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<cplx> data;
  const FieldHeader h = read_field(in, data);
  expect_kind(h, {"response"});
  return guarded("response", [&] {
    ResponseWindow w{h.extra.at("first_translate").get<int>(), h.extra.at("translates").get<int>()};
    if (w.sample_count(h.grid) != static_cast<int>(data.size()))
      throw Error(ErrorCode::MetadataMismatch, "response: sample count does not match the window");
    return ResponseRecord{h.grid, w, train_from(h.extra.at("train")), h.seed,
                          Eigen::Map<const CVector>(data.data(), static_cast<Eigen::Index>(data.size()))};
  });
}

void save_autocorrelation(const std::filesystem::path& path, const AutocorrelationField& R, std::uint64_t seed) {
  FieldHeader h{"autocorrelation", R.grid, {R.values.rows(), R.values.cols()}, seed, json::object()};
  // row-major payload
  const CMatrix rm = R.values.transpose();
  auto out = open_out(path);
  write_field(out, h, rm.data(), static_cast<std::size_t>(rm.size()));
}

AutocorrelationField load_autocorrelation(const std::filesystem::path& path, std::uint64_t* seed) {
  auto in = open_in(path);
  std::vector<cplx> data;
  const FieldHeader h = read_field(in, data);
  expect_kind(h, {"autocorrelation"});
  const auto n = h.grid.node_count();
  if (h.shape != std::vector<std::int64_t>{n, n})
    throw Error(ErrorCode::MetadataMismatch, "autocorrelation: shape does not match the grid");
  if (seed) *seed = h.seed;
  return {h.grid, Eigen::Map<const CMatrix>(data.data(), n, n).transpose()};
}

void save_response_autocorrelation(const std::filesystem::path& path, const ResponseAutocorrelation& R,
                                   const DeltaTrain& train, std::uint64_t seed) {
  FieldHeader h{"response_autocorrelation", R.grid, {R.values.rows(), R.values.cols()}, seed,
                {{"train", train_json(train)},
                 {"first_translate", R.window.first_translate},
                 {"translates", R.window.translates},
                 {"realizations", R.realizations}}};
  const CMatrix rm = R.values.transpose();
  auto out = open_out(path);
  write_field(out, h, rm.data(), static_cast<std::size_t>(rm.size()));
}

ResponseAutocorrelation load_response_autocorrelation(const std::filesystem::path& path, std::uint64_t* seed) {
  auto in = open_in(path);
  std::vector<cplx> data;
  const FieldHeader h = read_field(in, data);
  expect_kind(h, {"response_autocorrelation"});
  return guarded("response autocorrelation", [&] {
    ResponseWindow w{h.extra.at("first_translate").get<int>(), h.extra.at("translates").get<int>()};
    const auto S = w.sample_count(h.grid);
    if (h.shape != std::vector<std::int64_t>{S, S})
      throw Error(ErrorCode::MetadataMismatch, "response autocorrelation: shape does not match the window");
    if (seed) *seed = h.seed;
    return ResponseAutocorrelation{h.grid, w, Eigen::Map<const CMatrix>(data.data(), S, S).transpose(),
                                   h.extra.at("realizations").get<std::uint64_t>()};
  });
}

}  // namespace sop::io
