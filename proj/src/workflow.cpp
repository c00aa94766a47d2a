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

#include "sop/workflow.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include "sop/channel.hpp"
#include "sop/io.hpp"
#include "sop/parallel.hpp"
#include "sop/random.hpp"

namespace sop {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json error_report(const Error& e) { return {{"error", error_code_name(e.code())}, {"message", e.what()}}; }

json foreign_error_report(const std::exception& e) {
  const bool parse = dynamic_cast<const nlohmann::json::exception*>(&e) != nullptr;
  return {{"error", parse ? "Parse" : "Internal"}, {"message", e.what()}};
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create directory " + p.string() + ": " + ec.message());
}

// Timestamps stay out of reports so reruns are byte-identical.
void sidecar_log(const fs::path& dir, const std::string& command) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  std::ofstream log(dir / "run.log", std::ios::app);
  if (log) log << buf << ' ' << command << '\n';
}

std::string pattern_id(int L, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "L%d-%06zu", L, index);
  return buf;
}

std::string text_diagram(const Pattern& p) {
  const int N = p.L() * p.L();
  std::string out;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) out += p.contains({i, j}) ? '#' : '.';
    out += '\n';
  }
  return out;
}

std::string pgm_diagram(const Pattern& p, int scale = 8) {
  const int N = p.L() * p.L();
  std::ostringstream os;
  os << "P2\n" << N * scale << ' ' << N * scale << "\n255\n";
  for (int y = 0; y < N * scale; ++y) {
    for (int x = 0; x < N * scale; ++x) os << (x ? " " : "") << (p.contains({y / scale, x / scale}) ? 0 : 255);
    os << '\n';
  }
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------

CommandResult cmd_classify(const ClassifyConfig& cfg) {
  try {
    const Pattern p = io::pattern_from_json(io::read_json(cfg.pattern_file));
    if (p.empty()) throw Error(ErrorCode::InvalidArgument, "pattern has no pairs");
    if (!validate_spd(p)) throw Error(ErrorCode::InvalidArgument, "pattern is not SPD");
    const Classification c = classify_pattern(p, cfg.trials, cfg.seed, {.jobs = cfg.jobs});
    CommandResult r;
    r.report = io::classification_to_json(c, cfg.seed);
    r.report["L"] = p.L();
    r.exit_code = c.verdict == Verdict::Permissible ? kExitOk
                  : c.verdict == Verdict::Inconclusive ? kExitTolerance
                                                       : kExitDefective;
    if (!cfg.out_file.empty()) io::write_json(cfg.out_file, r.report);
    return r;
  } catch (const Error& e) {
    return {kExitError, error_report(e)};
  } catch (const std::exception& e) {
    return {kExitError, foreign_error_report(e)};
  }
}

json count_reconciliation(int L) {
  const int cells = L * L;
  json terms = json::array();
  const int N = L * L;
  for (int d = cells; d >= 0; --d) {
    if ((cells - d) % 2) continue;
    const int e = (cells - d) / 2;
    if (e > d * (d - 1) / 2) continue;
    terms.push_back({{"diagonal", d}, {"off_diagonal_pairs", e},
                     {"count", binomial(N, d) * binomial(d * (d - 1) / 2, e)}});
  }
  json j = {{"L", L}, {"cells", cells}, {"closed_form_count", count_spd_patterns(L, cells)},
            {"convention", "all SPD patterns with exactly L^2 cells; a pattern with d diagonal cells and e "
                           "symmetric off-diagonal pairs has d + 2e cells, giving C(L^2, d) C(C(d, 2), e) patterns"},
            {"terms", terms}};
  if (L == 3) {
    j["reference_count"] = 5796;
    j["reference_expression"] = "1 + C(9,7) C(7,2) + C(9,5) (2 C(5,4) + 3 C(5,3))";
    j["reference_expression_value"] = 1 + binomial(9, 7) * binomial(7, 2) + binomial(9, 5) * (2 * binomial(5, 4) + 3 * binomial(5, 3));
    j["agrees"] = false;
    j["explanation"] =
        "The reference expression evaluates to 5797, one more than the quoted 5796. It differs from the full count "
        "6511 in two places: with 5 diagonal cells it counts 40 two-pair configurations instead of C(10,2) = 45 "
        "(30 sharing a cell plus 15 disjoint), and it leaves out the 84 patterns with 3 diagonal cells forming a "
        "triangle of 3 pairs. 1 + 756 + 5670 + 84 = 6511.";
  }
  return j;
}

CommandResult cmd_atlas(const AtlasConfig& cfg) {
  try {
    if (cfg.L < 2 || cfg.L > 3) throw Error(ErrorCode::InvalidArgument, "atlas supports L in {2, 3}");
    const fs::path dir = cfg.out_dir;
    ensure_dir(dir / "patterns");
    if (cfg.diagrams) ensure_dir(dir / "diagrams");
    const std::vector<Pattern> all = enumerate_spd(cfg.L, cfg.cell_budget, 1);
    std::vector<Classification> cls(all.size());
    std::vector<std::string> hom(all.size());
    std::vector<Pattern> canon(all.size());
    std::vector<int> trank(all.size());
    const auto group = homology_group(cfg.L);
    parallel_for(all.size(), cfg.jobs, [&](std::size_t i) {
      cls[i] = classify_pattern(all[i], cfg.trials, mix_seed(cfg.seed, i));
      hom[i] = homology_class_key(all[i]);
      canon[i] = equivalence_canonical(all[i], group);
      trank[i] = tensor_rank(all[i]);
    });
    std::map<std::string, int> hom_ids;
    std::map<Pattern, int> eq_ids;
    std::map<std::string, int> verdicts;
    std::map<int, std::uint64_t> by_size;
    std::map<int, std::map<std::string, int>> verdict_by_size;
    std::ostringstream csv;
    csv << "pattern_id,size,tensor_rank,verdict,homology_orbit,equivalence_orbit\n";
    for (std::size_t i = 0; i < all.size(); ++i) {
      const int h = hom_ids.emplace(hom[i], static_cast<int>(hom_ids.size())).first->second;
      const int e = eq_ids.emplace(canon[i], static_cast<int>(eq_ids.size())).first->second;
      const std::string id = pattern_id(cfg.L, i);
      const std::string verdict = verdict_name(cls[i].verdict);
      ++verdicts[verdict];
      ++by_size[static_cast<int>(all[i].size())];
      ++verdict_by_size[static_cast<int>(all[i].size())][verdict];
      json pj = {{"id", id},
                 {"size", all[i].size()},
                 {"pattern", io::pattern_to_json(all[i])},
                 {"tensor_rank", trank[i]},
                 {"homology_orbit", h},
                 {"homology_key", hom[i]},
                 {"equivalence_orbit", e},
                 {"classification", io::classification_to_json(cls[i], mix_seed(cfg.seed, i))}};
      io::write_json(dir / "patterns" / (id + ".json"), pj);
      csv << id << ',' << all[i].size() << ',' << trank[i] << ',' << verdict << ',' << h << ',' << e << '\n';
      if (cfg.diagrams) {
        io::write_text(dir / "diagrams" / (id + ".txt"), text_diagram(all[i]));
        io::write_text(dir / "diagrams" / (id + ".pgm"), pgm_diagram(all[i]));
      }
    }
    io::write_text(dir / "summary.csv", csv.str());
    json sizes = json::object(), vsize = json::object();
    for (auto [s, n] : by_size) sizes[std::to_string(s)] = n;
    for (const auto& [s, m] : verdict_by_size) vsize[std::to_string(s)] = m;
    json report = {{"L", cfg.L},
                   {"cell_budget", cfg.cell_budget},
                   {"trials", cfg.trials},
                   {"seed", cfg.seed},
                   {"patterns", all.size()},
                   {"count_by_size", sizes},
                   {"verdicts", verdicts},
                   {"verdicts_by_size", vsize},
                   {"homology_orbits", hom_ids.size()},
                   {"equivalence_orbits", eq_ids.size()}};
    if (cfg.cell_budget >= cfg.L * cfg.L) {
      json rec = count_reconciliation(cfg.L);
      rec["enumerated_count"] = by_size.count(cfg.L * cfg.L) ? by_size[cfg.L * cfg.L] : 0;
      report["count_reconciliation"] = rec;
    }
    io::write_json(dir / "atlas.json", report);
    sidecar_log(dir, "atlas");
    return {kExitOk, report};
  } catch (const Error& e) {
    return {kExitError, error_report(e)};
  } catch (const std::exception& e) {
    return {kExitError, foreign_error_report(e)};
  }
}

// ---------------------------------------------------------------------------

namespace {

std::string record_name(std::uint64_t i) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "records/rec_%06llu.sopfld", static_cast<unsigned long long>(i));
  return buf;
}

std::vector<TorusIndex> diagonal_points(const Pattern& p) {
  std::vector<TorusIndex> out;
  for (int l : p.diagonal()) out.push_back(torus_index(l, p.L()));
  return out;
}

double default_tolerance(const std::string& mode, const std::string& path) {
  if (path == "empirical") return 0.1;
  return mode == "tensor" ? 1e-8 : 1e-7;
}

}  // namespace

CommandResult cmd_simulate(const SimulateConfig& cfg) {
  try {
    if (cfg.mode != "tensor" && cfg.mode != "general" && cfg.mode != "wssus")
      throw Error(ErrorCode::InvalidArgument, "simulate: mode must be tensor, general or wssus");
    if (cfg.realizations < 1) throw Error(ErrorCode::InvalidArgument, "simulate: need at least one realization");
    const GridSpec g = GridSpec::with_a(cfg.L, cfg.a, cfg.M);
    const Window c = cfg.window_file.empty() ? random_window(cfg.L, cfg.unimodular, mix_seed(cfg.seed, 1))
                                             : io::window_from_json(io::read_json(cfg.window_file));
    if (c.length() != cfg.L) throw Error(ErrorCode::MetadataMismatch, "simulate: window length differs from L");
    const DeltaTrain train = DeltaTrain::standard(c, g);
    const fs::path dir = cfg.out_dir;
    ensure_dir(dir / "records");

    std::optional<Pattern> pattern;
    if (!cfg.pattern_file.empty()) pattern = io::pattern_from_json(io::read_json(cfg.pattern_file));
    if (pattern && pattern->L() != cfg.L) throw Error(ErrorCode::MetadataMismatch, "simulate: pattern L differs");

    std::optional<StochasticSpreadingModel> model;
    std::optional<SpreadingField> scattering;
    if (cfg.mode == "tensor") {
      std::vector<TorusIndex> gamma;
      if (pattern) {
        gamma = diagonal_points(*pattern);
      } else {
        Rng rng(mix_seed(cfg.seed, 2));
        std::vector<int> boxes(static_cast<std::size_t>(g.boxes()));
        for (int i = 0; i < g.boxes(); ++i) boxes[i] = i;
        std::shuffle(boxes.begin(), boxes.end(), rng);
        for (int i = 0; i < cfg.L; ++i) gamma.push_back(torus_index(boxes[i], cfg.L));
      }
      if (gamma.empty() || static_cast<int>(gamma.size()) > cfg.L)
        throw Error(ErrorCode::InvalidArgument, "simulate: tensor mode needs 1..L boxes");
      pattern = tensor_pattern(cfg.L, gamma);
      model = random_clique_model(g, *pattern, cfg.factors_per_clique, mix_seed(cfg.seed, 3));
    } else if (cfg.mode == "general") {
      if (!pattern) throw Error(ErrorCode::InvalidArgument, "simulate: general mode needs --pattern");
      model = random_clique_model(g, *pattern, cfg.factors_per_clique, mix_seed(cfg.seed, 3));
    } else {
      std::vector<int> boxes = cfg.boxes;
      if (boxes.empty())
        for (int i = 0; i < g.boxes(); ++i) boxes.push_back(i);
      scattering = random_scattering(g, boxes, mix_seed(cfg.seed, 4));
      model = wssus_model(g, *scattering);
      pattern = model->pattern();
    }

    json records = json::array();
    json truths = json::array();
    for (std::uint64_t i = 0; i < cfg.realizations; ++i) {
      const std::uint64_t s = mix_seed(cfg.seed, 1000 + i);
      const SpreadingField eta = sample_realization(*model, s);
      io::save_response(dir / record_name(i), apply_channel(eta, train, {}, s));
      records.push_back(record_name(i));
      if (cfg.mode == "tensor" && cfg.with_truth) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "records/eta_%06llu.sopfld", static_cast<unsigned long long>(i));
        io::save_spreading(dir / buf, eta, s);
        truths.push_back(buf);
      }
    }
    io::save_response_autocorrelation(dir / "rf_exact.sopfld", exact_autocorrelation(*model, train), train, cfg.seed);
    json truth = nullptr;
    if (cfg.with_truth) {
      if (cfg.mode == "tensor") {
        truth = truths;
      } else if (cfg.mode == "general") {
        io::save_autocorrelation(dir / "truth.sopfld", {g, model->autocorrelation()}, cfg.seed);
        truth = "truth.sopfld";
      } else {
        io::save_spreading(dir / "truth.sopfld", *scattering, cfg.seed, "scattering");
        truth = "truth.sopfld";
      }
    }
    json ds = {{"mode", cfg.mode},
               {"L", g.L},
               {"M", g.M},
               {"a", g.a},
               {"b", g.b},
               {"seed", cfg.seed},
               {"realizations", cfg.realizations},
               {"factors", model->factors().size()},
               {"window", io::window_to_json(c)},
               {"pattern", io::pattern_to_json(*pattern)},
               {"records", records},
               {"exact_autocorrelation", "rf_exact.sopfld"},
               {"truth", truth}};
    io::write_json(dir / "dataset.json", ds);
    sidecar_log(dir, "simulate " + cfg.mode);
    json report = ds;
    report.erase("records");
    return {kExitOk, report};
  } catch (const Error& e) {
    return {kExitError, error_report(e)};
  } catch (const std::exception& e) {
    return {kExitError, foreign_error_report(e)};
  }
}

CommandResult cmd_identify(const IdentifyConfig& cfg) {
  json report = {{"mode", cfg.mode}, {"path", cfg.path}};
  try {
    if (cfg.mode != "tensor" && cfg.mode != "general" && cfg.mode != "wssus")
      throw Error(ErrorCode::InvalidArgument, "identify: mode must be tensor, general or wssus");
    if (cfg.path != "exact" && cfg.path != "empirical")
      throw Error(ErrorCode::InvalidArgument, "identify: path must be exact or empirical");
    const fs::path dir = cfg.in_dir;
    const json ds = io::read_json(dir / "dataset.json");
    const std::string ds_mode = ds.at("mode").get<std::string>();
    if (ds_mode != cfg.mode)
      throw Error(ErrorCode::MetadataMismatch, "identify: dataset was simulated in " + ds_mode + " mode");
    const GridSpec g(ds.at("L").get<int>(), ds.at("a").get<double>(), ds.at("b").get<double>(), ds.at("M").get<int>());
    const Window c = io::window_from_json(ds.at("window"));
    const GaborFrame G(c);
    Pattern p = cfg.pattern_file.empty() ? io::pattern_from_json(ds.at("pattern"))
                                         : io::pattern_from_json(io::read_json(cfg.pattern_file));
    if (cfg.mode == "wssus" && cfg.pattern_file.empty()) p = diagonal_pattern(g.L);
    if (p.L() != g.L) throw Error(ErrorCode::MetadataMismatch, "identify: pattern L differs from the dataset");
    const double tol = cfg.tolerance.value_or(default_tolerance(cfg.mode, cfg.path));
    report["tolerance"] = tol;
    report["pattern"] = io::pattern_to_json(p);
    const bool has_truth = !ds.at("truth").is_null();

    std::vector<ResponseRecord> recs;
    auto load_records = [&] {
      for (const auto& name : ds.at("records")) {
        ResponseRecord r = io::load_response(dir / name.get<std::string>());
        if (!(r.grid == g)) throw Error(ErrorCode::MetadataMismatch, "identify: record grid differs from the dataset");
        if ((r.train.window.entries() - c.entries()).norm() > 0.0)
          throw Error(ErrorCode::MetadataMismatch, "identify: record sounded with a different window");
        recs.push_back(std::move(r));
      }
    };

    fs::path out_field = cfg.out_file;
    out_field.replace_extension(".sopfld");
    double error = -1.0, residual = 0.0;
    if (cfg.mode == "tensor") {
      load_records();
      const auto gamma = diagonal_points(p);
      json files = json::array();
      for (std::size_t i = 0; i < recs.size(); ++i) {
        const SpreadingField eta = reconstruct_eta_tensor(recs[i], gamma, G);
        fs::path f = cfg.out_file;
        f.replace_extension("");
        f += "_" + std::to_string(i) + ".sopfld";
        io::save_spreading(f, eta, recs[i].seed);
        files.push_back(f.filename().string());
        if (has_truth) {
          const SpreadingField truth = io::load_spreading(dir / ds.at("truth")[i].get<std::string>());
          error = std::max(error, relative_error(eta.values(), truth.values()));
        }
      }
      report["reconstruction"] = files;
    } else {
      ResponseAutocorrelation Rf;
      if (cfg.path == "exact") {
        Rf = io::load_response_autocorrelation(dir / ds.at("exact_autocorrelation").get<std::string>());
        if (!(Rf.grid == g)) throw Error(ErrorCode::MetadataMismatch, "identify: autocorrelation grid differs");
      } else {
        load_records();
        Rf = ensemble_autocorrelation(recs);
      }
      report["realizations"] = Rf.realizations;
      if (cfg.mode == "general") {
        const RReconstruction rr = reconstruct_R(Rf, p, G);
        residual = rr.relative_residual;
        report["hermitian_asymmetry"] = rr.R.max_asymmetry();
        io::save_autocorrelation(out_field, rr.R, ds.at("seed").get<std::uint64_t>());
        if (has_truth) error = relative_error(rr.R.values, io::load_autocorrelation(dir / "truth.sopfld").values);
      } else {
        const SpreadingField C = reconstruct_scattering_wssus(Rf, p, G);
        io::save_spreading(out_field, C, ds.at("seed").get<std::uint64_t>(), "scattering");
        if (has_truth) error = relative_error(C.values(), io::load_spreading(dir / "truth.sopfld").values());
      }
      report["reconstruction"] = out_field.filename().string();
      report["relative_residual"] = residual;
    }
    bool ok = true;
    if (has_truth) {
      report["relative_error"] = error;
      ok = error <= tol;
    }
    if (cfg.path == "exact" && cfg.mode != "tensor") ok = ok && residual <= tol;
    report["within_tolerance"] = ok;
    io::write_json(cfg.out_file, report);
    return {ok ? kExitOk : kExitTolerance, report};
  } catch (const Error& e) {
    report.update(error_report(e));
    int code = kExitError;
    if (e.code() == ErrorCode::NotLeftInvertible) {
      try {
        const json ds = io::read_json(cfg.in_dir / "dataset.json");
        const Pattern p = cfg.pattern_file.empty() ? io::pattern_from_json(ds.at("pattern"))
                                                   : io::pattern_from_json(io::read_json(cfg.pattern_file));
        report["certificate"] = io::classification_to_json(classify_pattern(p, 16, ds.at("seed").get<std::uint64_t>()),
                                                           ds.at("seed").get<std::uint64_t>());
      } catch (const Error&) {
      }
      code = kExitDefective;
    }
    if (!cfg.out_file.empty()) {
      try {
        io::write_json(cfg.out_file, report);
      } catch (const Error&) {
      }
    }
    return {code, report};
  } catch (const std::exception& e) {
    report.update(foreign_error_report(e));
    return {kExitError, report};
  }
}

}  // namespace sop
