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

#include <cmath>

#include "sop/channel.hpp"
#include "sop/random.hpp"

namespace sop {
namespace {

SpreadingField random_field_on(const GridSpec& g, std::span<const TorusIndex> boxes, Rng& rng) {
  SpreadingField eta(g);
  for (auto t : boxes)
    for (int s = 0; s < g.M; ++s)
      for (int r = 0; r < g.M; ++r) eta.at(t.k, t.n, s, r) = complex_normal(rng);
  return eta;
}

std::vector<TorusIndex> all_boxes(int L) {
  std::vector<TorusIndex> out;
  for (int f = 0; f < L * L; ++f) out.push_back(torus_index(f, L));
  return out;
}

Window ones(int L) { return Window(CVector::Ones(L), true); }

// root mean square of ||T(f f^*) - C|| over single realizations, the
// per-realization error constant of the empirical estimator
double wssus_error_constant(const StochasticSpreadingModel& m, const DeltaTrain& tr, const GaborFrame& G,
                            const SpreadingField& C, int draws) {
  double acc = 0.0;
  for (int i = 0; i < draws; ++i) {
    const auto f = apply_channel(sample_realization(m, 7000000 + i), tr);
    const ResponseAutocorrelation one{m.grid(), f.window, f.samples * f.samples.adjoint(), 1};
    acc += (reconstruct_scattering_wssus(one, diagonal_pattern(m.grid().L), G).values() - C.values()).squaredNorm();
  }
  return std::sqrt(acc / draws) / C.values().norm();
}

TEST(Grid, Validation) {
  EXPECT_NO_THROW(GridSpec(3, 1.0, 1.0 / 3.0, 4));
  EXPECT_THROW(GridSpec(3, 1.0, 0.3, 4), Error);
  EXPECT_THROW(GridSpec(3, 1.0, 1.0 / 3.0, 0), Error);
  const GridSpec g = GridSpec::with_a(3, 2.0, 2);
  EXPECT_DOUBLE_EQ(g.b, 1.0 / 6.0);
  EXPECT_EQ(g.node_count(), 36);
  EXPECT_EQ(g.node(2, 1, 1, 0), g.node(7, 1, 0));
}

TEST(Model, SupportValidation) {
  const GridSpec g = GridSpec::with_a(3, 1.0, 2);
  SpreadingField f(g);
  f.at(0, 0, 0, 0) = 1.0;
  f.at(1, 1, 1, 1) = 1.0;
  try {
    StochasticSpreadingModel(g, {f}, diagonal_pattern(3));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SupportViolation);
  }
  EXPECT_NO_THROW(StochasticSpreadingModel(g, {f}, Pattern(3, {{0, 0}, {4, 4}, {0, 4}, {4, 0}})));
}

TEST(Sample, UnitModeAndDeterminism) {
  const GridSpec g = GridSpec::with_a(3, 1.0, 2);
  Rng rng(1);
  const std::vector<TorusIndex> box{{1, 2}};
  const SpreadingField phi = random_field_on(g, box, rng);
  const StochasticSpreadingModel m(g, {phi}, Pattern(3, {{5, 5}}));
  EXPECT_EQ(sample_realization(m, 3, SampleMode::Unit).values(), phi.values());
  EXPECT_EQ(sample_realization(m, 3).values(), sample_realization(m, 3).values());
  EXPECT_NE(sample_realization(m, 3).values(), sample_realization(m, 4).values());
}

TEST(Sample, MeanVanishesAtRootNRate) {
  const GridSpec g = GridSpec::with_a(3, 1.0, 2);
  const Pattern p(3, {{0, 0}, {1, 1}, {0, 1}, {1, 0}, {4, 4}, {8, 8}});
  const auto m = random_clique_model(g, p, 2, 5);
  const double scale = std::sqrt(m.autocorrelation().trace().real());
  for (int N : {100, 10000}) {
    CVector mean = CVector::Zero(g.node_count());
    CMatrix R = CMatrix::Zero(g.node_count(), g.node_count());
    for (int i = 0; i < N; ++i) {
      const CVector v = sample_realization(m, mix_seed(77, i)).values();
      mean += v;
      R += v * v.adjoint();
    }
    mean /= N;
    EXPECT_LT(mean.norm() / scale, 3.0 / std::sqrt(N)) << N;
    // off-pattern blocks hold only cross terms of independent factors
    const int per = g.M * g.M;
    double off = 0.0;
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j)
        if (!p.contains({i, j})) off += R.block(i * per, j * per, per, per).squaredNorm();
    EXPECT_LT(std::sqrt(off) / R.norm(), 3.0 / std::sqrt(N)) << N;
  }
  const Pattern support = m.box_support();
  for (const Cell& c : support.cells()) EXPECT_TRUE(p.contains(c));
  for (int i = 0; i < 20; ++i)
    for (int box : sample_realization(m, i).box_support()) EXPECT_TRUE(p.contains({box, box}));
}

TEST(Channel, ZeroAndLinearity) {
  const GridSpec g = GridSpec::with_a(3, 1.0, 4);
  const Window c = random_window(3, false, 2);
  const auto tr = DeltaTrain::standard(c, g);
  EXPECT_EQ(apply_channel(SpreadingField(g), tr).samples.cwiseAbs().maxCoeff(), 0.0);
  Rng rng(3);
  const auto boxes = all_boxes(3);
  const SpreadingField e1 = random_field_on(g, boxes, rng), e2 = random_field_on(g, boxes, rng);
  const SpreadingField sum(g, e1.values() + e2.values());
  const CVector lhs = apply_channel(sum, tr).samples;
  const CVector rhs = apply_channel(e1, tr).samples + apply_channel(e2, tr).samples;
  EXPECT_LT((lhs - rhs).norm(), 1e-12 * lhs.norm());
  EXPECT_EQ(apply_channel(e1, tr).samples.size(), 3 * 4 * 4);
}

TEST(Channel, SingleNodeResponse) {
  const GridSpec g = GridSpec::with_a(3, 1.0, 4);
  const int k0 = 1, n0 = 2, s0 = 3, r0 = 1;
  SpreadingField eta(g);
  eta.at(k0, n0, s0, r0) = 1.0;
  const auto f = apply_channel(eta, DeltaTrain::standard(ones(3), g));
  const double nu0 = g.b * (n0 + static_cast<double>(r0) / g.M);
  const double pi2 = 2.0 * std::acos(-1.0);
  for (long long xi = (1 - g.M) * g.L * g.M; xi < g.L * g.M; ++xi) {
    const double x = g.a * xi / g.M;
    const bool on = ((xi % g.M) + g.M) % g.M == s0;
    const cplx want = on ? (g.b / g.M) * std::exp(cplx(0.0, pi2 * nu0 * x)) : cplx(0.0);
    EXPECT_LT(std::abs(f.at(xi) - want), 1e-13) << xi;
  }
}

TEST(Channel, TrainTooShort) {
  const GridSpec g = GridSpec::with_a(3, 1.0, 4);
  SpreadingField eta(g);
  eta.at(2, 0, 0, 0) = 1.0;
  DeltaTrain tr = DeltaTrain::standard(ones(3), g);
  tr.k_begin += 2;
  try {
    apply_channel(eta, tr);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TrainTooShort);
  }
  // a field in the first box column never reaches the earliest impulses
  SpreadingField early(g);
  early.at(0, 0, 0, 0) = 1.0;
  EXPECT_NO_THROW(apply_channel(early, tr));
  tr.k_end -= 1;
  EXPECT_THROW(apply_channel(early, tr), Error);
}

TEST(Zak, ZeroAndSingleTerm) {
  const GridSpec g = GridSpec::with_a(3, 1.0, 4);
  const auto f0 = apply_channel(SpreadingField(g), DeltaTrain::standard(ones(3), g));
  EXPECT_EQ(zak(f0).values.cwiseAbs().maxCoeff(), 0.0);

  const GridSpec g1 = GridSpec::with_a(3, 1.0, 1);
  Rng rng(4);
  const auto f = apply_channel(random_field_on(g1, all_boxes(3), rng), DeltaTrain::standard(random_window(3, false, 1), g1));
  const ZakField z = zak(f);
  ASSERT_EQ(z.values.cols(), 1);
  for (int xi = 0; xi < 3; ++xi) EXPECT_EQ(z.values(xi, 0), f.at(xi));
}

TEST(Zak, SingleNodeClosedForm) {
  const GridSpec g = GridSpec::with_a(3, 1.0, 4);
  const int L = 3, M = 4, k0 = 2, n0 = 1, s0 = 2, r0 = 3;
  SpreadingField eta(g);
  eta.at(k0, n0, s0, r0) = 1.0;
  const ZakField z = zak(apply_channel(eta, DeltaTrain::standard(ones(L), g)));
  for (int xi = 0; xi < L * M; ++xi)
    for (int r = 0; r < M; ++r) {
      // b e^{2 pi i nu0 x} on the s0 comb, times delta(r, r0)
      const cplx want = (xi % M == s0 && r == r0) ? g.b * unit_phase((n0 * M + r0) * xi, L * M * M) : cplx(0.0);
      EXPECT_LT(std::abs(z.values(xi, r) - want), 1e-13);
    }
}

TEST(Zak, QuasiPeriodicity) {
  const GridSpec g = GridSpec::with_a(3, 1.0, 4);
  const Window c = random_window(3, false, 6);
  const ResponseWindow w{1 - g.M, g.M + 1};
  Rng rng(8);
  const auto f = apply_channel(random_field_on(g, all_boxes(3), rng), DeltaTrain::covering(c, g, w), w);
  const ZakField z0 = zak(f, 0), z1 = zak(f, 1);
  const double scale = z0.values.cwiseAbs().maxCoeff();
  for (int i = 0; i < g.L * g.M; ++i)
    for (int r = 0; r < g.M; ++r)
      EXPECT_LT(std::abs(z1.values(i, r) - unit_phase(r, g.M) * z0.values(i, r)), 1e-10 * scale);
  try {
    zak(f, 2);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientExtent);
  }
}

TEST(Demix, SingleBoxConstant) {
  const GridSpec g = GridSpec::with_a(3, 1.0, 4);
  const Window c = random_window(3, false, 9);
  const GaborFrame G(c);
  const int k0 = 1, n0 = 2;
  SpreadingField eta(g);
  for (int s = 0; s < 4; ++s)
    for (int r = 0; r < 4; ++r) eta.at(k0, n0, s, r) = 1.0;
  const DemixField Z = demix(zak(apply_channel(eta, DeltaTrain::standard(c, g))));
  for (int s = 0; s < 4; ++s)
    for (int r = 0; r < 4; ++r) {
      const CVector want = G.column(TorusIndex{k0, n0}) * unit_phase(n0 * s, g.L * g.M);
      EXPECT_LT((Z.node(s, r) - want).norm(), 1e-12);
    }
  const DemixField Z0 = demix(zak(apply_channel(SpreadingField(g), DeltaTrain::standard(c, g))));
  EXPECT_EQ(Z0.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Demix, MixingIdentity) {
  Rng rng(10);
  for (int M : {1, 2, 4}) {
    const GridSpec g = GridSpec::with_a(3, 1.5, M);
    for (int t = 0; t < 10; ++t) {
      const Window c = random_window(3, t % 2 == 1, 100 + t);
      const GaborFrame G(c);
      std::vector<TorusIndex> boxes = all_boxes(3);
      std::shuffle(boxes.begin(), boxes.end(), rng);
      boxes.resize(t < 5 ? 3 : 9);
      const SpreadingField eta = random_field_on(g, boxes, rng);
      const auto f = apply_channel(eta, DeltaTrain::standard(c, g));
      const DemixField Z = demix(zak(f));
      const CVector via_op = demix_operator(g, f.window) * f.samples;
      for (int s = 0; s < M; ++s)
        for (int r = 0; r < M; ++r) {
          CVector pred = CVector::Zero(3);
          for (int l = 0; l < 9; ++l) pred += G.column(l) * eta.patch(l, s, r);
          EXPECT_LT(relative_error(Z.node(s, r), pred), 1e-9);
          EXPECT_LT((via_op.segment((s * M + r) * 3, 3) - Z.node(s, r)).norm(), 1e-12 * (1.0 + pred.norm()));
        }
    }
  }
}

TEST(Tensor, RoundTrip) {
  const GridSpec g = GridSpec::with_a(3, 1.0, 4);
  Rng rng(11);
  for (int t = 0; t < 10; ++t) {
    const Window c = random_window(3, false, 200 + t);
    std::vector<TorusIndex> boxes = all_boxes(3);
    std::shuffle(boxes.begin(), boxes.end(), rng);
    boxes.resize(1 + t % 3);
    const SpreadingField eta = random_field_on(g, boxes, rng);
    const auto rec = reconstruct_eta_tensor(apply_channel(eta, DeltaTrain::standard(c, g)), boxes, GaborFrame(c));
    EXPECT_LT(relative_error(rec.values(), eta.values()), 1e-8);
  }
}

TEST(Tensor, SingleBoxAndZero) {
  const GridSpec g = GridSpec::with_a(3, 1.0, 4);
  const Window c = random_window(3, false, 12);
  const std::vector<TorusIndex> gamma{{2, 1}, {0, 0}, {1, 2}};
  SpreadingField eta(g);
  for (int s = 0; s < 4; ++s)
    for (int r = 0; r < 4; ++r) eta.at(2, 1, s, r) = cplx(0.5, -2.0);
  const auto rec = reconstruct_eta_tensor(apply_channel(eta, DeltaTrain::standard(c, g)), gamma, GaborFrame(c));
  for (int s = 0; s < 4; ++s)
    for (int r = 0; r < 4; ++r) {
      EXPECT_LT(std::abs(rec.at(2, 1, s, r) - cplx(0.5, -2.0)), 1e-10);
      EXPECT_LT(std::abs(rec.at(0, 0, s, r)), 1e-10);
    }
  const auto zero = reconstruct_eta_tensor(apply_channel(SpreadingField(g), DeltaTrain::standard(c, g)), gamma, GaborFrame(c));
  EXPECT_EQ(zero.values().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Tensor, Errors) {
  const GridSpec g = GridSpec::with_a(2, 1.0, 2);
  CVector c(2);
  c << 1.0, 0.0;
  const Window w(c);
  const std::vector<TorusIndex> dependent{{0, 0}, {0, 1}};
  SpreadingField eta(g);
  eta.at(0, 0, 0, 0) = 1.0;
  try {
    reconstruct_eta_tensor(apply_channel(eta, DeltaTrain::standard(w, g)), dependent, GaborFrame(w));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularSubframe);
  }
  const GridSpec g3 = GridSpec::with_a(3, 1.0, 2);
  const Window c3 = random_window(3, false, 1);
  Rng rng(2);
  const std::vector<TorusIndex> two{{0, 0}, {1, 1}}, three{{0, 0}, {1, 1}, {2, 2}};
  const auto f = apply_channel(random_field_on(g3, three, rng), DeltaTrain::standard(c3, g3));
  try {
    reconstruct_eta_tensor(f, two, GaborFrame(c3));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SupportViolation);
  }
}

TEST(Ensemble, SingleRecordAndDeterministicModel) {
  const GridSpec g = GridSpec::with_a(3, 1.0, 2);
  const Window c = random_window(3, false, 13);
  const auto tr = DeltaTrain::standard(c, g);
  Rng rng(14);
  const std::vector<TorusIndex> box{{0, 2}, {1, 1}};
  const SpreadingField phi = random_field_on(g, box, rng);
  const auto f = apply_channel(phi, tr);
  const std::vector<ResponseRecord> one{f};
  const auto R1 = ensemble_autocorrelation(one);
  EXPECT_LT((R1.values - f.samples * f.samples.adjoint()).norm(), 1e-14);
  EXPECT_EQ(Eigen::FullPivLU<CMatrix>(R1.values).rank(), 1);

  const StochasticSpreadingModel m(g, {phi}, Pattern(3, {{2, 2}, {4, 4}, {2, 4}, {4, 2}}));
  const auto exact = exact_autocorrelation(m, tr);
  for (int N : {1, 3, 10}) {
    std::vector<ResponseRecord> recs;
    for (int i = 0; i < N; ++i) recs.push_back(apply_channel(sample_realization(m, i, SampleMode::Unit), tr));
    EXPECT_LT(relative_error(ensemble_autocorrelation(recs).values, exact.values), 1e-14);
  }
}

TEST(Ensemble, MismatchedRecords) {
  const GridSpec g = GridSpec::with_a(3, 1.0, 2), h = GridSpec::with_a(3, 1.0, 4);
  const Window c = random_window(3, false, 1);
  const std::vector<ResponseRecord> recs{apply_channel(SpreadingField(g), DeltaTrain::standard(c, g)),
                                         apply_channel(SpreadingField(h), DeltaTrain::standard(c, h))};
  try {
    ensemble_autocorrelation(recs);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MetadataMismatch);
  }
}

TEST(Ensemble, FastPathMatchesRealizations) {
  const GridSpec g = GridSpec::with_a(3, 1.0, 2);
  const Window c = random_window(3, false, 15);
  const auto tr = DeltaTrain::standard(c, g);
  const auto m = random_clique_model(g, Pattern(3, {{0, 0}, {3, 3}, {0, 3}, {3, 0}, {7, 7}}), 2, 3);
  std::vector<ResponseRecord> recs;
  for (int i = 0; i < 300; ++i) recs.push_back(apply_channel(sample_realization(m, mix_seed(21, i)), tr));
  const auto slow = ensemble_autocorrelation(recs);
  const auto fast = simulate_ensemble(m, tr, 300, 21, 3);
  EXPECT_LT(relative_error(fast.values, slow.values), 1e-12);
  EXPECT_EQ(fast.realizations, 300u);
  EXPECT_LT(relative_error(simulate_ensemble(m, tr, 300, 21, 1).values, fast.values), 1e-12);
}

TEST(Ensemble, ConvergesAtRootNRate) {
  const GridSpec g = GridSpec::with_a(3, 1.0, 2);
  const Window c = random_window(3, false, 16);
  const auto tr = DeltaTrain::standard(c, g);
  const auto m = wssus_model(g, random_scattering(g, {0, 1, 2, 3, 4, 5, 6, 7, 8}, 2));
  const auto exact = exact_autocorrelation(m, tr);
  // per-realization constant from the single-draw variance of f f^*
  double var = 0.0;
  const int draws = 500;
  for (int i = 0; i < draws; ++i) {
    const CVector f = apply_channel(sample_realization(m, 9000000 + i), tr).samples;
    var += (f * f.adjoint() - exact.values).squaredNorm();
  }
  const double kappa = std::sqrt(var / draws) / exact.values.norm();
  for (int N : {100, 1000, 10000}) {
    const double err = relative_error(simulate_ensemble(m, tr, N, 5, 4).values, exact.values);
    EXPECT_LT(err, 5.0 * kappa / std::sqrt(N)) << N;
    EXPECT_GT(err, 0.2 * kappa / std::sqrt(N)) << N;
  }
}

TEST(ReconstructR, DiagonalAndCliquePatterns) {
  const GridSpec g = GridSpec::with_a(3, 1.0, 2);
  const Window c = random_window(3, false, 17);
  const GaborFrame G(c);
  const auto tr = DeltaTrain::standard(c, g);
  for (const Pattern& p : {diagonal_pattern(3), Pattern(3, {{0, 0}, {1, 1}, {0, 1}, {1, 0}, {4, 4}, {8, 8}, {5, 5}}),
                           Pattern(3, {{2, 2}, {6, 6}, {2, 6}, {6, 2}, {3, 3}, {7, 7}, {0, 0}})}) {
    const auto m = random_clique_model(g, p, 2, 19);
    const auto rr = reconstruct_R(exact_autocorrelation(m, tr), p, G, 1e-9);
    EXPECT_LT(relative_error(rr.R.values, m.autocorrelation()), 1e-7);
    EXPECT_LT(rr.R.max_asymmetry(), 1e-10 * m.autocorrelation().cwiseAbs().maxCoeff());
    EXPECT_LT(rr.relative_residual, 1e-10);
  }
}

TEST(ReconstructR, ZeroInput) {
  const GridSpec g = GridSpec::with_a(3, 1.0, 2);
  const Window c = random_window(3, false, 18);
  const ResponseAutocorrelation zero{g, ResponseWindow::standard(2), CMatrix::Zero(12, 12), 0};
  EXPECT_EQ(reconstruct_R(zero, diagonal_pattern(3), GaborFrame(c)).R.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(ReconstructR, AgreesWithTensorPath) {
  const GridSpec g = GridSpec::with_a(3, 1.0, 2);
  const Window c = random_window(3, false, 20);
  const GaborFrame G(c);
  const auto tr = DeltaTrain::standard(c, g);
  const std::vector<TorusIndex> gamma{{0, 1}, {1, 0}, {2, 2}};
  const Pattern p = tensor_pattern(3, gamma);
  Rng rng(3);
  const SpreadingField phi = random_field_on(g, gamma, rng);
  const StochasticSpreadingModel m(g, {phi}, p);
  const auto rr = reconstruct_R(exact_autocorrelation(m, tr), p, G);
  const SpreadingField eta = reconstruct_eta_tensor(apply_channel(sample_realization(m, 0, SampleMode::Unit), tr), gamma, G);
  const CMatrix outer = eta.values() * eta.values().adjoint();
  EXPECT_LT(relative_error(rr.R.values, outer), 1e-7);
}

TEST(ReconstructR, Errors) {
  const GridSpec g = GridSpec::with_a(3, 1.0, 2);
  const Window c = random_window(3, false, 21);
  const GaborFrame G(c);
  const auto tr = DeltaTrain::standard(c, g);
  const auto m = random_clique_model(g, diagonal_pattern(3), 1, 2);
  const auto Rf = exact_autocorrelation(m, tr);
  std::vector<Cell> arrow;
  for (int v = 0; v < 5; ++v) arrow.push_back({v, v});
  for (int v = 1; v < 5; ++v) arrow.push_back({0, v}), arrow.push_back({v, 0});
  try {
    reconstruct_R(Rf, Pattern(3, arrow), G);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotLeftInvertible);
  }
  try {
    reconstruct_R(Rf, Pattern(3, {{0, 0}, {1, 1}}), G, 1e-6);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ResidualTooLarge);
  }
}

TEST(Wssus, SingleBoxAndFullStrip) {
  const GridSpec g = GridSpec::with_a(3, 1.0, 4);
  const Window c = random_window(3, false, 22);
  const GaborFrame G(c);
  const auto tr = DeltaTrain::standard(c, g);
  SpreadingField one(g);
  for (int s = 0; s < 4; ++s)
    for (int r = 0; r < 4; ++r) one.at(1, 2, s, r) = 1.0;
  const auto C1 = reconstruct_scattering_wssus(exact_autocorrelation(wssus_model(g, one), tr), diagonal_pattern(3), G);
  EXPECT_LT(relative_error(C1.values(), one.values()), 1e-8);

  // three boxes per row on every row: spread L > 1
  const SpreadingField strip = random_scattering(g, {0, 1, 2, 3, 4, 5, 6, 7, 8}, 4);
  const auto C = reconstruct_scattering_wssus(exact_autocorrelation(wssus_model(g, strip), tr), diagonal_pattern(3), G, 1e-9);
  EXPECT_LT(relative_error(C.values(), strip.values()), 1e-7);
}

TEST(Wssus, MonteCarloDefaultConfig) {
  // window and scattering drawn the way the simulate command does for seed 1
  const GridSpec g = GridSpec::with_a(3, 1.0, 4);
  const Window c = random_window(3, false, mix_seed(1, 1));
  const GaborFrame G(c);
  const auto tr = DeltaTrain::standard(c, g);
  const SpreadingField C = random_scattering(g, {0, 1, 2, 3, 4, 5, 6, 7, 8}, mix_seed(1, 4));
  const auto m = wssus_model(g, C);
  const double kappa = wssus_error_constant(m, tr, G, C, 1000);
  std::vector<double> errs;
  for (int N : {100, 1000, 10000}) {
    const auto Ce = reconstruct_scattering_wssus(simulate_ensemble(m, tr, N, 1, 4), diagonal_pattern(3), G);
    errs.push_back(relative_error(Ce.values(), C.values()));
    EXPECT_LT(errs.back(), 2.0 * kappa / std::sqrt(N)) << N;
  }
  EXPECT_LE(errs.back(), 0.05);
  const double slope = (std::log10(errs[2]) - std::log10(errs[0])) / 2.0;
  EXPECT_NEAR(slope, -0.5, 0.1);
}

}  // namespace
}  // namespace sop
