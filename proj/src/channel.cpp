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

#include "sop/channel.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "sop/parallel.hpp"
#include "sop/random.hpp"

namespace sop {

GridSpec::GridSpec(int L_, double a_, double b_, int M_) : L(L_), a(a_), b(b_), M(M_) {
  if (L < 2) throw Error(ErrorCode::InvalidArgument, "grid: L must be >= 2");
  if (M < 1) throw Error(ErrorCode::InvalidArgument, "grid: M must be >= 1");
  if (!(a > 0.0) || !(b > 0.0) || std::abs(a * b * L - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "grid: need a, b > 0 with a b L = 1");
}

bool GridSpec::operator==(const GridSpec& o) const {
  return L == o.L && M == o.M && std::abs(a - o.a) <= 1e-12 * a && std::abs(b - o.b) <= 1e-12 * b;
}

SpreadingField::SpreadingField(const GridSpec& grid) : grid_(grid), values_(CVector::Zero(grid.node_count())) {}

SpreadingField::SpreadingField(const GridSpec& grid, CVector values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.node_count())
    throw Error(ErrorCode::InvalidArgument, "spreading field: value count does not match the grid");
  for (Eigen::Index i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i].real()) || !std::isfinite(values_[i].imag()))
      throw Error(ErrorCode::InvalidArgument, "spreading field: non-finite value");
}

cplx SpreadingField::patch(int box, int s, int r) const {
  const int n = box % grid_.L;
  return values_[grid_.node(box, s, r)] * unit_phase(static_cast<long long>(n) * s, grid_.L * grid_.M);
}

std::vector<int> SpreadingField::box_support() const {
  const int per = grid_.M * grid_.M;
  std::vector<int> out;
  for (int box = 0; box < grid_.boxes(); ++box)
    if (values_.segment(static_cast<Eigen::Index>(box) * per, per).cwiseAbs().maxCoeff() > 0.0) out.push_back(box);
  return out;
}

double relative_error(const CVector& estimate, const CVector& truth) {
  const double d = (estimate - truth).norm();
  const double t = truth.norm();
  return t > 0.0 ? d / t : d;
}

double relative_error(const CMatrix& estimate, const CMatrix& truth) {
  const double d = (estimate - truth).norm();
  const double t = truth.norm();
  return t > 0.0 ? d / t : d;
}

// ---------------------------------------------------------------------------

StochasticSpreadingModel::StochasticSpreadingModel(const GridSpec& grid, std::vector<SpreadingField> factors,
                                                   Pattern pattern)
    : grid_(grid), factors_(std::move(factors)), pattern_(std::move(pattern)) {
  if (pattern_.L() != grid_.L) throw Error(ErrorCode::InvalidArgument, "model: pattern L does not match the grid");
  for (const auto& f : factors_)
    if (!(f.grid() == grid_)) throw Error(ErrorCode::InvalidArgument, "model: factor grid mismatch");
  const Pattern support = box_support();
  for (const Cell& c : support.cells())
    if (!pattern_.contains(c))
      throw Error(ErrorCode::SupportViolation, "model: autocorrelation has box pair (" + std::to_string(c.row) + ", " +
                                                   std::to_string(c.col) + ") outside the declared pattern");
}

CMatrix StochasticSpreadingModel::autocorrelation() const {
  CMatrix phi(grid_.node_count(), static_cast<Eigen::Index>(factors_.size()));
  for (std::size_t j = 0; j < factors_.size(); ++j) phi.col(static_cast<Eigen::Index>(j)) = factors_[j].values();
  return phi * phi.adjoint();
}

Pattern StochasticSpreadingModel::box_support() const {
  const CMatrix R = autocorrelation();
  const int per = grid_.M * grid_.M;
  const double scale = R.size() ? R.cwiseAbs().maxCoeff() : 0.0;
  std::vector<Cell> cells;
  for (int i = 0; i < grid_.boxes(); ++i)
    for (int j = 0; j < grid_.boxes(); ++j)
      if (scale > 0.0 && R.block(i * per, j * per, per, per).cwiseAbs().maxCoeff() > 1e-14 * scale)
        cells.push_back({i, j});
  return Pattern(grid_.L, std::move(cells));
}

namespace {

CVector draw_coefficients(std::size_t count, std::uint64_t seed, SampleMode mode) {
  CVector xi(static_cast<Eigen::Index>(count));
  if (mode == SampleMode::Unit) {
    xi.setOnes();
    return xi;
  }
  Rng rng(seed);
  for (std::size_t j = 0; j < count; ++j) xi[static_cast<Eigen::Index>(j)] = complex_normal(rng);
  return xi;
}

}  // namespace

SpreadingField sample_realization(const StochasticSpreadingModel& model, std::uint64_t seed, SampleMode mode) {
  const CVector xi = draw_coefficients(model.factors().size(), seed, mode);
  SpreadingField eta(model.grid());
  for (std::size_t j = 0; j < model.factors().size(); ++j)
    eta.values() += xi[static_cast<Eigen::Index>(j)] * model.factors()[j].values();
  return eta;
}

StochasticSpreadingModel random_clique_model(const GridSpec& grid, const Pattern& pattern, int factors_per_clique,
                                             std::uint64_t seed) {
  if (factors_per_clique < 1) throw Error(ErrorCode::InvalidArgument, "model: need at least one factor per clique");
  if (!validate_spd(pattern)) throw Error(ErrorCode::InvalidArgument, "model: pattern is not SPD");
  const int per = grid.M * grid.M;
  std::vector<SpreadingField> factors;
  std::uint64_t stream = 0;
  for (const auto& clique : maximal_cliques(pattern)) {
    for (int j = 0; j < factors_per_clique; ++j) {
      Rng rng(mix_seed(seed, stream++));
      SpreadingField f(grid);
      for (int box : clique)
        for (int i = 0; i < per; ++i) f.values()[static_cast<Eigen::Index>(box) * per + i] = complex_normal(rng);
      factors.push_back(std::move(f));
    }
  }
  return StochasticSpreadingModel(grid, std::move(factors), pattern);
}

StochasticSpreadingModel wssus_model(const GridSpec& grid, const SpreadingField& scattering) {
  if (!(scattering.grid() == grid)) throw Error(ErrorCode::InvalidArgument, "wssus model: grid mismatch");
  std::vector<SpreadingField> factors;
  std::vector<Cell> cells;
  const int per = grid.M * grid.M;
  for (int u = 0; u < grid.node_count(); ++u) {
    const double c = scattering.values()[u].real();
    if (c < 0.0 || std::abs(scattering.values()[u].imag()) > 1e-12 * std::max(1.0, c))
      throw Error(ErrorCode::InvalidArgument, "wssus model: scattering function must be real and nonnegative");
    if (c == 0.0) continue;
    SpreadingField f(grid);
    f.values()[u] = std::sqrt(c);
    factors.push_back(std::move(f));
    cells.push_back({u / per, u / per});
  }
  return StochasticSpreadingModel(grid, std::move(factors), Pattern(grid.L, std::move(cells)));
}

SpreadingField random_scattering(const GridSpec& grid, const std::vector<int>& boxes, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  SpreadingField C(grid);
  const int per = grid.M * grid.M;
  for (int box : boxes) {
    if (box < 0 || box >= grid.boxes()) throw Error(ErrorCode::InvalidArgument, "random_scattering: box out of range");
    for (int i = 0; i < per; ++i) C.values()[static_cast<Eigen::Index>(box) * per + i] = u(rng);
  }
  return C;
}

// ---------------------------------------------------------------------------

DeltaTrain DeltaTrain::standard(const Window& c, const GridSpec& g) {
  if (c.length() != g.L) throw Error(ErrorCode::InvalidArgument, "delta train: window length must equal L");
  return DeltaTrain{c, g.a, -static_cast<long long>(g.M) * g.L, g.L};
}

DeltaTrain DeltaTrain::covering(const Window& c, const GridSpec& g, const ResponseWindow& w) {
  if (c.length() != g.L) throw Error(ErrorCode::InvalidArgument, "delta train: window length must equal L");
  const long long first = static_cast<long long>(w.first_translate) * g.L;
  return DeltaTrain{c, g.a, first - g.L + 1, first + static_cast<long long>(w.translates) * g.L};
}

namespace {

ResponseWindow resolve(const ResponseWindow& w, const GridSpec& g) {
  if (w.translates == 0) return ResponseWindow::standard(g.M);
  if (w.translates < 0) throw Error(ErrorCode::InvalidArgument, "response window: negative translate count");
  return w;
}

long long first_xi(const ResponseWindow& w, const GridSpec& g) {
  return static_cast<long long>(w.first_translate) * g.L * g.M;
}

long long floor_div(long long a, long long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

}  // namespace

bool ResponseRecord::holds(long long xi) const {
  const long long i = xi - first_xi(window, grid);
  return i >= 0 && i < samples.size();
}

cplx ResponseRecord::at(long long xi) const {
  if (!holds(xi)) throw Error(ErrorCode::InsufficientExtent, "response record does not cover the requested sample");
  return samples[xi - first_xi(window, grid)];
}

ResponseRecord apply_channel(const SpreadingField& eta, const DeltaTrain& train, ResponseWindow window,
                             std::uint64_t seed) {
  const GridSpec& g = eta.grid();
  if (train.window.length() != g.L) throw Error(ErrorCode::InvalidArgument, "apply_channel: window length must equal L");
  if (std::abs(train.a - g.a) > 1e-12 * g.a) throw Error(ErrorCode::InvalidArgument, "apply_channel: train spacing must equal a");
  window = resolve(window, g);
  const int L = g.L, M = g.M;
  const long long LM2 = static_cast<long long>(L) * M * M;

  // columns k0 of the box grid (per intra-box offset s) that carry energy
  std::vector<char> active(static_cast<std::size_t>(L) * M, 0);
  for (int k = 0; k < L; ++k)
    for (int n = 0; n < L; ++n)
      for (int s = 0; s < M; ++s)
        for (int r = 0; r < M; ++r)
          if (eta.at(k, n, s, r) != cplx(0.0)) active[k * M + s] = 1;

  ResponseRecord out{g, window, train, seed, CVector::Zero(window.sample_count(g))};
  const long long xi0 = first_xi(window, g);
  for (Eigen::Index i = 0; i < out.samples.size(); ++i) {
    const long long xi = xi0 + i;
    const long long j = floor_div(xi, M);
    const int s = static_cast<int>(xi - j * M);
    cplx acc = 0.0;
    for (int k0 = 0; k0 < L; ++k0) {
      if (!active[k0 * M + s]) continue;
      const long long kimp = j - k0;
      if (!train.covers(kimp))
        throw Error(ErrorCode::TrainTooShort, "apply_channel: impulse " + std::to_string(kimp) +
                                                  " is needed but not emitted by the train");
      cplx inner = 0.0;
      for (int n = 0; n < L; ++n)
        for (int r = 0; r < M; ++r) {
          const cplx v = eta.at(k0, n, s, r);
          if (v == cplx(0.0)) continue;
          inner += v * unit_phase((static_cast<long long>(n) * M + r) * xi, LM2);
        }
      acc += train.weight(kimp) * inner;
    }
    out.samples[i] = acc * (g.b / M);
  }
  return out;
}

ZakField zak(const ResponseRecord& f, int base_translate) {
  const GridSpec& g = f.grid;
  const int L = g.L, M = g.M;
  const long long LM = static_cast<long long>(L) * M;
  ZakField z{g, base_translate, CMatrix::Zero(LM, M)};
  for (long long i = 0; i < LM; ++i) {
    const long long xi = static_cast<long long>(base_translate) * LM + i;
    for (int m = 0; m < M; ++m) {
      const long long src = xi - static_cast<long long>(m) * M * L;
      if (!f.holds(src))
        throw Error(ErrorCode::InsufficientExtent, "zak: response does not cover M translates below the base");
      const cplx v = f.at(src);
      for (int r = 0; r < M; ++r) z.values(i, r) += v * unit_phase(static_cast<long long>(m) * r, M);
    }
  }
  return z;
}

DemixField demix(const ZakField& zf) {
  if (zf.base_translate != 0) throw Error(ErrorCode::InvalidArgument, "demix: Zak field must start at x = 0");
  const GridSpec& g = zf.grid;
  const int L = g.L, M = g.M;
  const long long LM2 = static_cast<long long>(L) * M * M;
  DemixField d{g, CMatrix::Zero(L, M * M)};
  for (int s = 0; s < M; ++s)
    for (int r = 0; r < M; ++r)
      for (int p = 0; p < L; ++p) {
        const long long xi = static_cast<long long>(p) * M + s;
        d.values(p, s * M + r) = zf.values(xi, r) * unit_phase(-static_cast<long long>(r) * xi, LM2) / g.b;
      }
  return d;
}

CMatrix demix_operator(const GridSpec& g, const ResponseWindow& w_in) {
  const ResponseWindow w = resolve(w_in, g);
  const int L = g.L, M = g.M;
  const long long LM2 = static_cast<long long>(L) * M * M;
  const long long xi0 = first_xi(w, g);
  CMatrix W = CMatrix::Zero(static_cast<Eigen::Index>(L) * M * M, w.sample_count(g));
  for (int s = 0; s < M; ++s)
    for (int r = 0; r < M; ++r)
      for (int p = 0; p < L; ++p) {
        const long long xi = static_cast<long long>(p) * M + s;
        const cplx pre = unit_phase(-static_cast<long long>(r) * xi, LM2) / g.b;
        const Eigen::Index row = (static_cast<Eigen::Index>(s) * M + r) * L + p;
        for (int m = 0; m < M; ++m) {
          const long long i = xi - static_cast<long long>(m) * M * L - xi0;
          if (i < 0 || i >= W.cols())
            throw Error(ErrorCode::InsufficientExtent, "demix_operator: window does not cover M translates below 0");
          W(row, i) += pre * unit_phase(static_cast<long long>(m) * r, M);
        }
      }
  return W;
}

SpreadingField reconstruct_eta_tensor(const ResponseRecord& f, std::span<const TorusIndex> gamma, const GaborFrame& G,
                                      double tolerance) {
  const GridSpec& g = f.grid;
  if (G.length() != g.L) throw Error(ErrorCode::InvalidArgument, "reconstruct_eta_tensor: frame length must equal L");
  if (gamma.empty() || static_cast<int>(gamma.size()) > g.L)
    throw Error(ErrorCode::InvalidArgument, "reconstruct_eta_tensor: need 1 <= |gamma| <= L");
  const CMatrix S = G.subframe(gamma);
  const RankResult rk = rank_and_left_inverse(S);
  if (!rk.left_inverse)
    throw Error(ErrorCode::SingularSubframe, "reconstruct_eta_tensor: G restricted to gamma is singular");
  const DemixField Z = demix(zak(f));
  const int M = g.M, L = g.L;
  SpreadingField eta(g);
  double worst = 0.0;
  for (int s = 0; s < M; ++s)
    for (int r = 0; r < M; ++r) {
      const CVector z = Z.node(s, r);
      const CVector x = *rk.left_inverse * z;
      const double zn = z.norm();
      if (zn > 0.0) worst = std::max(worst, (S * x - z).norm() / zn);
      for (std::size_t j = 0; j < gamma.size(); ++j) {
        const TorusIndex box = gamma[j];
        eta.at(box.k, box.n, s, r) =
            x[static_cast<Eigen::Index>(j)] * unit_phase(-static_cast<long long>(box.n) * s, L * M);
      }
    }
  if (tolerance >= 0.0 && worst > tolerance)
    throw Error(ErrorCode::SupportViolation, "reconstruct_eta_tensor: response energy outside the span of gamma "
                                             "(relative residual " + std::to_string(worst) + ")");
  return eta;
}

// ---------------------------------------------------------------------------

ResponseAutocorrelation ensemble_autocorrelation(std::span<const ResponseRecord> records) {
  if (records.empty()) throw Error(ErrorCode::InvalidArgument, "ensemble_autocorrelation: no records");
  const auto& first = records.front();
  CMatrix R = CMatrix::Zero(first.samples.size(), first.samples.size());
  for (const auto& rec : records) {
    if (!(rec.grid == first.grid) || !(rec.window == first.window) || rec.samples.size() != first.samples.size())
      throw Error(ErrorCode::MetadataMismatch, "ensemble_autocorrelation: records disagree on grid or window");
    R += rec.samples * rec.samples.adjoint();
  }
  R /= static_cast<double>(records.size());
  return {first.grid, first.window, std::move(R), records.size()};
}

namespace {

CMatrix factor_responses(const StochasticSpreadingModel& model, const DeltaTrain& train, const ResponseWindow& w) {
  const GridSpec& g = model.grid();
  CMatrix F(w.sample_count(g), static_cast<Eigen::Index>(model.factors().size()));
  for (std::size_t j = 0; j < model.factors().size(); ++j)
    F.col(static_cast<Eigen::Index>(j)) = apply_channel(model.factors()[j], train, w).samples;
  return F;
}

}  // namespace

ResponseAutocorrelation exact_autocorrelation(const StochasticSpreadingModel& model, const DeltaTrain& train,
                                              ResponseWindow window) {
  window = resolve(window, model.grid());
  const CMatrix F = factor_responses(model, train, window);
  return {model.grid(), window, F * F.adjoint(), 0};
}

ResponseAutocorrelation simulate_ensemble(const StochasticSpreadingModel& model, const DeltaTrain& train,
                                          std::uint64_t realizations, std::uint64_t seed, int jobs,
                                          ResponseWindow window) {
  if (realizations < 1) throw Error(ErrorCode::InvalidArgument, "simulate_ensemble: need at least one realization");
  window = resolve(window, model.grid());
  // responses are linear in eta, so each realization is F xi with the
  // coefficients sample_realization would draw for the same seed
  const CMatrix F = factor_responses(model, train, window);
  const Eigen::Index S = F.rows();
  const std::size_t J = model.factors().size();
  constexpr std::uint64_t kBatch = 256;
  const std::uint64_t batches = (realizations + kBatch - 1) / kBatch;
  const std::size_t workers = static_cast<std::size_t>(std::max(1, jobs));
  std::vector<CMatrix> partial(workers, CMatrix::Zero(S, S));
  parallel_for(workers, jobs, [&](std::size_t w) {
    CMatrix xi(static_cast<Eigen::Index>(J), static_cast<Eigen::Index>(kBatch));
    for (std::uint64_t b = w; b < batches; b += workers) {
      const std::uint64_t lo = b * kBatch, hi = std::min(realizations, lo + kBatch);
      const Eigen::Index cnt = static_cast<Eigen::Index>(hi - lo);
      for (std::uint64_t i = lo; i < hi; ++i)
        xi.col(static_cast<Eigen::Index>(i - lo)) = draw_coefficients(J, mix_seed(seed, i), SampleMode::Gaussian);
      const CMatrix f = F * xi.leftCols(cnt);
      partial[w].noalias() += f * f.adjoint();
    }
  });
  CMatrix R = CMatrix::Zero(S, S);
  for (const auto& p : partial) R += p;
  R /= static_cast<double>(realizations);
  return {model.grid(), window, std::move(R), realizations};
}

double AutocorrelationField::max_asymmetry() const {
  if (values.size() == 0) return 0.0;
  return (values - values.adjoint()).cwiseAbs().maxCoeff();
}

namespace {

struct Solver {
  RestrictedTensorFrame frame;
  CMatrix A;
  CMatrix Yfull;
};

Solver prepare(const ResponseAutocorrelation& Rf, const Pattern& p, const GaborFrame& G) {
  const GridSpec& g = Rf.grid;
  if (G.length() != g.L || p.L() != g.L) throw Error(ErrorCode::InvalidArgument, "reconstruct: L mismatch");
  RestrictedTensorFrame frame(G, p);
  RankResult rk = rank_and_left_inverse(frame);
  if (!rk.left_inverse)
    throw Error(ErrorCode::NotLeftInvertible, "reconstruct: pattern is rank deficient for this window (rank " +
                                                  std::to_string(rk.rank) + " < " + std::to_string(rk.columns) + ")");
  const CMatrix W = demix_operator(g, Rf.window);
  if (W.cols() != Rf.values.rows() || Rf.values.rows() != Rf.values.cols())
    throw Error(ErrorCode::MetadataMismatch, "reconstruct: autocorrelation does not match its response window");
  return {std::move(frame), std::move(*rk.left_inverse), W * Rf.values * W.adjoint()};
}

}  // namespace

RReconstruction reconstruct_R(const ResponseAutocorrelation& Rf, const Pattern& p, const GaborFrame& G,
                              double tolerance) {
  const Solver sv = prepare(Rf, p, G);
  const GridSpec& g = Rf.grid;
  const int L = g.L, M = g.M, nodes = M * M;
  const auto& cells = p.cells();
  RReconstruction out{{g, CMatrix::Zero(g.node_count(), g.node_count())}, 0.0, static_cast<int>(cells.size())};
  double resid2 = 0.0, y2 = 0.0;
  for (int a = 0; a < nodes; ++a)
    for (int b = 0; b < nodes; ++b) {
      const CMatrix Y = sv.Yfull.block(static_cast<Eigen::Index>(a) * L, static_cast<Eigen::Index>(b) * L, L, L);
      const CVector x = sv.A * vec(Y);
      const CMatrix X = sv.frame.expand(x);
      resid2 += (forward_mixing(X, G) - Y).squaredNorm();
      y2 += Y.squaredNorm();
      const int s = a / M, r = a % M, sp = b / M, rp = b % M;
      for (std::size_t j = 0; j < cells.size(); ++j) {
        const int lam = cells[j].row, lamp = cells[j].col;
        const long long ph = -static_cast<long long>(lam % L) * s + static_cast<long long>(lamp % L) * sp;
        out.R.values(g.node(lam, s, r), g.node(lamp, sp, rp)) = x[static_cast<Eigen::Index>(j)] * unit_phase(ph, L * M);
      }
    }
  out.relative_residual = y2 > 0.0 ? std::sqrt(resid2 / y2) : std::sqrt(resid2);
  if (tolerance >= 0.0 && out.relative_residual > tolerance)
    throw Error(ErrorCode::ResidualTooLarge, "reconstruct_R: second moments inconsistent with the pattern "
                                             "(relative residual " + std::to_string(out.relative_residual) + ")");
  return out;
}

SpreadingField reconstruct_scattering_wssus(const ResponseAutocorrelation& Rf, const Pattern& p, const GaborFrame& G,
                                            double tolerance) {
  const Solver sv = prepare(Rf, p, G);
  const GridSpec& g = Rf.grid;
  const int L = g.L, M = g.M;
  const auto& cells = p.cells();
  SpreadingField C(g);
  double resid2 = 0.0, y2 = 0.0;
  for (int a = 0; a < M * M; ++a) {
    const CMatrix Y = sv.Yfull.block(static_cast<Eigen::Index>(a) * L, static_cast<Eigen::Index>(a) * L, L, L);
    const CVector x = sv.A * vec(Y);
    resid2 += (forward_mixing(sv.frame.expand(x), G) - Y).squaredNorm();
    y2 += Y.squaredNorm();
    for (std::size_t j = 0; j < cells.size(); ++j)
      if (cells[j].row == cells[j].col)
        C.values()[g.node(cells[j].row, a / M, a % M)] = x[static_cast<Eigen::Index>(j)];
  }
  const double rel = y2 > 0.0 ? std::sqrt(resid2 / y2) : std::sqrt(resid2);
  if (tolerance >= 0.0 && rel > tolerance)
    throw Error(ErrorCode::ResidualTooLarge, "reconstruct_scattering_wssus: second moments inconsistent with the "
                                             "pattern (relative residual " + std::to_string(rel) + ")");
  return C;
}

}  // namespace sop
