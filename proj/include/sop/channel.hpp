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

// Discretized stochastic channel: spreading-field samples on an aligned grid,
// sounding by an L-periodic weighted delta train, Zak demodulation and the
// reconstruction of eta, R_eta and the WSSUS scattering function.
//
// Grid: t = a (k + s / M), nu = b (n + r / M) with k, n in [0, L),
// s, r in [0, M) and a b = 1 / L. Responses are sampled at x = a xi / M.
// Node order is ((k L + n) M + s) M + r, i.e. box-major.

#include <cstdint>
#include <span>
#include <vector>

#include "sop/gabor.hpp"
#include "sop/patterns.hpp"
#include "sop/tensor_solver.hpp"

namespace sop {

struct GridSpec {
  int L = 2;
  double a = 1.0;
  double b = 0.5;
  int M = 4;

  GridSpec() = default;
  /// Throws unless a b L == 1 within 1e-12 and M >= 1.
  GridSpec(int L, double a, double b, int M);
  static GridSpec with_a(int L, double a = 1.0, int M = 4) { return GridSpec(L, a, 1.0 / (a * L), M); }

  int boxes() const { return L * L; }
  int node_count() const { return L * L * M * M; }
  int node(int k, int n, int s, int r) const { return (((k * L + n) * M + s) * M) + r; }
  int node(int box, int s, int r) const { return ((box * M + s) * M) + r; }
  double t(int k, int s) const { return a * (k + static_cast<double>(s) / M); }
  double nu(int n, int r) const { return b * (n + static_cast<double>(r) / M); }
  bool operator==(const GridSpec& o) const;
};

class SpreadingField {
 public:
  SpreadingField() = default;
  explicit SpreadingField(const GridSpec& grid);  // zero field
  SpreadingField(const GridSpec& grid, CVector values);

  const GridSpec& grid() const { return grid_; }
  const CVector& values() const { return values_; }
  CVector& values() { return values_; }
  cplx& at(int k, int n, int s, int r) { return values_[grid_.node(k, n, s, r)]; }
  cplx at(int k, int n, int s, int r) const { return values_[grid_.node(k, n, s, r)]; }

  /// eta_{k,n}(t, nu) = eta(t + a k, nu + b n) exp(2 pi i b n t) on the box grid.
  cplx patch(int box, int s, int r) const;
  /// Boxes holding a nonzero value, ascending flat index.
  std::vector<int> box_support() const;

 private:
  GridSpec grid_;
  CVector values_;
};

double relative_error(const CVector& estimate, const CVector& truth);
double relative_error(const CMatrix& estimate, const CMatrix& truth);

/// eta = sum_j xi_j Phi_j, xi_j i.i.d. standard complex normal.
class StochasticSpreadingModel {
 public:
  /// Throws SupportViolation when the box-level support of the
  /// autocorrelation is not contained in `pattern`.
  StochasticSpreadingModel(const GridSpec& grid, std::vector<SpreadingField> factors, Pattern pattern);

  const GridSpec& grid() const { return grid_; }
  const std::vector<SpreadingField>& factors() const { return factors_; }
  const Pattern& pattern() const { return pattern_; }

  /// R_eta(u, u') = E eta(u) conj(eta(u')) over all node pairs.
  CMatrix autocorrelation() const;
  /// Box pairs (l, l') whose block of R_eta is nonzero.
  Pattern box_support() const;

 private:
  GridSpec grid_;
  std::vector<SpreadingField> factors_;
  Pattern pattern_;
};

enum class SampleMode { Gaussian, Unit };

SpreadingField sample_realization(const StochasticSpreadingModel& model, std::uint64_t seed,
                                  SampleMode mode = SampleMode::Gaussian);

/// Random factors on every maximal clique of the pattern's correlation graph
/// (isolated diagonal cells are one-vertex cliques), so R_eta has box
/// support exactly `pattern` for generic draws.
StochasticSpreadingModel random_clique_model(const GridSpec& grid, const Pattern& pattern, int factors_per_clique,
                                             std::uint64_t seed);
/// Uncorrelated scattering: one factor sqrt(C(u)) e_u per node with C(u) > 0.
/// C is taken from the real part of `scattering`, which must be >= 0.
StochasticSpreadingModel wssus_model(const GridSpec& grid, const SpreadingField& scattering);
/// Positive random scattering density on the listed boxes.
SpreadingField random_scattering(const GridSpec& grid, const std::vector<int>& boxes, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Sounding

/// Translates of length aL held by a response record: the record covers
/// x in [first * aL, (first + count) * aL). A zero count selects standard(M).
struct ResponseWindow {
  int first_translate = 0;
  int translates = 0;
  static ResponseWindow standard(int M) { return {1 - M, M}; }
  int sample_count(const GridSpec& g) const { return translates * g.L * g.M; }
  bool operator==(const ResponseWindow&) const = default;
};

struct DeltaTrain {
  Window window;
  double a = 1.0;
  long long k_begin = 0;  // impulses at a k for k in [k_begin, k_end)
  long long k_end = 0;

  cplx weight(long long k) const { return window[static_cast<int>(k % window.length())]; }
  bool covers(long long k) const { return k >= k_begin && k < k_end; }
  /// k in [-M L, L), sufficient for the standard response window.
  static DeltaTrain standard(const Window& c, const GridSpec& g);
  /// Smallest range that covers every impulse visible in `w`.
  static DeltaTrain covering(const Window& c, const GridSpec& g, const ResponseWindow& w);
};

struct ResponseRecord {
  GridSpec grid;
  ResponseWindow window;
  DeltaTrain train;
  std::uint64_t seed = 0;
  CVector samples;

  /// Sample at x = a xi / M.
  cplx at(long long xi) const;
  bool holds(long long xi) const;
};

/// f(x) = sum_k c_{k mod L} sum_nu eta(x - a k, nu) exp(2 pi i nu x) b / M.
/// Throws TrainTooShort when an impulse the window needs is missing.
ResponseRecord apply_channel(const SpreadingField& eta, const DeltaTrain& train,
                             ResponseWindow window = {}, std::uint64_t seed = 0);

/// Zak f(x, nu) = sum_{m=0}^{M-1} f(x - a m L) exp(2 pi i a L m nu) on
/// x = a xi / M in [q aL, (q + 1) aL) and nu = b r / M, r in [0, M).
struct ZakField {
  GridSpec grid;
  int base_translate = 0;
  CMatrix values;  // (L M) x M, row = xi - q L M, column = r
};

ZakField zak(const ResponseRecord& f, int base_translate = 0);

/// Z(s, r) in C^L on the box grid; column s M + r.
struct DemixField {
  GridSpec grid;
  CMatrix values;  // L x M^2
  CVector node(int s, int r) const { return values.col(s * grid.M + r); }
};

/// Z_p(t, nu) = b^{-1} exp(-2 pi i nu (t + a p)) Zak(t + a p, nu).
DemixField demix(const ZakField& zf);

/// Linear map from record samples to (Z(s, r))_p, row (s M + r) L + p.
CMatrix demix_operator(const GridSpec& g, const ResponseWindow& w);

/// Per node eta_gamma = (G|_gamma)^{-1} Z. Throws SupportViolation when the
/// residual outside span G|_gamma exceeds `tolerance` relative.
SpreadingField reconstruct_eta_tensor(const ResponseRecord& f, std::span<const TorusIndex> gamma,
                                      const GaborFrame& G, double tolerance = 1e-8);

// ---------------------------------------------------------------------------
// Second moments

struct ResponseAutocorrelation {
  GridSpec grid;
  ResponseWindow window;
  CMatrix values;  // samples x samples, E f(x) conj(f(x'))
  std::uint64_t realizations = 0;  // 0 for the analytic path
};

/// Mean of f conj(f)^T over the records (at least one).
ResponseAutocorrelation ensemble_autocorrelation(std::span<const ResponseRecord> records);
/// sum_j (H Phi_j)(H Phi_j)^H.
ResponseAutocorrelation exact_autocorrelation(const StochasticSpreadingModel& model, const DeltaTrain& train,
                                              ResponseWindow window = {});
/// N Gaussian realizations sounded and averaged, seeds mix_seed(seed, i).
ResponseAutocorrelation simulate_ensemble(const StochasticSpreadingModel& model, const DeltaTrain& train,
                                          std::uint64_t realizations, std::uint64_t seed, int jobs = 1,
                                          ResponseWindow window = {});

struct AutocorrelationField {
  GridSpec grid;
  CMatrix values;  // node x node
  double max_asymmetry() const;
};

struct RReconstruction {
  AutocorrelationField R;
  double relative_residual = 0.0;
  int rank = 0;
};

/// R_eta on every node pair from Y = W R_f W^H block by block.
/// Throws NotLeftInvertible; ResidualTooLarge when `tolerance` >= 0 and
/// the relative residual exceeds it.
RReconstruction reconstruct_R(const ResponseAutocorrelation& Rf, const Pattern& p, const GaborFrame& G,
                              double tolerance = -1.0);

/// Diagonal slice C(u) = R_eta(u, u) under a diagonal-type pattern.
SpreadingField reconstruct_scattering_wssus(const ResponseAutocorrelation& Rf, const Pattern& p,
                                            const GaborFrame& G, double tolerance = -1.0);

}  // namespace sop
