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

// Vectorization, Kronecker products and the restricted tensored frame.
//
// vec stacks columns, so vec(A X B^T) = (B (x) A) vec(X) and
// vec(G X G^H) = (conj(G) (x) G) vec(X). Restricting the columns of
// conj(G) (x) G to the cells of a pattern gives the linear map from the
// free entries of X to vec(Y).

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sop/gabor.hpp"
#include "sop/patterns.hpp"

namespace sop {

CVector vec(const CMatrix& m);
CMatrix unvec(const CVector& v, int n);
CMatrix kron(const CMatrix& a, const CMatrix& b);

struct KronSelfTest {
  int triples = 0;
  double max_error = 0.0;       // max relative error of vec(A X B^T) vs (B (x) A) vec X
  double max_error_vec_gxg = 0.0;  // vec(G X G^H) vs (conj G (x) G) vec X
  double literal_order_error = 0.0;  // (A (x) B) vec X, expected to be O(1)
  bool passed = false;
};

/// Random n x n triples checked at `tolerance`.
KronSelfTest kron_vec_self_test(int triples, std::uint64_t seed, int n = 3, double tolerance = 1e-12);

class RestrictedTensorFrame {
 public:
  RestrictedTensorFrame(const GaborFrame& frame, Pattern pattern);

  const GaborFrame& frame() const { return frame_; }
  const Pattern& pattern() const { return pattern_; }
  /// L^2 x |pattern|; column j multiplies X[column_map()[j]].
  const CMatrix& matrix() const { return matrix_; }
  const std::vector<Cell>& column_map() const { return pattern_.cells(); }

  /// Entries of X on the pattern, in column order.
  CVector restrict(const CMatrix& X) const;
  /// Places v onto an L^2 x L^2 zero matrix.
  CMatrix expand(const CVector& v) const;

 private:
  GaborFrame frame_;
  Pattern pattern_;
  CMatrix matrix_;
};

inline RestrictedTensorFrame restricted_tensor_frame(const GaborFrame& g, const Pattern& p) {
  return RestrictedTensorFrame(g, p);
}

struct RankResult {
  int rank = 0;
  int columns = 0;
  std::vector<double> singular_values;  // descending
  std::optional<CMatrix> left_inverse;  // |pattern| x L^2
  /// sigma_min / sigma_max over the first `columns` singular values (0 if wide).
  double inverse_condition = 0.0;
};

inline constexpr double kRankThreshold = 1e-10;

RankResult rank_and_left_inverse(const RestrictedTensorFrame& r, bool want_inverse = true);
RankResult rank_and_left_inverse(const CMatrix& m, bool want_inverse = true);

// ---------------------------------------------------------------------------
// Classification

enum class Verdict { Permissible, DefectiveProved, DefectiveEmpirical, Inconclusive };
const char* verdict_name(Verdict v);

struct Classification {
  Verdict verdict = Verdict::Inconclusive;
  int columns = 0;
  int full_rank = 0;  // min(|pattern|, L^2)
  int trials = 0;
  int max_rank = 0;
  std::map<int, int> rank_histogram;
  double best_inverse_condition = 0.0;
  bool spd = true;
  bool counting_certificate = false;  // |pattern| > L^2
  std::optional<TallWitness> tall;
  std::optional<TwoSquaresWitness> two_squares;
  bool proved() const { return counting_certificate || tall || two_squares; }
};

struct ClassifyOptions {
  int jobs = 1;
  bool unimodular = false;
  /// Full rank reached only with sigma_min/sigma_max below this is inconclusive.
  double marginal_condition = 1e-8;
};

/// Structural detectors first, then `trials` random windows.
Classification classify_pattern(const Pattern& p, int trials, std::uint64_t seed, const ClassifyOptions& opt = {});

// ---------------------------------------------------------------------------
// Covariance matrices and Y = G X G^H

class CovarianceMatrix {
 public:
  /// Validates Hermitian (1e-12), PSD (-1e-10 relative) and support.
  CovarianceMatrix(Pattern support, CMatrix entries);

  int L() const { return support_.L(); }
  const Pattern& support() const { return support_; }
  const CMatrix& entries() const { return entries_; }

 private:
  Pattern support_;
  CMatrix entries_;
};

/// Smallest and largest eigenvalue of a Hermitian matrix.
std::pair<double, double> eigenvalue_range(const CMatrix& h);

CMatrix forward_mixing(const CovarianceMatrix& X, const GaborFrame& G);
CMatrix forward_mixing(const CMatrix& X, const GaborFrame& G);

struct CovarianceRecovery {
  Pattern support;
  CMatrix entries;  // Hermitian, supported on `support`, not projected to PSD
  double relative_residual = 0.0;  // ||G X G^H - Y|| / ||Y||
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  int rank = 0;
};

/// X = unvec_P(A vec Y). Throws NotLeftInvertible when the restricted frame
/// is rank deficient and ResidualTooLarge when the relative residual exceeds
/// `tolerance` (a negative tolerance disables the check).
CovarianceRecovery recover_covariance(const CMatrix& Y, const Pattern& p, const GaborFrame& G,
                                      double tolerance = 1e-8);
/// Same, reusing a precomputed left inverse of restricted_tensor_frame(G, p).
CovarianceRecovery recover_covariance(const CMatrix& Y, const RestrictedTensorFrame& r, const CMatrix& left_inverse,
                                      double tolerance = 1e-8);

/// (G|_gamma)^{-1} Z; throws SingularSubframe.
CVector deterministic_solve(const CVector& Z, std::span<const TorusIndex> gamma, const GaborFrame& G);

/// (H1, H2) with A = H1 + i H2, both Hermitian.
std::pair<CMatrix, CMatrix> cartesian_split(const CMatrix& A);

}  // namespace sop
