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

#include "sop/tensor_solver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "sop/parallel.hpp"
#include "sop/random.hpp"

namespace sop {

CVector vec(const CMatrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::InvalidArgument, "vec: matrix must be square");
  return Eigen::Map<const CVector>(m.data(), m.size());
}

CMatrix unvec(const CVector& v, int n) {
  if (n < 0 || v.size() != static_cast<Eigen::Index>(n) * n)
    throw Error(ErrorCode::InvalidArgument, "unvec: length is not n^2");
  return Eigen::Map<const CMatrix>(v.data(), n, n);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

KronSelfTest kron_vec_self_test(int triples, std::uint64_t seed, int n, double tolerance) {
  KronSelfTest t;
  t.triples = triples;
  Rng rng(seed);
  for (int i = 0; i < triples; ++i) {
    const CMatrix A = random_complex_matrix(n, n, rng);
    const CMatrix X = random_complex_matrix(n, n, rng);
    const CMatrix B = random_complex_matrix(n, n, rng);
    const CVector lhs = vec((A * X * B.transpose()).eval());
    const CVector vx = vec(X);
    const double scale = lhs.norm();
    t.max_error = std::max(t.max_error, (lhs - kron(B, A) * vx).norm() / scale);
    t.literal_order_error = std::max(t.literal_order_error, (lhs - kron(A, B) * vx).norm() / scale);
    const CVector gxg = vec((A * X * A.adjoint()).eval());
    t.max_error_vec_gxg =
        std::max(t.max_error_vec_gxg, (gxg - kron(A.conjugate(), A) * vx).norm() / gxg.norm());
  }
  t.passed = triples > 0 && t.max_error <= tolerance && t.max_error_vec_gxg <= tolerance;
  return t;
}

// ---------------------------------------------------------------------------

RestrictedTensorFrame::RestrictedTensorFrame(const GaborFrame& frame, Pattern pattern)
    : frame_(frame), pattern_(std::move(pattern)) {
  const int L = frame_.length();
  if (pattern_.L() != L) throw Error(ErrorCode::InvalidArgument, "pattern and frame disagree on L");
  const CMatrix& G = frame_.matrix();
  matrix_.resize(static_cast<Eigen::Index>(L) * L, static_cast<Eigen::Index>(pattern_.size()));
  for (std::size_t j = 0; j < pattern_.size(); ++j) {
    const Cell& c = pattern_.cells()[j];
    auto col = matrix_.col(static_cast<Eigen::Index>(j));
    for (int pp = 0; pp < L; ++pp) {
      const cplx right = std::conj(G(pp, c.col));
      for (int p = 0; p < L; ++p) col[p + L * pp] = G(p, c.row) * right;
    }
  }
}

CVector RestrictedTensorFrame::restrict(const CMatrix& X) const {
  const int N = frame_.length() * frame_.length();
  if (X.rows() != N || X.cols() != N) throw Error(ErrorCode::InvalidArgument, "restrict: X must be L^2 x L^2");
  CVector v(static_cast<Eigen::Index>(pattern_.size()));
  for (std::size_t j = 0; j < pattern_.size(); ++j) v[j] = X(pattern_.cells()[j].row, pattern_.cells()[j].col);
  return v;
}

CMatrix RestrictedTensorFrame::expand(const CVector& v) const {
  if (v.size() != static_cast<Eigen::Index>(pattern_.size()))
    throw Error(ErrorCode::InvalidArgument, "expand: wrong vector length");
  const int N = frame_.length() * frame_.length();
  CMatrix X = CMatrix::Zero(N, N);
  for (std::size_t j = 0; j < pattern_.size(); ++j) X(pattern_.cells()[j].row, pattern_.cells()[j].col) = v[j];
  return X;
}

RankResult rank_and_left_inverse(const CMatrix& m, bool want_inverse) {
  RankResult r;
  r.columns = static_cast<int>(m.cols());
  if (m.cols() == 0) {
    r.left_inverse = CMatrix(0, m.rows());
    r.inverse_condition = 1.0;
    return r;
  }
  const unsigned opts = want_inverse ? (Eigen::ComputeThinU | Eigen::ComputeThinV) : 0u;
  Eigen::BDCSVD<CMatrix> svd(m, opts);
  const auto& s = svd.singularValues();
  r.singular_values.assign(s.data(), s.data() + s.size());
  const double smax = s.size() ? s[0] : 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (smax > 0.0 && s[i] > kRankThreshold * smax) ++r.rank;
  if (m.cols() <= m.rows() && smax > 0.0) r.inverse_condition = s[s.size() - 1] / smax;
  if (want_inverse && r.rank == r.columns) {
    const Eigen::VectorXd inv = s.cwiseInverse();
    CMatrix A = svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
    const double err = (A * m - CMatrix::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
    if (err <= 1e-9) r.left_inverse = std::move(A);
  }
  return r;
}

RankResult rank_and_left_inverse(const RestrictedTensorFrame& r, bool want_inverse) {
  return rank_and_left_inverse(r.matrix(), want_inverse);
}

// ---------------------------------------------------------------------------

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Permissible: return "permissible";
    case Verdict::DefectiveProved: return "defective-proved";
    case Verdict::DefectiveEmpirical: return "defective-empirical";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

Classification classify_pattern(const Pattern& p, int trials, std::uint64_t seed, const ClassifyOptions& opt) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "classify_pattern: trials must be >= 1");
  const int L = p.L();
  Classification c;
  c.columns = static_cast<int>(p.size());
  c.full_rank = std::min(c.columns, L * L);
  c.trials = trials;
  c.spd = validate_spd(p);
  c.counting_certificate = c.columns > L * L;
  if (c.spd) {
    c.tall = detect_tall(p);
    c.two_squares = detect_two_squares(p, L);
  }

  std::vector<int> ranks(trials);
  std::vector<double> conds(trials);
  parallel_for(static_cast<std::size_t>(trials), opt.jobs, [&](std::size_t i) {
    const Window w = random_window(L, opt.unimodular, mix_seed(seed, i));
    const RankResult r = rank_and_left_inverse(RestrictedTensorFrame(GaborFrame(w), p), false);
    ranks[i] = r.rank;
    conds[i] = r.inverse_condition;
  });
  bool full = false;
  for (int i = 0; i < trials; ++i) {
    ++c.rank_histogram[ranks[i]];
    c.max_rank = std::max(c.max_rank, ranks[i]);
    if (ranks[i] == c.columns) {
      full = true;
      c.best_inverse_condition = std::max(c.best_inverse_condition, conds[i]);
    }
  }
  if (c.proved())
    c.verdict = Verdict::DefectiveProved;
  else if (full)
    c.verdict = c.best_inverse_condition >= opt.marginal_condition ? Verdict::Permissible : Verdict::Inconclusive;
  else
    c.verdict = Verdict::DefectiveEmpirical;
  return c;
}

// ---------------------------------------------------------------------------

std::pair<double, double> eigenvalue_range(const CMatrix& h) {
  if (h.size() == 0) return {0.0, 0.0};
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

CovarianceMatrix::CovarianceMatrix(Pattern support, CMatrix entries)
    : support_(std::move(support)), entries_(std::move(entries)) {
  const int N = support_.L() * support_.L();
  if (entries_.rows() != N || entries_.cols() != N)
    throw Error(ErrorCode::InvalidArgument, "covariance matrix must be L^2 x L^2");
  const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
  if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw Error(ErrorCode::InvalidArgument, "covariance matrix is not Hermitian");
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (std::abs(entries_(i, j)) > 1e-12 * scale && !support_.contains({i, j}))
        throw Error(ErrorCode::SupportViolation, "covariance matrix has an entry outside its support");
  const auto [lo, hi] = eigenvalue_range(entries_);
  if (lo < -1e-10 * std::max(hi, 0.0) && lo < -1e-300)
    throw Error(ErrorCode::InvalidArgument, "covariance matrix is not positive semidefinite");
}

CMatrix forward_mixing(const CMatrix& X, const GaborFrame& G) {
  const int N = G.length() * G.length();
  if (X.rows() != N || X.cols() != N) throw Error(ErrorCode::InvalidArgument, "forward_mixing: X must be L^2 x L^2");
  return G.matrix() * X * G.matrix().adjoint();
}

CMatrix forward_mixing(const CovarianceMatrix& X, const GaborFrame& G) {
  if (X.L() != G.length()) throw Error(ErrorCode::InvalidArgument, "forward_mixing: L mismatch");
  return forward_mixing(X.entries(), G);
}

namespace {

bool transpose_closed(const Pattern& p) {
  for (const Cell& c : p.cells())
    if (!p.contains({c.col, c.row})) return false;
  return true;
}

}  // namespace

CovarianceRecovery recover_covariance(const CMatrix& Y, const RestrictedTensorFrame& r, const CMatrix& left_inverse,
                                      double tolerance) {
  const int L = r.frame().length();
  if (Y.rows() != L || Y.cols() != L) throw Error(ErrorCode::InvalidArgument, "recover_covariance: Y must be L x L");
  if (left_inverse.rows() != r.matrix().cols() || left_inverse.cols() != r.matrix().rows())
    throw Error(ErrorCode::InvalidArgument, "recover_covariance: left inverse has the wrong shape");
  CovarianceRecovery out;
  out.support = r.pattern();
  out.rank = static_cast<int>(r.matrix().cols());
  CMatrix X = r.expand(left_inverse * vec(Y));
  if (transpose_closed(r.pattern())) X = ((X + X.adjoint()) * 0.5).eval();
  const CMatrix resid = forward_mixing(X, r.frame()) - Y;
  const double ynorm = Y.norm();
  out.relative_residual = ynorm > 0.0 ? resid.norm() / ynorm : resid.norm();
  const auto [lo, hi] = eigenvalue_range(X);
  out.min_eigenvalue = lo;
  out.max_eigenvalue = hi;
  out.entries = std::move(X);
  if (tolerance >= 0.0 && out.relative_residual > tolerance)
    throw Error(ErrorCode::ResidualTooLarge,
                "recover_covariance: Y is inconsistent with the pattern (relative residual " +
                    std::to_string(out.relative_residual) + ")");
  return out;
}

CovarianceRecovery recover_covariance(const CMatrix& Y, const Pattern& p, const GaborFrame& G, double tolerance) {
  const RestrictedTensorFrame r(G, p);
  const RankResult rk = rank_and_left_inverse(r);
  if (!rk.left_inverse)
    throw Error(ErrorCode::NotLeftInvertible, "recover_covariance: restricted frame has rank " +
                                                  std::to_string(rk.rank) + " < " + std::to_string(rk.columns));
  return recover_covariance(Y, r, *rk.left_inverse, tolerance);
}

CVector deterministic_solve(const CVector& Z, std::span<const TorusIndex> gamma, const GaborFrame& G) {
  const int L = G.length();
  if (Z.size() != L) throw Error(ErrorCode::InvalidArgument, "deterministic_solve: Z must have length L");
  if (gamma.empty() || static_cast<int>(gamma.size()) > L)
    throw Error(ErrorCode::InvalidArgument, "deterministic_solve: need 1 <= |gamma| <= L");
  const CMatrix S = G.subframe(gamma);
  const RankResult r = rank_and_left_inverse(S);
  if (!r.left_inverse) throw Error(ErrorCode::SingularSubframe, "deterministic_solve: G restricted to gamma is singular");
  if (S.cols() == S.rows()) return Eigen::PartialPivLU<CMatrix>(S).solve(Z);
  return *r.left_inverse * Z;
}

std::pair<CMatrix, CMatrix> cartesian_split(const CMatrix& A) {
  if (A.rows() != A.cols()) throw Error(ErrorCode::InvalidArgument, "cartesian_split: matrix must be square");
  const CMatrix h1 = (A + A.adjoint()) * 0.5;
  const CMatrix h2 = (A - A.adjoint()) * cplx(0.0, -0.5);
  return {h1, h2};
}

}  // namespace sop
