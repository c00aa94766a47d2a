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

#include "sop/gabor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sop/random.hpp"

namespace sop {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NotLeftInvertible: return "NotLeftInvertible";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::SingularSubframe: return "SingularSubframe";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::CollisionModL: return "CollisionModL";
    case ErrorCode::AsymmetricMask: return "AsymmetricMask";
    case ErrorCode::TrainTooShort: return "TrainTooShort";
    case ErrorCode::InsufficientExtent: return "InsufficientExtent";
    case ErrorCode::MetadataMismatch: return "MetadataMismatch";
  }
  return "Unknown";
}

Window::Window(CVector entries, bool unimodular)
    : entries_(std::move(entries)), unimodular_(unimodular) {
  if (entries_.size() < 2) throw Error(ErrorCode::InvalidArgument, "window length must be >= 2");
  for (Eigen::Index p = 0; p < entries_.size(); ++p) {
    if (!std::isfinite(entries_[p].real()) || !std::isfinite(entries_[p].imag()))
      throw Error(ErrorCode::InvalidArgument, "window entries must be finite");
    if (unimodular_ && std::abs(std::abs(entries_[p]) - 1.0) > 1e-12)
      throw Error(ErrorCode::InvalidArgument, "window flagged unimodular has an entry with |c_p| != 1");
  }
}

CVector translate(const CVector& c, long long k) {
  const int L = static_cast<int>(c.size());
  CVector out(L);
  for (int p = 0; p < L; ++p) out[p] = c[mod(p - k, L)];
  return out;
}

CVector modulate(const CVector& c, long long n) {
  const int L = static_cast<int>(c.size());
  CVector out(L);
  const int nn = mod(n, L);
  for (int p = 0; p < L; ++p) out[p] = unit_phase(static_cast<long long>(nn) * p, L) * c[p];
  return out;
}

Window translate(const Window& c, long long k) { return Window(translate(c.entries(), k), c.unimodular()); }
Window modulate(const Window& c, long long n) { return Window(modulate(c.entries(), n), c.unimodular()); }

CVector dft(const CVector& c) {
  const int L = static_cast<int>(c.size());
  CVector out = CVector::Zero(L);
  for (int m = 0; m < L; ++m)
    for (int r = 0; r < L; ++r) out[m] += c[r] * unit_phase(-static_cast<long long>(m) * r, L);
  return out;
}

CVector inverse_dft(const CVector& c) {
  const int L = static_cast<int>(c.size());
  CVector out = CVector::Zero(L);
  for (int r = 0; r < L; ++r)
    for (int m = 0; m < L; ++m) out[r] += c[m] * unit_phase(static_cast<long long>(m) * r, L);
  return out / static_cast<double>(L);
}

bool commutation_check(long long k, long long n, const Window& c) {
  const int L = c.length();
  const CVector lhs = translate(modulate(c.entries(), n), k);
  const CVector rhs = unit_phase(-k * n, L) * modulate(translate(c.entries(), k), n);
  return (lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12;
}

GaborFrame::GaborFrame(Window window) : window_(std::move(window)) {
  const int L = window_.length();
  matrix_.resize(L, static_cast<Eigen::Index>(L) * L);
  index_order_.reserve(static_cast<std::size_t>(L) * L);
  for (int k = 0; k < L; ++k) {
    const CVector shifted = translate(window_.entries(), k);
    for (int n = 0; n < L; ++n) {
      matrix_.col(k * L + n) = modulate(shifted, n);
      index_order_.push_back({k, n});
    }
  }
}

CMatrix GaborFrame::subframe(std::span<const TorusIndex> gamma) const {
  CMatrix out(length(), static_cast<Eigen::Index>(gamma.size()));
  for (std::size_t j = 0; j < gamma.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = column(gamma[j]);
  return out;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

namespace {

struct SubsetDet {
  double abs_det;
  double normalized;
};

SubsetDet subset_det(const GaborFrame& g, const std::vector<int>& cols) {
  const int L = g.length();
  CMatrix sub(L, L);
  double scale = 1.0;
  for (int j = 0; j < L; ++j) {
    sub.col(j) = g.column(cols[j]);
    scale *= sub.col(j).norm();
  }
  const double d = std::abs(sub.partialPivLu().determinant());
  return {d, scale > 0 ? d / scale : 0.0};
}

void record(HaarReport& rep, const GaborFrame& g, const std::vector<int>& cols, bool first) {
  const SubsetDet sd = subset_det(g, cols);
  ++rep.subsets_tested;
  if (sd.normalized <= 1e-10) rep.all_independent = false;
  if (first || sd.normalized < rep.min_normalized_det) {
    rep.min_normalized_det = sd.normalized;
    rep.worst_subset.clear();
    for (int c : cols) rep.worst_subset.push_back(torus_index(c, g.length()));
  }
  if (first || sd.abs_det < rep.min_abs_det) rep.min_abs_det = sd.abs_det;
}

}  // namespace

HaarReport haar_check(const Window& c, HaarMode mode, int trials, std::uint64_t seed,
                      std::uint64_t budget) {
  const GaborFrame g(c);
  const int L = c.length();
  const int N = L * L;
  HaarReport rep;
  if (mode == HaarMode::Exhaustive) {
    if (binomial(N, L) > static_cast<double>(budget))
      throw Error(ErrorCode::BudgetExceeded, "exhaustive Haar check needs C(" + std::to_string(N) + "," +
                                                 std::to_string(L) + ") subsets, over budget");
    std::vector<int> cols(L);
    std::iota(cols.begin(), cols.end(), 0);
    bool first = true;
    while (true) {
      record(rep, g, cols, first);
      first = false;
      int i = L - 1;
      while (i >= 0 && cols[i] == N - L + i) --i;
      if (i < 0) break;
      ++cols[i];
      for (int j = i + 1; j < L; ++j) cols[j] = cols[j - 1] + 1;
    }
    return rep;
  }
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "sampled Haar check needs trials >= 1");
  Rng rng(seed);
  std::vector<int> all(N);
  std::iota(all.begin(), all.end(), 0);
  for (int t = 0; t < trials; ++t) {
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<int> cols(all.begin(), all.begin() + L);
    std::sort(cols.begin(), cols.end());
    record(rep, g, cols, t == 0);
  }
  return rep;
}

CMatrix stft_self(const Window& c) {
  const int L = c.length();
  CMatrix out = CMatrix::Zero(L, L);
  for (int p = 0; p < L; ++p)
    for (int q = 0; q < L; ++q)
      for (int r = 0; r < L; ++r)
        out(p, q) += unit_phase(-static_cast<long long>(p) * r, L) * c[r] * std::conj(c[r - q]);
  return out;
}

Window random_window(int L, bool unimodular, std::uint64_t seed) {
  if (L < 2) throw Error(ErrorCode::InvalidArgument, "window length must be >= 2");
  Rng rng(seed);
  CVector e(L);
  if (unimodular) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int p = 0; p < L; ++p) e[p] = std::polar(1.0, kTwoPi * u(rng));
  } else {
    for (int p = 0; p < L; ++p) e[p] = complex_normal(rng);
  }
  return Window(std::move(e), unimodular);
}

}  // namespace sop
