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

// Finite time-frequency shifts on C^L and the Gabor frame they generate.
//
//   (T^k c)[p] = c[p - k]          (M^n c)[p] = exp(2 pi i n p / L) c[p]
//
// Frame columns are M^n T^k c ordered by (k, n) with n running fastest.

#include <cstdint>
#include <span>
#include <vector>

#include "sop/types.hpp"

namespace sop {

class Window {
 public:
  /// Throws InvalidArgument on L < 2, non-finite entries, or a false
  /// `unimodular` flag (|c_p| != 1 beyond 1e-12).
  explicit Window(CVector entries, bool unimodular = false);

  int length() const { return static_cast<int>(entries_.size()); }
  const CVector& entries() const { return entries_; }
  cplx operator[](int p) const { return entries_[mod(p, length())]; }
  bool unimodular() const { return unimodular_; }
  double norm() const { return entries_.norm(); }

 private:
  CVector entries_;
  bool unimodular_;
};

CVector translate(const CVector& c, long long k);
CVector modulate(const CVector& c, long long n);
Window translate(const Window& c, long long k);
Window modulate(const Window& c, long long n);

/// Unnormalized DFT, (F c)[m] = sum_r c[r] exp(-2 pi i m r / L).
CVector dft(const CVector& c);
CVector inverse_dft(const CVector& c);

/// T^k M^n c == exp(-2 pi i k n / L) M^n T^k c entrywise within 1e-12.
bool commutation_check(long long k, long long n, const Window& c);

class GaborFrame {
 public:
  explicit GaborFrame(Window window);

  int length() const { return window_.length(); }
  const Window& window() const { return window_; }
  const CMatrix& matrix() const { return matrix_; }
  const std::vector<TorusIndex>& index_order() const { return index_order_; }

  auto column(TorusIndex t) const { return matrix_.col(flat_index(t, length())); }
  auto column(int flat) const { return matrix_.col(flat); }

  /// Columns of the frame selected by `gamma` (in the given order).
  CMatrix subframe(std::span<const TorusIndex> gamma) const;

 private:
  Window window_;
  CMatrix matrix_;
  std::vector<TorusIndex> index_order_;
};

inline GaborFrame build_frame(const Window& c) { return GaborFrame(c); }

enum class HaarMode { Exhaustive, Sampled };

struct HaarReport {
  bool all_independent = true;
  double min_abs_det = 0.0;
  // min |det| / (product of column norms) over the tested subsets.
  double min_normalized_det = 0.0;
  std::uint64_t subsets_tested = 0;
  std::vector<TorusIndex> worst_subset;
};

inline constexpr std::uint64_t kDefaultHaarBudget = 100000;

/// Tests invertibility of L x L column submatrices. Exhaustive mode visits
/// all C(L^2, L) subsets and throws BudgetExceeded when that exceeds
/// `budget`; sampled mode draws `trials` random subsets from `seed`.
HaarReport haar_check(const Window& c, HaarMode mode, int trials = 0,
                      std::uint64_t seed = 0, std::uint64_t budget = kDefaultHaarBudget);

/// V_c c[p, q] = <c, M^p T^q c> = sum_r exp(-2 pi i p r / L) c[r] conj(c[r - q]).
CMatrix stft_self(const Window& c);

/// i.i.d. entries: standard complex normal, or exp(2 pi i u) with u ~ U[0,1).
Window random_window(int L, bool unimodular, std::uint64_t seed);

double binomial(int n, int k);

}  // namespace sop
