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

#include <complex>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sop {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// exp(2 pi i num / den) with the numerator reduced first, so large integer
// phases do not lose precision.
inline cplx unit_phase(long long num, long long den) {
  long long r = num % den;
  if (r < 0) r += den;
  const double th = kTwoPi * static_cast<double>(r) / static_cast<double>(den);
  return {std::cos(th), std::sin(th)};
}

inline int mod(long long v, int m) {
  long long r = v % m;
  return static_cast<int>(r < 0 ? r + m : r);
}

/// Point (k, n) of the torus Z_L x Z_L: k is the time shift, n the modulation.
struct TorusIndex {
  int k = 0;
  int n = 0;
  auto operator<=>(const TorusIndex&) const = default;
};

/// Flat position of (k, n) in the canonical order I (n fastest).
inline int flat_index(TorusIndex t, int L) { return t.k * L + t.n; }
inline TorusIndex torus_index(int flat, int L) { return {flat / L, flat % L}; }

enum class ErrorCode {
  InvalidArgument,
  Parse,
  Io,
  BudgetExceeded,
  NotLeftInvertible,
  ResidualTooLarge,
  SingularSubframe,
  SupportViolation,
  CollisionModL,
  AsymmetricMask,
  TrainTooShort,
  InsufficientExtent,
  MetadataMismatch,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sop
