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

#include <cstdint>
#include <random>

#include "sop/types.hpp"

namespace sop {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent per-trial seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Standard complex normal: E|z|^2 = 1.
inline cplx complex_normal(Rng& rng) {
  std::normal_distribution<double> nd(0.0, 0.70710678118654752440);
  const double re = nd(rng);
  const double im = nd(rng);
  return {re, im};
}

inline CMatrix random_complex_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  CMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = complex_normal(rng);
  return m;
}

}  // namespace sop
