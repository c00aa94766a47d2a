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

#include <map>

#include "sop/patterns.hpp"

namespace sop {

SupportMask::SupportMask(int L, int M, double a, int box_extent_t, int box_extent_nu)
    : L_(L), M_(M), a_(a), et_(box_extent_t > 0 ? box_extent_t : L), en_(box_extent_nu > 0 ? box_extent_nu : L) {
  if (L < 2 || M < 1 || !(a > 0.0) || box_extent_t < 0 || box_extent_nu < 0)
    throw Error(ErrorCode::InvalidArgument, "support mask: bad grid parameters");
  const std::size_t ct = static_cast<std::size_t>(et_) * M_, cn = static_cast<std::size_t>(en_) * M_;
  data_.assign(ct * cn * ct * cn, 0);
}

std::size_t SupportMask::offset(int it, int inu, int jt, int jnu) const {
  const int ct = cells_t(), cn = cells_nu();
  if (it < 0 || it >= ct || jt < 0 || jt >= ct || inu < 0 || inu >= cn || jnu < 0 || jnu >= cn)
    throw Error(ErrorCode::InvalidArgument, "support mask index out of range");
  return ((static_cast<std::size_t>(it) * cn + inu) * ct + jt) * cn + jnu;
}

bool SupportMask::symmetric() const {
  const int ct = cells_t(), cn = cells_nu();
  for (int it = 0; it < ct; ++it)
    for (int inu = 0; inu < cn; ++inu)
      for (int jt = 0; jt < ct; ++jt)
        for (int jnu = 0; jnu < cn; ++jnu)
          if (get(it, inu, jt, jnu) != get(jt, jnu, it, inu)) return false;
  return true;
}

void mark_box(SupportMask& m, int k, int n, int kp, int np) {
  const int M = m.M();
  for (int s = 0; s < M; ++s)
    for (int r = 0; r < M; ++r)
      for (int sp = 0; sp < M; ++sp)
        for (int rp = 0; rp < M; ++rp) m.set(k * M + s, n * M + r, kp * M + sp, np * M + rp);
}

Pattern rectify_support(const SupportMask& mask) {
  if (!mask.symmetric()) throw Error(ErrorCode::AsymmetricMask, "support mask is not symmetric");
  const int L = mask.L(), M = mask.M();
  const int ct = mask.cells_t(), cn = mask.cells_nu();
  std::map<TorusIndex, TorusIndex> residue;  // (k mod L, n mod L) -> box
  auto reduce = [&](TorusIndex box) {
    const TorusIndex r{mod(box.k, L), mod(box.n, L)};
    auto [it, inserted] = residue.emplace(r, box);
    if (!inserted && it->second != box)
      throw Error(ErrorCode::CollisionModL, "two boxes of the support cover are congruent mod L");
    return flat_index(r, L);
  };
  std::vector<Cell> cells;
  for (int it = 0; it < ct; ++it)
    for (int inu = 0; inu < cn; ++inu)
      for (int jt = 0; jt < ct; ++jt)
        for (int jnu = 0; jnu < cn; ++jnu) {
          if (!mask.get(it, inu, jt, jnu)) continue;
          const int r = reduce({it / M, inu / M});
          const int c = reduce({jt / M, jnu / M});
          cells.push_back({r, c});
        }
  return Pattern(L, std::move(cells));
}

}  // namespace sop
