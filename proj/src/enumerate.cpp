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

#include <algorithm>
#include <cmath>

#include "sop/patterns.hpp"

namespace sop {

double count_spd_patterns(int L, int cells) {
  if (L < 2 || cells < 0) throw Error(ErrorCode::InvalidArgument, "count_spd_patterns: bad arguments");
  const int N = L * L;
  double total = 0.0;
  for (int d = 0; d <= std::min(N, cells); ++d) {
    if ((cells - d) % 2 != 0) continue;
    const int e = (cells - d) / 2;
    const int pairs = d * (d - 1) / 2;
    if (e > pairs) continue;
    total += binomial(N, d) * binomial(pairs, e);
  }
  return total;
}

EnumerationSummary enumerate_spd(int L, int cell_budget, const std::function<void(const Pattern&)>& sink,
                                 int min_cells, double max_patterns) {
  if (L < 2) throw Error(ErrorCode::InvalidArgument, "enumerate_spd: L must be >= 2");
  if (L > 3) throw Error(ErrorCode::BudgetExceeded, "enumerate_spd: exhaustive enumeration is limited to L <= 3");
  if (cell_budget < 0) throw Error(ErrorCode::InvalidArgument, "enumerate_spd: negative cell budget");
  min_cells = std::max(min_cells, 0);
  double expected = 0.0;
  for (int s = min_cells; s <= cell_budget; ++s) expected += count_spd_patterns(L, s);
  if (expected > max_patterns) throw Error(ErrorCode::BudgetExceeded, "enumerate_spd: too many patterns requested");

  const int N = L * L;
  std::vector<Pattern> out;
  out.reserve(static_cast<std::size_t>(expected));
  for (unsigned mask = 0; mask < (1u << N); ++mask) {
    std::vector<int> diag;
    for (int i = 0; i < N; ++i)
      if (mask & (1u << i)) diag.push_back(i);
    const int d = static_cast<int>(diag.size());
    if (d > cell_budget) continue;
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) edges.emplace_back(diag[i], diag[j]);
    const int ne = static_cast<int>(edges.size());
    for (int e = 0; e <= ne && d + 2 * e <= cell_budget; ++e) {
      if (d + 2 * e < min_cells) continue;
      // all e-subsets of edges
      std::vector<int> pick(e);
      for (int i = 0; i < e; ++i) pick[i] = i;
      while (true) {
        std::vector<Cell> cells;
        for (int v : diag) cells.push_back({v, v});
        for (int i : pick) {
          cells.push_back({edges[i].first, edges[i].second});
          cells.push_back({edges[i].second, edges[i].first});
        }
        out.emplace_back(L, std::move(cells));
        int i = e - 1;
        while (i >= 0 && pick[i] == ne - e + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < e; ++j) pick[j] = pick[j - 1] + 1;
      }
    }
  }
  std::sort(out.begin(), out.end());
  EnumerationSummary summary;
  for (const Pattern& p : out) {
    ++summary.count_by_size[static_cast<int>(p.size())];
    ++summary.total;
    sink(p);
  }
  return summary;
}

std::vector<Pattern> enumerate_spd(int L, int cell_budget, int min_cells) {
  std::vector<Pattern> out;
  enumerate_spd(L, cell_budget, [&](const Pattern& p) { out.push_back(p); }, min_cells);
  return out;
}

}  // namespace sop
