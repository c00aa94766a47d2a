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

#include "sop/patterns.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace sop {

Pattern::Pattern(int L, std::vector<Cell> cells) : L_(L), cells_(std::move(cells)) {
  if (L < 2) throw Error(ErrorCode::InvalidArgument, "pattern needs L >= 2");
  const int N = L * L;
  for (const Cell& c : cells_)
    if (c.row < 0 || c.row >= N || c.col < 0 || c.col >= N)
      throw Error(ErrorCode::InvalidArgument, "pattern cell outside I x I");
  std::sort(cells_.begin(), cells_.end());
  cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
}

Pattern Pattern::from_pairs(int L, const std::vector<std::pair<TorusIndex, TorusIndex>>& pairs) {
  std::vector<Cell> cells;
  cells.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    if (a.k < 0 || a.k >= L || a.n < 0 || a.n >= L || b.k < 0 || b.k >= L || b.n < 0 || b.n >= L)
      throw Error(ErrorCode::InvalidArgument, "torus index outside Z_L x Z_L");
    cells.push_back({flat_index(a, L), flat_index(b, L)});
  }
  return Pattern(L, std::move(cells));
}

bool Pattern::contains(Cell c) const { return std::binary_search(cells_.begin(), cells_.end(), c); }

std::vector<int> Pattern::diagonal() const {
  std::vector<int> d;
  for (const Cell& c : cells_)
    if (c.row == c.col) d.push_back(c.row);
  return d;
}

int Pattern::height(int lambda) const {
  auto lo = std::lower_bound(cells_.begin(), cells_.end(), Cell{lambda, 0});
  auto hi = std::lower_bound(cells_.begin(), cells_.end(), Cell{lambda + 1, 0});
  return static_cast<int>(hi - lo);
}

bool validate_spd(const Pattern& p) {
  for (const Cell& c : p.cells()) {
    if (!p.contains({c.col, c.row}) || !p.contains({c.row, c.row}) || !p.contains({c.col, c.col}))
      return false;
  }
  return true;
}

Pattern diagonal_pattern(int L) {
  if (L < 2) throw Error(ErrorCode::InvalidArgument, "diagonal pattern needs L >= 2");
  std::vector<Cell> cells;
  for (int l = 0; l < L * L; ++l) cells.push_back({l, l});
  return Pattern(L, std::move(cells));
}

Pattern tensor_pattern(int L, const std::vector<TorusIndex>& gamma) {
  if (gamma.empty()) throw Error(ErrorCode::InvalidArgument, "tensor pattern needs a nonempty gamma");
  std::set<TorusIndex> distinct(gamma.begin(), gamma.end());
  if (distinct.size() != gamma.size()) throw Error(ErrorCode::InvalidArgument, "gamma elements must be distinct");
  std::vector<std::pair<TorusIndex, TorusIndex>> pairs;
  for (const auto& a : gamma)
    for (const auto& b : gamma) pairs.emplace_back(a, b);
  return Pattern::from_pairs(L, pairs);
}

namespace {

void require_spd(const Pattern& p, const char* what) {
  if (!validate_spd(p)) throw Error(ErrorCode::InvalidArgument, std::string(what) + ": pattern is not SPD");
}

// Adjacency over the diagonal cells; vertex i <-> diag[i].
struct CorrelationGraph {
  std::vector<int> diag;
  std::vector<std::vector<char>> adj;
};

CorrelationGraph correlation_graph(const Pattern& p) {
  CorrelationGraph g;
  g.diag = p.diagonal();
  const std::size_t V = g.diag.size();
  g.adj.assign(V, std::vector<char>(V, 0));
  std::vector<int> pos(static_cast<std::size_t>(p.L()) * p.L(), -1);
  for (std::size_t i = 0; i < V; ++i) pos[g.diag[i]] = static_cast<int>(i);
  for (const Cell& c : p.cells()) {
    if (c.row == c.col) continue;
    const int i = pos[c.row], j = pos[c.col];
    if (i >= 0 && j >= 0) g.adj[i][j] = g.adj[j][i] = 1;
  }
  return g;
}

void bron_kerbosch(const CorrelationGraph& g, std::vector<int>& r, std::vector<int> p, std::vector<int> x,
                   std::vector<std::vector<int>>& out) {
  if (p.empty() && x.empty()) {
    out.push_back(r);
    return;
  }
  // pivot: vertex of p u x with most neighbours in p
  int pivot = -1, best = -1;
  for (const auto* set : {&p, &x})
    for (int u : *set) {
      int cnt = 0;
      for (int v : p) cnt += g.adj[u][v];
      if (cnt > best) best = cnt, pivot = u;
    }
  const std::vector<int> candidates = p;
  for (int v : candidates) {
    if (pivot >= 0 && g.adj[pivot][v]) continue;
    std::vector<int> np, nx;
    for (int u : p)
      if (g.adj[v][u]) np.push_back(u);
    for (int u : x)
      if (g.adj[v][u]) nx.push_back(u);
    r.push_back(v);
    bron_kerbosch(g, r, std::move(np), std::move(nx), out);
    r.pop_back();
    p.erase(std::find(p.begin(), p.end(), v));
    x.push_back(v);
  }
}

std::vector<TorusIndex> to_torus(const std::vector<int>& flats, int L) {
  std::vector<TorusIndex> out;
  for (int f : flats) out.push_back(torus_index(f, L));
  return out;
}

}  // namespace

std::vector<std::vector<int>> maximal_cliques(const Pattern& p) {
  require_spd(p, "maximal_cliques");
  const CorrelationGraph g = correlation_graph(p);
  std::vector<int> all(g.diag.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::vector<int>> local;
  std::vector<int> r;
  bron_kerbosch(g, r, all, {}, local);
  std::vector<std::vector<int>> out;
  for (auto& c : local) {
    std::vector<int> flats;
    for (int v : c) flats.push_back(g.diag[v]);
    std::sort(flats.begin(), flats.end());
    out.push_back(std::move(flats));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<TwoSquaresWitness> detect_two_squares(const Pattern& p, int rank_G) {
  const auto cliques = maximal_cliques(p);
  std::size_t best_union = 0;
  std::vector<int> g1, g2;
  for (std::size_t i = 0; i < cliques.size(); ++i) {
    for (std::size_t j = i; j < cliques.size(); ++j) {
      const auto& a = cliques[i];
      const auto& b = cliques[j];
      std::vector<int> first, second;
      if (i == j) {
        if (a.size() < 2) continue;
        const auto half = static_cast<std::ptrdiff_t>(a.size() / 2);
        first.assign(a.begin(), a.begin() + half);
        second.assign(a.begin() + half, a.end());
      } else {
        first = a;
        std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(second));
        if (second.empty()) continue;
      }
      const std::size_t u = first.size() + second.size();
      if (u > best_union) {
        best_union = u;
        g1 = std::move(first);
        g2 = std::move(second);
      }
    }
  }
  if (best_union <= static_cast<std::size_t>(std::max(rank_G, 0))) return std::nullopt;
  return TwoSquaresWitness{to_torus(g1, p.L()), to_torus(g2, p.L())};
}

std::optional<TallWitness> detect_tall(const Pattern& p) {
  require_spd(p, "detect_tall");
  std::optional<TallWitness> best;
  for (int l : p.diagonal()) {
    const int h = p.height(l);
    if (h > p.L() && (!best || h > best->height)) best = TallWitness{torus_index(l, p.L()), h};
  }
  return best;
}

int tensor_rank(const Pattern& p) {
  const auto cliques = maximal_cliques(p);
  const int n = static_cast<int>(cliques.size());
  if (n == 0) return 0;
  if (n > 24) throw Error(ErrorCode::BudgetExceeded, "tensor_rank: too many maximal cliques");
  // covering every cell needs every edge and vertex; squares can be taken maximal
  std::vector<std::vector<char>> in(n, std::vector<char>(p.size(), 0));
  for (int i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p.size(); ++j) {
      const Cell& c = p.cells()[j];
      in[i][j] = std::binary_search(cliques[i].begin(), cliques[i].end(), c.row) &&
                 std::binary_search(cliques[i].begin(), cliques[i].end(), c.col);
    }
  for (int k = 1; k <= n; ++k) {
    std::vector<int> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
      bool covered = true;
      for (std::size_t j = 0; j < p.size() && covered; ++j) {
        bool hit = false;
        for (int i : pick) hit = hit || in[i][j];
        covered = hit;
      }
      if (covered) return k;
      int i = k - 1;
      while (i >= 0 && pick[i] == n - k + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return n;
}

// ---------------------------------------------------------------------------

namespace {

// Canonical code of a connected graph on s vertices: the lexicographically
// smallest sorted edge list over all relabelings.
std::string component_code(const std::vector<int>& verts, const std::vector<std::vector<char>>& adj) {
  const int s = static_cast<int>(verts.size());
  if (s > 9) throw Error(ErrorCode::BudgetExceeded, "homology class key: component too large for exact canonization");
  std::vector<int> perm(s);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::pair<int, int>> best;
  bool have = false;
  do {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < s; ++i)
      for (int j = i + 1; j < s; ++j)
        if (adj[verts[i]][verts[j]]) {
          int a = perm[i], b = perm[j];
          if (a > b) std::swap(a, b);
          edges.emplace_back(a, b);
        }
    std::sort(edges.begin(), edges.end());
    if (!have || edges < best) best = std::move(edges), have = true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::ostringstream os;
  os << s << ':';
  for (auto [a, b] : best) os << a << '-' << b << ',';
  return os.str();
}

}  // namespace

std::string homology_class_key(const Pattern& p) {
  require_spd(p, "homology_class_key");
  const CorrelationGraph g = correlation_graph(p);
  const int V = static_cast<int>(g.diag.size());
  std::vector<int> seen(V, 0);
  std::vector<std::string> codes;
  for (int v = 0; v < V; ++v) {
    if (seen[v]) continue;
    std::vector<int> comp{v};
    seen[v] = 1;
    for (std::size_t i = 0; i < comp.size(); ++i)
      for (int u = 0; u < V; ++u)
        if (g.adj[comp[i]][u] && !seen[u]) seen[u] = 1, comp.push_back(u);
    if (comp.size() > 1) codes.push_back(component_code(comp, g.adj));
  }
  std::sort(codes.begin(), codes.end());
  std::ostringstream os;
  os << "L" << p.L() << "/d" << V;
  for (const auto& c : codes) os << '/' << c;
  return os.str();
}

}  // namespace sop
