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

// Autocorrelation support patterns on I x I.
//
// A pattern is a set of ordered pairs (lambda, lambda') of torus points. It
// is SPD when (l, l') in P implies (l', l), (l, l), (l', l') in P: exactly
// the supports a positive-semidefinite matrix can have. Cells are stored as
// flat indices (k * L + n) and kept sorted, which is also the canonical
// order used for enumeration and deduplication.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sop/gabor.hpp"
#include "sop/types.hpp"

namespace sop {

struct Cell {
  int row = 0;
  int col = 0;
  auto operator<=>(const Cell&) const = default;
};

class Pattern {
 public:
  Pattern() = default;
  /// Cells are flat indices in [0, L^2); duplicates are dropped.
  Pattern(int L, std::vector<Cell> cells);
  static Pattern from_pairs(int L, const std::vector<std::pair<TorusIndex, TorusIndex>>& pairs);

  int L() const { return L_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  const std::vector<Cell>& cells() const { return cells_; }
  bool contains(Cell c) const;

  /// Flat indices lambda with (lambda, lambda) in the pattern, ascending.
  std::vector<int> diagonal() const;
  /// #{lambda' : (lambda, lambda') in P}.
  int height(int lambda) const;

  bool operator==(const Pattern&) const = default;
  bool operator<(const Pattern& o) const { return cells_ < o.cells_; }

 private:
  int L_ = 0;
  std::vector<Cell> cells_;
};

bool validate_spd(const Pattern& p);
Pattern diagonal_pattern(int L);
/// gamma x gamma; throws on empty or repeated gamma.
Pattern tensor_pattern(int L, const std::vector<TorusIndex>& gamma);

// ---------------------------------------------------------------------------
// Enumeration

/// Number of SPD patterns with exactly `cells` cells (closed form:
/// sum over d + 2e = cells of C(L^2, d) * C(C(d, 2), e)).
double count_spd_patterns(int L, int cells);

inline constexpr double kDefaultEnumerationBudget = 2.0e6;

struct EnumerationSummary {
  std::map<int, std::uint64_t> count_by_size;
  std::uint64_t total = 0;
};

/// Emits every SPD pattern with min_cells <= |P| <= cell_budget exactly once,
/// in canonical (lexicographic by sorted cell list) order. Throws
/// BudgetExceeded for L > 3 or when more than `max_patterns` would be emitted.
EnumerationSummary enumerate_spd(int L, int cell_budget, const std::function<void(const Pattern&)>& sink,
                                 int min_cells = 1, double max_patterns = kDefaultEnumerationBudget);

std::vector<Pattern> enumerate_spd(int L, int cell_budget, int min_cells = 1);

// ---------------------------------------------------------------------------
// Homology transformations of the torus
//
// The three generators act on torus points as
//   translate(q, p):   (k, n) -> (k + q, n + p)
//   fourier_rotate:    (k, n) -> (-n, k)
//   conjugate_reflect: (k, n) -> (k, -n)
// Every composition is an affine map of Z_L^2. Each generator also carries a
// window map phi with frame(phi(c))[sigma(l)] proportional to U frame(c)[l]
// for a fixed (anti)unitary U, so rank(c, P) == rank(phi(c), sigma(P)).

class Homology {
 public:
  enum class Kind { Translate, FourierRotate, ConjugateReflect };
  struct Step {
    Kind kind;
    int q = 0;
    int p = 0;
  };

  explicit Homology(int L);  // identity
  static Homology translate(int L, int q, int p);
  static Homology fourier_rotate(int L);
  static Homology conjugate_reflect(int L);

  int L() const { return L_; }
  const std::vector<Step>& steps() const { return steps_; }

  TorusIndex apply(TorusIndex t) const;
  int apply(int flat) const;
  /// (*this) after `first`: x -> this(first(x)).
  Homology after(const Homology& first) const;
  Homology inverse() const;

  Window window_action(const Window& c) const;

 private:
  int L_;
  // (k, n) -> A (k, n) + t mod L
  int a00_ = 1, a01_ = 0, a10_ = 0, a11_ = 1;
  int t0_ = 0, t1_ = 0;
  std::vector<Step> steps_;
};

Pattern homology_apply(const Pattern& p, const Homology& sigma);
/// Relabels cells by an arbitrary permutation of the flat indices.
Pattern permute_pattern(const Pattern& p, const std::vector<int>& perm);

/// All distinct affine maps generated by the three generator types.
std::vector<Homology> homology_group(int L);
/// Smallest image of p under homology_group(L). Patterns with equal keys
/// are provably equivalent.
Pattern equivalence_canonical(const Pattern& p, const std::vector<Homology>& group);
/// Canonical key of p under all permutations of I (isomorphism class of the
/// correlation graph plus the diagonal count). Equal keys <=> homologous.
std::string homology_class_key(const Pattern& p);

// ---------------------------------------------------------------------------
// Structural defects

struct TwoSquaresWitness {
  std::vector<TorusIndex> gamma1;
  std::vector<TorusIndex> gamma2;
};

struct TallWitness {
  TorusIndex lambda0;
  int height = 0;
};

/// Maximal cliques of the correlation graph (vertices = diagonal cells,
/// edges = off-diagonal pairs), each sorted, in lexicographic order.
std::vector<std::vector<int>> maximal_cliques(const Pattern& p);

/// Disjoint Gamma1, Gamma2 with both squares inside p and
/// |Gamma1| + |Gamma2| > rank_G, if any. Requires validate_spd(p).
std::optional<TwoSquaresWitness> detect_two_squares(const Pattern& p, int rank_G);
/// lambda0 with height > L, if any (the tallest one is reported).
std::optional<TallWitness> detect_tall(const Pattern& p);

/// Fewest squares gamma x gamma inside p whose union is p (1 for a tensor
/// pattern, 0 for the empty one). Requires validate_spd(p).
int tensor_rank(const Pattern& p);

// ---------------------------------------------------------------------------
// Support masks and rectification

/// Boolean grid over the 4D box domain, M cells per box edge. The domain is
/// box_extent_t x box_extent_nu boxes of size a x b in each coordinate pair
/// (default L x L, i.e. [0, aL) x [0, bL)).
class SupportMask {
 public:
  SupportMask(int L, int M, double a, int box_extent_t = 0, int box_extent_nu = 0);

  int L() const { return L_; }
  int M() const { return M_; }
  double a() const { return a_; }
  double b() const { return 1.0 / (a_ * L_); }
  int extent_t() const { return et_; }
  int extent_nu() const { return en_; }
  /// Cells per coordinate: ct = extent_t * M, cn = extent_nu * M.
  int cells_t() const { return et_ * M_; }
  int cells_nu() const { return en_ * M_; }
  std::size_t cell_count() const { return data_.size(); }

  bool get(int it, int inu, int jt, int jnu) const { return data_[offset(it, inu, jt, jnu)] != 0; }
  void set(int it, int inu, int jt, int jnu, bool v = true) { data_[offset(it, inu, jt, jnu)] = v ? 1 : 0; }
  const std::vector<std::uint8_t>& raw() const { return data_; }
  std::vector<std::uint8_t>& raw() { return data_; }

  bool symmetric() const;

 private:
  std::size_t offset(int it, int inu, int jt, int jnu) const;
  int L_, M_;
  double a_;
  int et_, en_;
  std::vector<std::uint8_t> data_;
};

/// Marks every cell of the 4D box (k, n, k', n').
void mark_box(SupportMask& m, int k, int n, int kp, int np);

/// Boxes (k, n, k', n') hit by the mask, reduced mod L to a pattern. Throws
/// AsymmetricMask or CollisionModL (two distinct 2D boxes of the cover
/// congruent mod L).
Pattern rectify_support(const SupportMask& mask);

}  // namespace sop
