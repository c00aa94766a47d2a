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
#include <map>
#include <tuple>

#include "sop/patterns.hpp"

namespace sop {

Homology::Homology(int L) : L_(L) {
  if (L < 2) throw Error(ErrorCode::InvalidArgument, "homology needs L >= 2");
}

Homology Homology::translate(int L, int q, int p) {
  Homology h(L);
  h.t0_ = mod(q, L);
  h.t1_ = mod(p, L);
  h.steps_.push_back({Kind::Translate, q, p});
  return h;
}

Homology Homology::fourier_rotate(int L) {
  Homology h(L);
  h.a00_ = 0, h.a01_ = -1, h.a10_ = 1, h.a11_ = 0;
  h.steps_.push_back({Kind::FourierRotate, 0, 0});
  return h;
}

Homology Homology::conjugate_reflect(int L) {
  Homology h(L);
  h.a11_ = -1;
  h.steps_.push_back({Kind::ConjugateReflect, 0, 0});
  return h;
}

TorusIndex Homology::apply(TorusIndex t) const {
  return {mod(static_cast<long long>(a00_) * t.k + static_cast<long long>(a01_) * t.n + t0_, L_),
          mod(static_cast<long long>(a10_) * t.k + static_cast<long long>(a11_) * t.n + t1_, L_)};
}

int Homology::apply(int flat) const { return flat_index(apply(torus_index(flat, L_)), L_); }

Homology Homology::after(const Homology& first) const {
  if (first.L_ != L_) throw Error(ErrorCode::InvalidArgument, "homology composition across different L");
  Homology h(L_);
  h.a00_ = mod(a00_ * first.a00_ + a01_ * first.a10_, L_);
  h.a01_ = mod(a00_ * first.a01_ + a01_ * first.a11_, L_);
  h.a10_ = mod(a10_ * first.a00_ + a11_ * first.a10_, L_);
  h.a11_ = mod(a10_ * first.a01_ + a11_ * first.a11_, L_);
  h.t0_ = mod(a00_ * first.t0_ + a01_ * first.t1_ + t0_, L_);
  h.t1_ = mod(a10_ * first.t0_ + a11_ * first.t1_ + t1_, L_);
  h.steps_ = first.steps_;
  h.steps_.insert(h.steps_.end(), steps_.begin(), steps_.end());
  return h;
}

Homology Homology::inverse() const {
  Homology h(L_);
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
    switch (it->kind) {
      case Kind::Translate:
        h = translate(L_, -it->q, -it->p).after(h);
        break;
      case Kind::FourierRotate:
        for (int r = 0; r < 3; ++r) h = fourier_rotate(L_).after(h);
        break;
      case Kind::ConjugateReflect:
        h = conjugate_reflect(L_).after(h);
        break;
    }
  }
  return h;
}

Window Homology::window_action(const Window& c) const {
  if (c.length() != L_) throw Error(ErrorCode::InvalidArgument, "window length does not match homology");
  CVector v = c.entries();
  for (const Step& s : steps_) {
    switch (s.kind) {
      case Kind::Translate:
        v = modulate(sop::translate(v, -s.q), -s.p);
        break;
      case Kind::FourierRotate:
        v = inverse_dft(v);
        break;
      case Kind::ConjugateReflect:
        v = v.conjugate().eval();
        break;
    }
  }
  bool uni = true;
  for (Eigen::Index i = 0; i < v.size(); ++i) uni = uni && std::abs(std::abs(v[i]) - 1.0) <= 1e-12;
  return Window(std::move(v), uni);
}

Pattern homology_apply(const Pattern& p, const Homology& sigma) {
  if (p.L() != sigma.L()) throw Error(ErrorCode::InvalidArgument, "pattern and homology disagree on L");
  std::vector<Cell> cells;
  cells.reserve(p.size());
  for (const Cell& c : p.cells()) cells.push_back({sigma.apply(c.row), sigma.apply(c.col)});
  return Pattern(p.L(), std::move(cells));
}

Pattern permute_pattern(const Pattern& p, const std::vector<int>& perm) {
  const int N = p.L() * p.L();
  if (static_cast<int>(perm.size()) != N) throw Error(ErrorCode::InvalidArgument, "permutation has wrong length");
  std::vector<char> hit(N, 0);
  for (int v : perm) {
    if (v < 0 || v >= N || hit[v]) throw Error(ErrorCode::InvalidArgument, "not a permutation of I");
    hit[v] = 1;
  }
  std::vector<Cell> cells;
  cells.reserve(p.size());
  for (const Cell& c : p.cells()) cells.push_back({perm[c.row], perm[c.col]});
  return Pattern(p.L(), std::move(cells));
}

std::vector<Homology> homology_group(int L) {
  // closure under the generators, keyed by the affine action on all points
  const std::vector<Homology> gens{Homology::translate(L, 1, 0), Homology::translate(L, 0, 1),
                                   Homology::fourier_rotate(L), Homology::conjugate_reflect(L)};
  auto key = [L](const Homology& h) {
    std::vector<int> img(L * L);
    for (int f = 0; f < L * L; ++f) img[f] = h.apply(f);
    return img;
  };
  std::map<std::vector<int>, std::size_t> seen;
  std::vector<Homology> group{Homology(L)};
  seen.emplace(key(group[0]), 0);
  for (std::size_t i = 0; i < group.size(); ++i) {
    for (const Homology& g : gens) {
      Homology h = g.after(group[i]);
      auto k = key(h);
      if (seen.emplace(std::move(k), group.size()).second) group.push_back(std::move(h));
    }
  }
  return group;
}

Pattern equivalence_canonical(const Pattern& p, const std::vector<Homology>& group) {
  Pattern best = p;
  for (const Homology& h : group) {
    Pattern q = homology_apply(p, h);
    if (q < best) best = std::move(q);
  }
  return best;
}

}  // namespace sop
