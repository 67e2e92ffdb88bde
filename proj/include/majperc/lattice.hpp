// Copyright 2026 The majperc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "majperc/common.hpp"

namespace majperc {

// A vertex of the n x n torus, always stored reduced mod n.
struct TorusPoint {
  std::int64_t x = 0;
  std::int64_t y = 0;

  static TorusPoint reduced(std::int64_t x, std::int64_t y, std::int64_t n) {
    return {wrap(x, n), wrap(y, n)};
  }
  static TorusPoint from_index(Vertex v, std::int64_t n) {
    return {static_cast<std::int64_t>(v) % n, static_cast<std::int64_t>(v) / n};
  }
  Vertex index(std::int64_t n) const { return static_cast<Vertex>(y * n + x); }

  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;
  friend auto operator<=>(const TorusPoint&, const TorusPoint&) = default;
};

enum class Family { kLattice, kL1, kLInf, kExplicit };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::kLattice: return "L(n,k)";
    case Family::kL1: return "L1(n)";
    case Family::kLInf: return "Linf(n)";
    case Family::kExplicit: return "explicit";
  }
  return "?";
}

struct LatticeSpec {
  std::int64_t n = 0;
  std::int64_t k = 0;
  Family family = Family::kLattice;

  static LatticeSpec lattice(std::int64_t n, std::int64_t k) {
    return {n, k, Family::kLattice};
  }
  static LatticeSpec l1(std::int64_t n) { return {n, 0, Family::kL1}; }
  static LatticeSpec linf(std::int64_t n) { return {n, 0, Family::kLInf}; }

  void validate() const {
    require(n >= 1, "torus side must be positive");
    switch (family) {
      case Family::kLattice:
        require(k >= 1, "L(n,k) needs k >= 1");
        require(2 * k + 1 <= n,
                "L(n,k) needs 2k+1 <= n (neighbourhood would wrap)");
        break;
      case Family::kL1:
      case Family::kLInf:
        require(n >= 3, "L1(n) and Linf(n) need n >= 3");
        break;
      case Family::kExplicit:
        throw PreconditionError("explicit graphs use ExplicitGraph");
    }
  }
};

// Implicit stencil graph for L(n,k), L1(n) and Linf(n). Neighbours are
// generated from an offset table; nothing per-vertex is stored.
class LatticeGraph {
 public:
  explicit LatticeGraph(LatticeSpec spec) : spec_(spec) {
    spec_.validate();
    switch (spec_.family) {
      case Family::kLattice:
        for (std::int64_t dy : {-1, 1})
          for (std::int64_t dx = -spec_.k; dx <= spec_.k; ++dx)
            offsets_.emplace_back(dx, dy);
        break;
      case Family::kL1:
        offsets_ = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        break;
      case Family::kLInf:
        for (std::int64_t dy = -1; dy <= 1; ++dy)
          for (std::int64_t dx = -1; dx <= 1; ++dx)
            if (dx != 0 || dy != 0) offsets_.emplace_back(dx, dy);
        break;
      case Family::kExplicit:
        break;
    }
  }

  const LatticeSpec& spec() const { return spec_; }
  std::int64_t side() const { return spec_.n; }
  std::int64_t reach() const { return spec_.k; }
  Family family() const { return spec_.family; }
  const std::vector<std::pair<std::int64_t, std::int64_t>>& offsets() const {
    return offsets_;
  }

  std::size_t vertex_count() const {
    return static_cast<std::size_t>(spec_.n * spec_.n);
  }
  std::size_t degree(Vertex) const { return offsets_.size(); }
  std::size_t uniform_degree() const { return offsets_.size(); }

  template <class F>
  void for_each_neighbor(Vertex v, F&& f) const {
    const std::int64_t n = spec_.n;
    const std::int64_t x = v % n;
    const std::int64_t y = v / n;
    if (spec_.family == Family::kLattice) {
      // Two rows, each a contiguous run of 2k+1 columns split at the seam.
      for (std::int64_t dy : {-1, 1}) {
        const std::int64_t row = wrap(y + dy, n) * n;
        std::int64_t lo = x - spec_.k;
        std::int64_t hi = x + spec_.k;
        if (lo < 0) {
          for (std::int64_t c = lo + n; c < n; ++c) f(static_cast<Vertex>(row + c));
          lo = 0;
        }
        if (hi >= n) {
          for (std::int64_t c = 0; c <= hi - n; ++c) f(static_cast<Vertex>(row + c));
          hi = n - 1;
        }
        for (std::int64_t c = lo; c <= hi; ++c) f(static_cast<Vertex>(row + c));
      }
      return;
    }
    for (const auto& [dx, dy] : offsets_)
      f(static_cast<Vertex>(wrap(y + dy, n) * n + wrap(x + dx, n)));
  }

  std::vector<Vertex> neighbors(Vertex v) const {
    std::vector<Vertex> out;
    out.reserve(offsets_.size());
    for_each_neighbor(v, [&](Vertex u) { out.push_back(u); });
    return out;
  }

  // Edge test in O(1) from the coordinate difference.
  bool adjacent(Vertex u, Vertex v) const {
    const std::int64_t n = spec_.n;
    const std::int64_t dx = wrap(static_cast<std::int64_t>(v % n) - u % n, n);
    const std::int64_t dy = wrap(static_cast<std::int64_t>(v / n) - u / n, n);
    const auto near = [n](std::int64_t d, std::int64_t r) {
      return d <= r || d >= n - r;
    };
    switch (spec_.family) {
      case Family::kLattice:
        return (dy == 1 || dy == n - 1) && near(dx, spec_.k);
      case Family::kL1:
        return (dx == 0 && (dy == 1 || dy == n - 1)) ||
               (dy == 0 && (dx == 1 || dx == n - 1));
      case Family::kLInf:
        return (dx != 0 || dy != 0) && near(dx, 1) && near(dy, 1);
      case Family::kExplicit:
        break;
    }
    return false;
  }

 private:
  LatticeSpec spec_;
  std::vector<std::pair<std::int64_t, std::int64_t>> offsets_;
};

inline std::vector<TorusPoint> neighbors(TorusPoint v, const LatticeSpec& spec) {
  const LatticeGraph g(spec);
  std::vector<TorusPoint> out;
  g.for_each_neighbor(v.index(spec.n), [&](Vertex u) {
    out.push_back(TorusPoint::from_index(u, spec.n));
  });
  return out;
}

// Small arbitrary graphs held as adjacency lists (cycles, wheels, ad-hoc
// regular graphs for oracle tests).
class ExplicitGraph {
 public:
  ExplicitGraph() = default;
  explicit ExplicitGraph(std::vector<std::vector<Vertex>> adjacency)
      : adj_(std::move(adjacency)) {
    for (std::size_t v = 0; v < adj_.size(); ++v) {
      auto& row = adj_[v];
      std::sort(row.begin(), row.end());
      require(std::adjacent_find(row.begin(), row.end()) == row.end(),
              "explicit graph has a multiple edge");
      for (Vertex u : row) {
        require(u < adj_.size(), "explicit graph neighbour out of range");
        require(u != v, "explicit graph has a loop");
      }
    }
    for (std::size_t v = 0; v < adj_.size(); ++v)
      for (Vertex u : adj_[v])
        require(std::binary_search(adj_[u].begin(), adj_[u].end(),
                                   static_cast<Vertex>(v)),
                "explicit graph adjacency is not symmetric");
  }

  static ExplicitGraph from_edges(std::size_t n_vertices,
                                  const std::vector<std::pair<Vertex, Vertex>>& edges) {
    std::vector<std::vector<Vertex>> adj(n_vertices);
    for (auto [u, v] : edges) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    return ExplicitGraph(std::move(adj));
  }

  static ExplicitGraph cycle(std::size_t n) {
    require(n >= 3, "cycle needs n >= 3");
    std::vector<std::pair<Vertex, Vertex>> e;
    for (std::size_t i = 0; i < n; ++i)
      e.emplace_back(static_cast<Vertex>(i), static_cast<Vertex>((i + 1) % n));
    return from_edges(n, e);
  }

  // Cycle on vertices 0..n-1 plus hub vertex n joined to all of them.
  static ExplicitGraph wheel(std::size_t n) {
    require(n >= 3, "wheel needs n >= 3");
    std::vector<std::pair<Vertex, Vertex>> e;
    for (std::size_t i = 0; i < n; ++i) {
      e.emplace_back(static_cast<Vertex>(i), static_cast<Vertex>((i + 1) % n));
      e.emplace_back(static_cast<Vertex>(i), static_cast<Vertex>(n));
    }
    return from_edges(n + 1, e);
  }

  // Circulant graph: i ~ i +- s for every s in steps (1 <= s < n/2, or
  // s == n/2 for a perfect matching of antipodes). Regular by construction.
  static ExplicitGraph circulant(std::size_t n, const std::vector<std::size_t>& steps) {
    std::vector<std::pair<Vertex, Vertex>> e;
    for (std::size_t s : steps) {
      require(s >= 1 && 2 * s <= n, "circulant step out of range");
      const std::size_t count = (2 * s == n) ? n / 2 : n;
      for (std::size_t i = 0; i < count; ++i)
        e.emplace_back(static_cast<Vertex>(i), static_cast<Vertex>((i + s) % n));
    }
    return from_edges(n, e);
  }

  std::size_t vertex_count() const { return adj_.size(); }
  std::size_t degree(Vertex v) const { return adj_[v].size(); }

  template <class F>
  void for_each_neighbor(Vertex v, F&& f) const {
    for (Vertex u : adj_[v]) f(u);
  }
  const std::vector<Vertex>& neighbors(Vertex v) const { return adj_[v]; }

  // Same graph with vertex v renamed to perm[v].
  ExplicitGraph relabeled(const std::vector<Vertex>& perm) const {
    std::vector<std::vector<Vertex>> adj(adj_.size());
    for (std::size_t v = 0; v < adj_.size(); ++v)
      for (Vertex u : adj_[v]) adj[perm[v]].push_back(perm[u]);
    return ExplicitGraph(std::move(adj));
  }

 private:
  std::vector<std::vector<Vertex>> adj_;
};

enum class Metric { kL1, kLInf };

constexpr std::int64_t axis_distance(std::int64_t a, std::int64_t b,
                                     std::int64_t n) {
  const std::int64_t d = wrap(a - b, n);
  return std::min(d, n - d);
}

// Graph distance in L1(n) (resp. Linf(n)).
constexpr std::int64_t torus_distance(TorusPoint u, TorusPoint v, Metric metric,
                                      std::int64_t n) {
  const std::int64_t dx = axis_distance(u.x, v.x, n);
  const std::int64_t dy = axis_distance(u.y, v.y, n);
  return metric == Metric::kL1 ? dx + dy : std::max(dx, dy);
}

struct CellIndex {
  std::int64_t i = 0;  // column block (x)
  std::int64_t j = 0;  // row block (y)
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

// Half-open coordinate interval [lo, hi).
struct Span1D {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::int64_t length() const { return hi - lo; }
};

// The t-tessellation of [n]^2 into floor(n/t)^2 cells. Cell i covers
// coordinates [a_i, a_{i+1}) with a_i = i*t and a_last = n, so the last
// row and column of cells absorb the remainder.
class Tessellation {
 public:
  Tessellation(std::int64_t n, std::int64_t t) : n_(n), t_(t) {
    require(n >= 1, "torus side must be positive");
    require(t >= 1 && t <= n, "tessellation needs 1 <= t <= n");
    cells_ = n / t;
    for (std::int64_t i = 0; i < cells_; ++i) bounds_.push_back(i * t);
    bounds_.push_back(n);
  }

  std::int64_t n() const { return n_; }
  std::int64_t t() const { return t_; }
  std::int64_t cells_per_axis() const { return cells_; }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(cells_ * cells_);
  }
  const std::vector<std::int64_t>& boundaries() const { return bounds_; }

  Span1D span(std::int64_t i) const { return {bounds_[i], bounds_[i + 1]}; }

  CellIndex cell_of(TorusPoint v) const {
    return {block_of(v.x), block_of(v.y)};
  }
  std::int64_t block_of(std::int64_t coord) const {
    return std::min(coord / t_, cells_ - 1);
  }

  std::size_t flat(CellIndex c) const {
    return static_cast<std::size_t>(c.j * cells_ + c.i);
  }
  CellIndex unflat(std::size_t id) const {
    return {static_cast<std::int64_t>(id) % cells_,
            static_cast<std::int64_t>(id) / cells_};
  }

  template <class F>
  void for_each_vertex(CellIndex c, F&& f) const {
    const Span1D xs = span(c.i), ys = span(c.j);
    for (std::int64_t y = ys.lo; y < ys.hi; ++y)
      for (std::int64_t x = xs.lo; x < xs.hi; ++x)
        f(static_cast<Vertex>(y * n_ + x));
  }

  // Distance between cells in the cell graph L1(n^) / Linf(n^).
  std::int64_t cell_distance(CellIndex a, CellIndex b, Metric metric) const {
    return torus_distance({a.i, a.j}, {b.i, b.j}, metric, cells_);
  }

 private:
  std::int64_t n_;
  std::int64_t t_;
  std::int64_t cells_ = 0;
  std::vector<std::int64_t> bounds_;
};

inline Tessellation tessellate(std::int64_t n, std::int64_t t) {
  return Tessellation(n, t);
}

}  // namespace majperc
