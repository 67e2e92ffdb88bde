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
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "majperc/common.hpp"
#include "majperc/engine.hpp"
#include "majperc/lattice.hpp"
#include "majperc/state.hpp"

namespace majperc {

// Half-widths of the growth shape S^k_m(a,b): row i (|i| <= m+a+1) is the
// interval [-x_i, x_i]. Built from the top row down:
//   x_{m+a+1} = b,
//   x_i = x_{i+1} + k              for m <= i <= m+a,
//   x_i = x_{i+1} + i * ceil(k/m)  for 0 <= i <= m-1.
struct ShapeRows {
  std::int64_t k = 0, m = 0, a = 0, b = 0;
  std::vector<std::int64_t> half_width;  // x_0 .. x_{m+a+1}

  std::int64_t height() const { return static_cast<std::int64_t>(half_width.size()) - 1; }
  std::int64_t at(std::int64_t i) const { return half_width[static_cast<std::size_t>(std::abs(i))]; }
  bool contains(std::int64_t dx, std::int64_t dy) const {
    return std::abs(dy) <= height() && std::abs(dx) <= at(dy);
  }
  std::int64_t point_count() const {
    std::int64_t total = 0;
    for (std::int64_t i = -height(); i <= height(); ++i) total += 2 * at(i) + 1;
    return total;
  }
};

inline ShapeRows shape_rows(std::int64_t k, std::int64_t m, std::int64_t a, std::int64_t b) {
  require(m >= 1 && m <= k, "shape needs 1 <= m <= k");
  require(a >= 0 && b >= 0, "shape needs a, b >= 0");
  const std::int64_t top = m + a + 1;
  const std::int64_t step = ceil_div(k, m);
  ShapeRows rows{k, m, a, b, std::vector<std::int64_t>(static_cast<std::size_t>(top + 1))};
  rows.half_width[static_cast<std::size_t>(top)] = b;
  for (std::int64_t i = top - 1; i >= 0; --i)
    rows.half_width[static_cast<std::size_t>(i)] =
        rows.half_width[static_cast<std::size_t>(i + 1)] + (i >= m ? k : i * step);
  return rows;
}

struct ShapeSpec {
  std::int64_t k = 0, m = 0, a = 0, b = 0;
  TorusPoint center;
};

// Points of center + S^k_m(a,b) on the n-torus. Shapes whose bounding box
// does not fit in the torus would overlap themselves and are rejected.
inline std::vector<Vertex> shape_points(const ShapeSpec& spec, std::int64_t n) {
  const ShapeRows rows = shape_rows(spec.k, spec.m, spec.a, spec.b);
  require(2 * rows.at(0) + 1 <= n && 2 * rows.height() + 1 <= n,
          "shape does not fit the torus without overlapping itself");
  std::vector<Vertex> out;
  out.reserve(static_cast<std::size_t>(rows.point_count()));
  for (std::int64_t i = -rows.height(); i <= rows.height(); ++i)
    for (std::int64_t dx = -rows.at(i); dx <= rows.at(i); ++dx)
      out.push_back(TorusPoint::reduced(spec.center.x + dx, spec.center.y + i, n).index(n));
  return out;
}

struct GoodnessParams {
  std::int64_t k = 0, m = 0, r = 0;

  std::int64_t quota() const { return 2 * ceil_div(k, m); }
  // The quota can be met by some state only if it fits in a k-segment.
  bool satisfiable() const { return quota() <= k; }
};

// v is m-good when each of v + {1..k} x {+1}, v + {1..k} x {-1},
// v - {1..k} x {+1}, v - {1..k} x {-1} holds >= 2 ceil(k/m) active vertices.
inline bool is_m_good(TorusPoint v, const ActivationState& state, std::int64_t n,
                      std::int64_t k, std::int64_t m) {
  require(1 <= m && m <= k, "goodness needs 1 <= m <= k");
  require(2 * k + 1 <= n, "goodness needs 2k+1 <= n");
  const std::int64_t quota = 2 * ceil_div(k, m);
  for (std::int64_t dy : {-1, 1})
    for (std::int64_t side : {-1, 1}) {
      std::int64_t c = 0;
      for (std::int64_t d = 1; d <= k; ++d)
        c += state.test(TorusPoint::reduced(v.x + side * d, v.y + dy, n).index(n));
      if (c < quota) return false;
    }
  return true;
}

inline bool is_m_good(TorusPoint v, const ActivationState& state, std::int64_t n,
                      const GoodnessParams& params) {
  return is_m_good(v, state, n, params.k, params.m);
}

// Goodness of every vertex at once, via sliding one-sided row windows.
inline ActivationState good_map(const ActivationState& state, std::int64_t n,
                                std::int64_t k, std::int64_t m) {
  require(1 <= m && m <= k, "goodness needs 1 <= m <= k");
  require(2 * k + 1 <= n, "goodness needs 2k+1 <= n");
  const auto quota = static_cast<std::uint32_t>(2 * ceil_div(k, m));
  // right[y][x] = active in row y, columns x+1 .. x+k; left is the mirror.
  std::vector<std::uint32_t> right(static_cast<std::size_t>(n * n)), left(right.size());
  for (std::int64_t y = 0; y < n; ++y) {
    const std::int64_t row = y * n;
    const auto bit = [&](std::int64_t x) { return static_cast<std::uint32_t>(state.test(static_cast<std::size_t>(row + wrap(x, n)))); };
    std::uint32_t r = 0, l = 0;
    for (std::int64_t d = 1; d <= k; ++d) {
      r += bit(d);
      l += bit(-d);
    }
    for (std::int64_t x = 0; x < n; ++x) {
      right[static_cast<std::size_t>(row + x)] = r;
      left[static_cast<std::size_t>(row + x)] = l;
      r += bit(x + k + 1) - bit(x + 1);
      l += bit(x) - bit(x - k);
    }
  }
  ActivationState good(static_cast<std::size_t>(n * n));
  for (std::int64_t y = 0; y < n; ++y) {
    const std::int64_t up = wrap(y + 1, n) * n, down = wrap(y - 1, n) * n;
    for (std::int64_t x = 0; x < n; ++x) {
      const auto u = static_cast<std::size_t>(up + x), d = static_cast<std::size_t>(down + x);
      if (right[u] >= quota && left[u] >= quota && right[d] >= quota && left[d] >= quota)
        good.set(static_cast<std::size_t>(y * n + x));
    }
  }
  return good;
}

// Column spacing s = max(1, floor(k / (2 ceil(k/m)))): any k consecutive
// columns then contain >= floor(k/s) >= 2 ceil(k/m) active ones.
inline std::int64_t forcing_stride(std::int64_t k, std::int64_t m) {
  return std::max<std::int64_t>(1, k / (2 * ceil_div(k, m)));
}

// Every s-th column active: makes every vertex m-good when the quota fits.
inline ActivationState goodness_forcing_pattern(std::int64_t n, std::int64_t k, std::int64_t m) {
  require(GoodnessParams{k, m, 0}.satisfiable(), "goodness quota 2ceil(k/m) exceeds k");
  const std::int64_t s = forcing_stride(k, m);
  ActivationState out(static_cast<std::size_t>(n * n));
  for (std::int64_t y = 0; y < n; ++y)
    for (std::int64_t x = 0; x < n; x += s) out.set(static_cast<std::size_t>(y * n + x));
  return out;
}

// Distance on the n-torus from coordinate c to the interval [lo, hi).
inline std::int64_t distance_to_span(std::int64_t c, Span1D span, std::int64_t n) {
  if (c >= span.lo && c < span.hi) return 0;
  return std::min(axis_distance(c, span.lo, n), axis_distance(c, span.hi - 1, n));
}

// Cell goodness for a fixed state: a cell is good when every vertex inside
// or within l1-distance 32mk^2 of it is good or active. The vertex map is
// built once; each query is O(rows) via per-row prefix counts.
class CellGoodness {
 public:
  CellGoodness(const ActivationState& state, std::int64_t k, std::int64_t m, const Tessellation& tess)
      : tess_(tess), n_(tess.n()), radius_(32 * m * k * k) {
    const ActivationState good = good_map(state, n_, k, m);
    prefix_.assign(static_cast<std::size_t>(n_ * (n_ + 1)), 0);
    for (std::int64_t y = 0; y < n_; ++y)
      for (std::int64_t x = 0; x < n_; ++x) {
        const auto v = static_cast<std::size_t>(y * n_ + x);
        const bool bad = !good.test(v) && !state.test(v);
        prefix_[idx(y, x + 1)] = prefix_[idx(y, x)] + bad;
      }
  }

  std::int64_t radius() const { return radius_; }

  bool good(CellIndex c) const {
    const Span1D xs = tess_.span(c.i), ys = tess_.span(c.j);
    for (std::int64_t y = 0; y < n_; ++y) {
      const std::int64_t dy = distance_to_span(y, ys, n_);
      if (dy > radius_) continue;
      const std::int64_t reach = radius_ - dy;
      if (bad_in_row(y, xs.lo - reach, xs.hi - 1 + reach)) return false;
    }
    return true;
  }

 private:
  std::size_t idx(std::int64_t y, std::int64_t x) const { return static_cast<std::size_t>(y * (n_ + 1) + x); }

  // Any bad vertex in row y, columns lo..hi (inclusive, may wrap).
  bool bad_in_row(std::int64_t y, std::int64_t lo, std::int64_t hi) const {
    if (hi - lo + 1 >= n_) return prefix_[idx(y, n_)] > 0;
    const std::int64_t a = wrap(lo, n_), b = wrap(hi, n_);
    if (a <= b) return prefix_[idx(y, b + 1)] - prefix_[idx(y, a)] > 0;
    return prefix_[idx(y, n_)] - prefix_[idx(y, a)] + prefix_[idx(y, b + 1)] > 0;
  }

  const Tessellation& tess_;
  std::int64_t n_;
  std::int64_t radius_;
  std::vector<std::uint32_t> prefix_;
};

inline bool is_good_cell(CellIndex c, const ActivationState& state, const GoodnessParams& params,
                         const Tessellation& tess) {
  return CellGoodness(state, params.k, params.m, tess).good(c);
}

// A seed cell contains a fully active translate of S^k_m(0,0). Scans every
// anchor that keeps the shape inside the cell.
inline bool is_seed_cell(CellIndex c, const ActivationState& state, std::int64_t k, std::int64_t m,
                         const Tessellation& tess) {
  const ShapeRows rows = shape_rows(k, m, 0, 0);
  const std::int64_t n = tess.n();
  const Span1D xs = tess.span(c.i), ys = tess.span(c.j);
  const std::int64_t w = rows.at(0), h = rows.height();
  if (xs.length() < 2 * w + 1 || ys.length() < 2 * h + 1) return false;
  // prefix[y - ys.lo][x - xs.lo] over the cell.
  const std::int64_t cw = xs.length();
  std::vector<std::int32_t> prefix(static_cast<std::size_t>(ys.length() * (cw + 1)), 0);
  for (std::int64_t y = ys.lo; y < ys.hi; ++y)
    for (std::int64_t x = xs.lo; x < xs.hi; ++x) {
      const auto base = static_cast<std::size_t>((y - ys.lo) * (cw + 1) + (x - xs.lo));
      prefix[base + 1] = prefix[base] + state.test(static_cast<std::size_t>(y * n + x));
    }
  const auto full = [&](std::int64_t y, std::int64_t lo, std::int64_t hi) {
    const auto row = static_cast<std::size_t>((y - ys.lo) * (cw + 1));
    return prefix[row + static_cast<std::size_t>(hi - xs.lo + 1)] -
               prefix[row + static_cast<std::size_t>(lo - xs.lo)] == hi - lo + 1;
  };
  for (std::int64_t cy = ys.lo + h; cy + h < ys.hi; ++cy)
    for (std::int64_t cx = xs.lo + w; cx + w < xs.hi; ++cx) {
      bool ok = true;
      for (std::int64_t i = -h; i <= h && ok; ++i) ok = full(cy + i, cx - rows.at(i), cx + rows.at(i));
      if (ok) return true;
    }
  return false;
}

struct CheckReport {
  enum class Status { kPass, kFail, kSkip };
  Status status = Status::kSkip;
  std::string detail;

  bool passed() const { return status == Status::kPass; }
  bool skipped() const { return status == Status::kSkip; }
  static CheckReport pass(std::string d = {}) { return {Status::kPass, std::move(d)}; }
  static CheckReport fail(std::string d) { return {Status::kFail, std::move(d)}; }
  static CheckReport skip(std::string d) { return {Status::kSkip, std::move(d)}; }
};

inline std::string to_string(CheckReport::Status s) {
  switch (s) {
    case CheckReport::Status::kPass: return "pass";
    case CheckReport::Status::kFail: return "fail";
    case CheckReport::Status::kSkip: return "skip";
  }
  return "?";
}

// Executable check of the one-step cloud growth: with S^k_m(a,b) active and
// every vertex of S^k_m(a+1,b) good or active, M_r on L(n,k) must activate
// all of S^k_m(a+1,b). Goodness is supplied by the column pattern.
inline CheckReport verify_lemma_growcloud(std::int64_t k, std::int64_t m, std::int64_t a,
                                          std::int64_t b, std::int64_t r) {
  if (!(1 <= m && m < k) || a < 0 || b < 0 || r < 0 || r > ceil_div(k, m))
    return CheckReport::skip("preconditions unmet: need 1 <= m < k, a,b >= 0, 0 <= r <= ceil(k/m)");
  if (!GoodnessParams{k, m, r}.satisfiable())
    return CheckReport::skip("no goodness witness: 2ceil(k/m) > k");
  const std::int64_t n = 4 * (b + (m + a + 2) * k);
  const TorusPoint center{n / 2, n / 2};
  const auto inner = shape_points({k, m, a, b, center}, n);
  const auto outer = shape_points({k, m, a + 1, b, center}, n);

  ActivationState state = goodness_forcing_pattern(n, k, m);
  for (Vertex v : inner) state.set(v);
  const ActivationState good = good_map(state, n, k, m);
  for (Vertex v : outer)
    if (!good.test(v) && !state.test(v))
      return CheckReport::fail("witness state leaves a vertex of S(a+1,b) bad and inactive");

  const LatticeGraph g(LatticeSpec::lattice(n, k));
  const FinalState final_state = run_to_fixpoint(g, Rule::majority(r), state);
  for (Vertex v : outer)
    if (!final_state.active.test(v)) {
      const auto p = TorusPoint::from_index(v, n);
      return CheckReport::fail("vertex (" + std::to_string(p.x - center.x) + "," +
                               std::to_string(p.y - center.y) + ") of S(a+1,b) stayed inactive");
    }
  return CheckReport::pass("n=" + std::to_string(n) + " rounds=" + std::to_string(final_state.rounds));
}

// A set of cells Z together with an initial state of M_r on L(n,k).
struct CorollaryScenario {
  std::int64_t k = 0, m = 0, r = 0;
  std::int64_t n = 0, t = 0;
  std::vector<CellIndex> cells;
  ActivationState initial;
};

// Cells of Z are l1-connected when BFS over the cell torus reaches them all.
inline bool cells_l1_connected(const std::vector<CellIndex>& cells, const Tessellation& tess) {
  if (cells.empty()) return false;
  std::vector<char> in(tess.cell_count(), 0), seen(tess.cell_count(), 0);
  for (auto c : cells) in[tess.flat(c)] = 1;
  std::vector<CellIndex> stack{cells.front()};
  seen[tess.flat(cells.front())] = 1;
  std::size_t reached = 1;
  const std::int64_t nc = tess.cells_per_axis();
  while (!stack.empty()) {
    const CellIndex c = stack.back();
    stack.pop_back();
    for (auto [di, dj] : {std::pair{1, 0}, std::pair{-1, 0}, std::pair{0, 1}, std::pair{0, -1}}) {
      const CellIndex d{wrap(c.i + di, nc), wrap(c.j + dj, nc)};
      const std::size_t id = tess.flat(d);
      if (in[id] && !seen[id]) {
        seen[id] = 1;
        ++reached;
        stack.push_back(d);
      }
    }
  }
  std::vector<std::size_t> ids;
  for (auto c : cells) ids.push_back(tess.flat(c));
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return reached == ids.size();
}

// blocks x blocks cells (side t = 4mk+1) at the origin of a torus with
// blocks+1 cells per axis, column pattern everywhere, and optionally a
// planted S^k_m(0,0) at the centre of the middle cell.
inline CorollaryScenario block_scenario(std::int64_t k, std::int64_t m, std::int64_t r,
                                        std::int64_t blocks = 3, bool plant_seed = true) {
  CorollaryScenario sc;
  sc.k = k;
  sc.m = m;
  sc.r = r;
  sc.t = 4 * m * k + 1;
  sc.n = (blocks + 1) * sc.t;
  for (std::int64_t j = 0; j < blocks; ++j)
    for (std::int64_t i = 0; i < blocks; ++i) sc.cells.push_back({i, j});
  sc.initial = goodness_forcing_pattern(sc.n, k, m);
  if (plant_seed) {
    const Tessellation tess(sc.n, sc.t);
    const CellIndex mid{blocks / 2, blocks / 2};
    const TorusPoint centre{tess.span(mid.i).lo + sc.t / 2, tess.span(mid.j).lo + sc.t / 2};
    for (Vertex v : shape_points({k, m, 0, 0, centre}, sc.n)) sc.initial.set(v);
  }
  return sc;
}

// Checks that an l1-connected set of good cells containing a seed becomes
// fully active under M_r. Scenarios that miss a hypothesis are skipped.
inline CheckReport verify_corollary_growcells(const CorollaryScenario& sc) {
  if (!(1 <= sc.m && sc.m < sc.k) || sc.r < 0 || sc.r > ceil_div(sc.k, sc.m) || sc.t < 1 ||
      sc.t > sc.n || 2 * sc.k + 1 > sc.n)
    return CheckReport::skip("preconditions unmet: parameters");
  const Tessellation tess(sc.n, sc.t);
  if (!cells_l1_connected(sc.cells, tess)) return CheckReport::skip("preconditions unmet: Z not l1-connected");
  const CellGoodness goodness(sc.initial, sc.k, sc.m, tess);
  for (auto c : sc.cells)
    if (!goodness.good(c)) return CheckReport::skip("preconditions unmet: Z has a bad cell");
  const bool seeded = std::any_of(sc.cells.begin(), sc.cells.end(), [&](CellIndex c) {
    return is_seed_cell(c, sc.initial, sc.k, sc.m, tess);
  });
  if (!seeded) return CheckReport::skip("preconditions unmet: Z has no seed");

  const LatticeGraph g(LatticeSpec::lattice(sc.n, sc.k));
  const FinalState out = run_to_fixpoint(g, Rule::majority(sc.r), sc.initial);
  for (auto c : sc.cells) {
    bool all_active = true;
    tess.for_each_vertex(c, [&](Vertex v) { all_active = all_active && out.active.test(v); });
    if (!all_active)
      return CheckReport::fail("cell (" + std::to_string(c.i) + "," + std::to_string(c.j) + ") not fully active");
  }
  return CheckReport::pass("n=" + std::to_string(sc.n) + " t=" + std::to_string(sc.t) +
                           " rounds=" + std::to_string(out.rounds));
}

struct GrowthGridRow {
  std::string check;  // "growcloud" or "growcells"
  std::int64_t k = 0, m = 0, a = 0, b = 0, r = 0;
  CheckReport report;
};

// The verification grid: cloud growth for k <= k_max, 2 <= m < k with
// 2ceil(k/m) <= k, a,b <= ab_max, r = ceil(k/m); then the 3x3 block
// scenario for the same (k, m, r).
inline std::vector<GrowthGridRow> growth_grid(std::int64_t k_max, std::int64_t ab_max = 3, bool with_cells = true) {
  std::vector<GrowthGridRow> rows;
  for (std::int64_t k = 3; k <= k_max; ++k)
    for (std::int64_t m = 2; m < k; ++m) {
      const std::int64_t r = ceil_div(k, m);
      if (2 * r > k) continue;
      for (std::int64_t a = 0; a <= ab_max; ++a)
        for (std::int64_t b = 0; b <= ab_max; ++b)
          rows.push_back({"growcloud", k, m, a, b, r, verify_lemma_growcloud(k, m, a, b, r)});
      if (with_cells) rows.push_back({"growcells", k, m, 0, 0, r, verify_corollary_growcells(block_scenario(k, m, r))});
    }
  return rows;
}

}  // namespace majperc
