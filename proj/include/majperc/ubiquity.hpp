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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "majperc/common.hpp"
#include "majperc/growth.hpp"
#include "majperc/lattice.hpp"
#include "majperc/matchings.hpp"
#include "majperc/state.hpp"

namespace majperc {

// A set of cells of the side x side cell torus.
class CellSet {
 public:
  CellSet() = default;
  explicit CellSet(std::int64_t side, bool full = false)
      : side_(side), bits_(static_cast<std::size_t>(side * side), full ? 1 : 0) {
    require(side >= 1, "cell grid needs side >= 1");
  }

  // Cells containing at least one of the flagged vertices.
  static CellSet touching(const Tessellation& tess, const ActivationState& vertices) {
    CellSet out(tess.cells_per_axis());
    const std::int64_t n = tess.n();
    for (Vertex v : vertices.active_vertices())
      out.insert(tess.cell_of(TorusPoint::from_index(v, n)));
    return out;
  }

  std::int64_t side() const { return side_; }
  std::size_t id(CellIndex c) const { return static_cast<std::size_t>(c.j * side_ + c.i); }
  CellIndex at(std::size_t id) const {
    return {static_cast<std::int64_t>(id) % side_, static_cast<std::int64_t>(id) / side_};
  }
  bool contains(CellIndex c) const { return bits_[id(c)] != 0; }
  void insert(CellIndex c) { bits_[id(c)] = 1; }
  void erase(CellIndex c) { bits_[id(c)] = 0; }
  std::size_t size() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1)); }
  bool empty() const { return size() == 0; }
  std::size_t capacity() const { return bits_.size(); }

  CellSet complement() const {
    CellSet out(side_);
    for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] ? 0 : 1;
    return out;
  }

  std::vector<CellIndex> cells() const {
    std::vector<CellIndex> out;
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) out.push_back(at(i));
    return out;
  }

  friend bool operator==(const CellSet&, const CellSet&) = default;

 private:
  std::int64_t side_ = 0;
  std::vector<char> bits_;
};

// Torus distance between cells of the side x side grid.
inline std::int64_t cell_distance(CellIndex a, CellIndex b, Metric metric, std::int64_t side) {
  const std::int64_t dx = axis_distance(a.i, b.i, side), dy = axis_distance(a.j, b.j, side);
  return metric == Metric::kL1 ? dx + dy : std::max(dx, dy);
}

// Max pairwise torus distance.
inline std::int64_t diameter(const std::vector<CellIndex>& cells, Metric metric, std::int64_t side) {
  std::int64_t best = 0;
  for (std::size_t a = 0; a < cells.size(); ++a)
    for (std::size_t b = a + 1; b < cells.size(); ++b)
      best = std::max(best, cell_distance(cells[a], cells[b], metric, side));
  return best;
}

struct ComponentSummary {
  std::size_t id = 0;
  std::vector<CellIndex> cells;  // sorted by (j, i)
  std::int64_t diameter = 0;     // in the metric used to build the component
  std::size_t size() const { return cells.size(); }
};

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};

inline const std::vector<std::pair<int, int>>& cell_steps(Metric metric) {
  static const std::vector<std::pair<int, int>> l1{{1, 0}, {0, 1}};
  static const std::vector<std::pair<int, int>> linf{{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  return metric == Metric::kL1 ? l1 : linf;
}

}  // namespace detail

// Maximal connected pieces of the set; components are ordered by their
// smallest cell id, cells inside by id.
inline std::vector<ComponentSummary> components(const CellSet& set, Metric metric) {
  const std::int64_t side = set.side();
  detail::UnionFind uf(set.capacity());
  for (CellIndex c : set.cells())
    for (auto [di, dj] : detail::cell_steps(metric)) {
      const CellIndex d{wrap(c.i + di, side), wrap(c.j + dj, side)};
      if (set.contains(d)) uf.unite(set.id(c), set.id(d));
    }
  std::unordered_map<std::size_t, std::size_t> slot;
  std::vector<ComponentSummary> out;
  for (CellIndex c : set.cells()) {
    const std::size_t root = uf.find(set.id(c));
    auto [it, fresh] = slot.try_emplace(root, out.size());
    if (fresh) out.push_back({out.size(), {}, 0});
    out[it->second].cells.push_back(c);
  }
  for (auto& comp : out) comp.diameter = diameter(comp.cells, metric, side);
  return out;
}

struct UbiquityConstants {
  double a = 1e8;
  double b = 1e6;
  double b_prime = 11e6;
};

struct PrefixCheck {
  std::size_t j = 0;
  std::int64_t diameter = 0;
  double bound = 0.0;
  bool ok = true;
};

struct UbiquityReport {
  double epsilon = 0.0;
  UbiquityConstants constants;
  std::int64_t side = 0;
  std::size_t size = 0;
  double required_size = 0.0;
  bool connected = false;
  bool density_ok = false;
  std::vector<PrefixCheck> prefix;  // complement components, diameters descending
  bool prefix_ok = true;
  std::int64_t max_complement_diameter = 0;
  double max_diameter_bound = 0.0;
  bool max_diameter_ok = true;
  std::size_t large_components = 0;  // complement pieces of diameter > side/2

  bool ubiquitous() const { return connected && density_ok && prefix_ok; }
};

// (A / log(1/eps)) log(side^2 / j).
inline double diameter_bound(double epsilon, std::int64_t side, double j, const UbiquityConstants& c = {}) {
  return c.a / std::log(1.0 / epsilon) * std::log(static_cast<double>(side * side) / j);
}

// Checks l1-connectivity, density, and the diameter bound over collections
// made of whole l-infinity components of the complement (top-j prefixes).
inline UbiquityReport check_ubiquity(const CellSet& z, double epsilon, const UbiquityConstants& constants = {}) {
  require(epsilon > 0.0 && epsilon < 1.0, "ubiquity needs eps in (0,1)");
  UbiquityReport rep;
  rep.epsilon = epsilon;
  rep.constants = constants;
  rep.side = z.side();
  rep.size = z.size();
  const double cells = static_cast<double>(z.side() * z.side());
  rep.required_size = (1.0 - constants.a * epsilon) * cells;
  rep.connected = components(z, Metric::kL1).size() == 1;
  rep.density_ok = static_cast<double>(rep.size) >= rep.required_size;

  auto holes = components(z.complement(), Metric::kLInf);
  std::stable_sort(holes.begin(), holes.end(),
                   [](const ComponentSummary& a, const ComponentSummary& b) { return a.diameter > b.diameter; });
  for (std::size_t j = 1; j <= holes.size(); ++j) {
    PrefixCheck pc{j, holes[j - 1].diameter, diameter_bound(epsilon, z.side(), static_cast<double>(j), constants), true};
    pc.ok = static_cast<double>(pc.diameter) <= pc.bound;
    rep.prefix_ok = rep.prefix_ok && pc.ok;
    rep.prefix.push_back(pc);
  }
  rep.max_complement_diameter = holes.empty() ? 0 : holes.front().diameter;
  rep.max_diameter_bound = diameter_bound(epsilon, z.side(), 1.0, constants);
  rep.max_diameter_ok = static_cast<double>(rep.max_complement_diameter) <= rep.max_diameter_bound;
  for (const auto& h : holes) rep.large_components += 2 * h.diameter > z.side();
  return rep;
}

// Exact form of the diameter condition: for every collection of j disjoint
// l-infinity-connected non-empty subsets of the complement, the smallest
// diameter is at most the bound at j. Exhaustive; small complements only.
inline bool exact_diameter_condition(const CellSet& z, double epsilon, const UbiquityConstants& constants = {}) {
  require(epsilon > 0.0 && epsilon < 1.0, "ubiquity needs eps in (0,1)");
  const std::vector<CellIndex> free = z.complement().cells();
  require(free.size() <= 20, "exact check limited to complements of <= 20 cells");
  const std::int64_t side = z.side();
  const std::size_t m = free.size();
  if (m == 0) return true;

  // adjacency between complement cells in the l-infinity cell graph
  std::vector<std::uint32_t> adj(m, 0);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      if (a != b && cell_distance(free[a], free[b], Metric::kLInf, side) == 1) adj[a] |= 1u << b;

  // All connected subsets, by breadth-first growth over bitmasks.
  std::vector<char> visited(std::size_t{1} << m, 0);
  std::vector<std::uint32_t> subsets;
  for (std::size_t s = 0; s < m; ++s) {
    visited[std::size_t{1} << s] = 1;
    subsets.push_back(1u << s);
  }
  for (std::size_t head = 0; head < subsets.size(); ++head) {
    const std::uint32_t set = subsets[head];
    std::uint32_t border = 0;
    for (std::uint32_t b = set; b; b &= b - 1) border |= adj[static_cast<std::size_t>(__builtin_ctz(b))];
    for (border &= ~set; border; border &= border - 1) {
      const std::uint32_t next = set | (border & (~border + 1));
      if (!visited[next]) {
        visited[next] = 1;
        subsets.push_back(next);
      }
    }
  }
  // Diameter of every mask: drop the top cell and extend.
  std::vector<std::int64_t> dist(m * m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) dist[a * m + b] = cell_distance(free[a], free[b], Metric::kLInf, side);
  std::vector<std::int8_t> diam(std::size_t{1} << m, 0);
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    const auto top = static_cast<std::size_t>(31 - __builtin_clz(mask));
    const std::uint32_t rest = mask & ~(1u << top);
    std::int64_t d = diam[rest];
    for (std::uint32_t b = rest; b; b &= b - 1) d = std::max(d, dist[top * m + static_cast<std::size_t>(__builtin_ctz(b))]);
    diam[mask] = static_cast<std::int8_t>(d);
  }
  std::int64_t top = 0;
  for (std::uint32_t s : subsets) top = std::max<std::int64_t>(top, diam[s]);

  // For each threshold, pack as many disjoint connected subsets of diameter
  // >= delta as possible; only inclusion-minimal ones are needed, and S is
  // minimal iff every connected S - {c} has diameter < delta. The condition
  // fails iff delta exceeds the bound at that packing size.
  std::vector<std::int8_t> memo(std::size_t{1} << m);
  for (std::int64_t delta = 1; delta <= top; ++delta) {
    std::vector<std::vector<std::uint32_t>> by_low(m);
    for (std::uint32_t s : subsets) {
      if (diam[s] < delta) continue;
      bool minimal = true;
      for (std::uint32_t b = s; b && minimal; b &= b - 1) {
        const std::uint32_t smaller = s & ~(b & (~b + 1));
        if (smaller && visited[smaller] && diam[smaller] >= delta) minimal = false;
      }
      if (minimal) by_low[static_cast<std::size_t>(__builtin_ctz(s))].push_back(s);
    }
    std::fill(memo.begin(), memo.end(), std::int8_t{-1});
    const std::uint32_t all = (1u << m) - 1u;
    const auto pack = [&](auto&& self, std::uint32_t used) -> int {
      const std::uint32_t avail = ~used & all;
      if (!avail) return 0;
      if (memo[used] >= 0) return memo[used];
      const auto low = static_cast<std::size_t>(__builtin_ctz(avail));
      int best = self(self, used | (1u << low));
      for (std::uint32_t s : by_low[low])
        if (!(s & used)) best = std::max(best, 1 + self(self, used | s));
      memo[used] = static_cast<std::int8_t>(best);
      return best;
    };
    const int count = pack(pack, 0);
    if (count >= 1 && static_cast<double>(delta) > diameter_bound(epsilon, side, count, constants)) return false;
  }
  return true;
}

// N_d: cells in l-infinity components of diameter d; N'_d: diameter >= d.
struct DiameterStats {
  std::int64_t side = 0;
  std::vector<std::size_t> n_d;
  std::vector<std::size_t> n_prime;

  std::size_t count(std::int64_t d) const {
    return d >= 0 && static_cast<std::size_t>(d) < n_d.size() ? n_d[static_cast<std::size_t>(d)] : 0;
  }
  std::size_t at_least(std::int64_t d) const {
    if (d <= 0) return n_prime.empty() ? 0 : n_prime[0];
    return static_cast<std::size_t>(d) < n_prime.size() ? n_prime[static_cast<std::size_t>(d)] : 0;
  }
  // B side^2 eps^ceil((d+1)/4) and B' side^2 eps^ceil((d+1)/5); reported only.
  double bound(std::int64_t d, double eps, const UbiquityConstants& c = {}) const {
    return c.b * static_cast<double>(side * side) * std::pow(eps, static_cast<double>((d + 4) / 4));
  }
  double bound_prime(std::int64_t d, double eps, const UbiquityConstants& c = {}) const {
    return c.b_prime * static_cast<double>(side * side) * std::pow(eps, static_cast<double>((d + 5) / 5));
  }
};

inline DiameterStats component_diameter_stats(const CellSet& cells) {
  DiameterStats st;
  st.side = cells.side();
  const auto comps = components(cells, Metric::kLInf);
  std::int64_t top = 0;
  for (const auto& c : comps) top = std::max(top, c.diameter);
  st.n_d.assign(static_cast<std::size_t>(top + 1), 0);
  for (const auto& c : comps) st.n_d[static_cast<std::size_t>(c.diameter)] += c.size();
  st.n_prime.assign(st.n_d.size() + 1, 0);
  for (std::size_t d = st.n_d.size(); d-- > 0;) st.n_prime[d] = st.n_prime[d + 1] + st.n_d[d];
  return st;
}

struct NeedStableComponent {
  ComponentSummary component;
  bool qualifies = false;     // diameter <= side/2
  std::size_t matched = 0;    // core vertices in the cells with a partner in the core
  bool ok = true;
};

struct NeedStableReport {
  CheckReport::Status status = CheckReport::Status::kSkip;
  std::string detail;
  std::vector<NeedStableComponent> components;

  bool passed() const { return status == CheckReport::Status::kPass; }
  bool skipped() const { return status == CheckReport::Status::kSkip; }
};

// Core vertices inside the cells that have some matching partner in the core.
inline std::size_t matched_into_core(const std::vector<CellIndex>& cells, const Tessellation& tess,
                                     const MatchingTuple& m, const ActivationState& core) {
  std::size_t count = 0;
  for (CellIndex c : cells)
    tess.for_each_vertex(c, [&](Vertex v) {
      if (!core.test(v)) return;
      for (std::size_t j = 0; j < m.r(); ++j)
        if (core.test(m.partner(j, v))) {
          ++count;
          return;
        }
    });
  return count;
}

// Necessary condition on surviving inactive regions of M_r on L*(n,k,r):
// every l-infinity component of the cells touching the core with diameter
// at most side/2 holds >= 4 core vertices matched into the core.
inline NeedStableReport check_lemma_needstable(const AugmentedGraph& g, const ActivationState& core,
                                               const Tessellation& tess) {
  NeedStableReport rep;
  const std::int64_t n = g.lattice().side(), k = g.lattice().reach();
  const auto r = static_cast<std::int64_t>(g.matchings().r());
  if (!(n % 2 == 0 && 2 * r < 2 * k + 2 && 2 * k + 2 <= tess.t() && 2 * tess.t() <= n)) {
    rep.detail = "preconditions unmet: need 2r < 2k+2 <= t <= n/2 and even n";
    return rep;
  }
  require(core.size() == g.vertex_count(), "core state size mismatch");
  if (core.none()) {
    rep.status = CheckReport::Status::kPass;
    rep.detail = "empty core";
    return rep;
  }
  const CellSet touched = CellSet::touching(tess, core);
  const std::int64_t side = tess.cells_per_axis();
  std::size_t checked = 0;
  bool all_ok = true;
  for (auto& comp : components(touched, Metric::kLInf)) {
    NeedStableComponent nc;
    nc.qualifies = 2 * comp.diameter <= side;
    if (nc.qualifies) {
      nc.matched = matched_into_core(comp.cells, tess, g.matchings(), core);
      nc.ok = nc.matched >= 4;
      all_ok = all_ok && nc.ok;
      ++checked;
    }
    nc.component = std::move(comp);
    rep.components.push_back(std::move(nc));
  }
  rep.status = all_ok ? CheckReport::Status::kPass : CheckReport::Status::kFail;
  rep.detail = std::to_string(checked) + " of " + std::to_string(rep.components.size()) + " components checked";
  return rep;
}

// Stability of a collection of disjoint l-infinity-connected cell sets: each
// holds >= 4 vertices matched to a vertex anywhere in the collection. With
// a vertex filter, only filtered vertices count on both ends.
inline bool stable_collections_check(const std::vector<std::vector<CellIndex>>& collection, const Tessellation& tess,
                                     const MatchingTuple& m, const ActivationState* filter = nullptr) {
  const std::int64_t side = tess.cells_per_axis();
  CellSet all(side);
  for (const auto& set : collection) {
    require(!set.empty(), "stable collection needs non-empty sets");
    CellSet one(side);
    for (CellIndex c : set) {
      require(!all.contains(c), "stable collection sets must be disjoint");
      all.insert(c);
      one.insert(c);
    }
    require(components(one, Metric::kLInf).size() == 1, "stable collection sets must be l-infinity-connected");
  }
  ActivationState inside(m.vertex_count());
  for (CellIndex c : all.cells()) tess.for_each_vertex(c, [&](Vertex v) {
      if (!filter || filter->test(v)) inside.set(v);
    });
  for (const auto& set : collection)
    if (matched_into_core(set, tess, m, inside) < 4) return false;
  return true;
}

inline nlohmann::json to_json(const UbiquityReport& r) {
  nlohmann::json prefix = nlohmann::json::array();
  for (const auto& p : r.prefix) prefix.push_back({{"j", p.j}, {"diameter", p.diameter}, {"bound", p.bound}, {"ok", p.ok}});
  return {{"epsilon", r.epsilon},
          {"constants", {{"A", r.constants.a}, {"B", r.constants.b}, {"B_prime", r.constants.b_prime}}},
          {"side", r.side},
          {"size", r.size},
          {"required_size", r.required_size},
          {"connected", r.connected},
          {"density_ok", r.density_ok},
          {"prefix", prefix},
          {"prefix_ok", r.prefix_ok},
          {"max_complement_diameter", r.max_complement_diameter},
          {"max_diameter_bound", r.max_diameter_bound},
          {"max_diameter_ok", r.max_diameter_ok},
          {"large_components", r.large_components},
          {"ubiquitous", r.ubiquitous()}};
}

inline nlohmann::json to_json(const DiameterStats& st, double eps, const UbiquityConstants& c = {}) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t d = 0; d < st.n_d.size(); ++d) {
    const auto di = static_cast<std::int64_t>(d);
    rows.push_back({{"d", d},
                    {"N", st.count(di)},
                    {"N_prime", st.at_least(di)},
                    {"bound_N", st.bound(di, eps, c)},
                    {"bound_N_prime", st.bound_prime(di, eps, c)}});
  }
  return rows;
}

}  // namespace majperc
