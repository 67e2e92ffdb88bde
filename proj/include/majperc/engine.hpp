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

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <vector>

#include "majperc/common.hpp"
#include "majperc/lattice.hpp"
#include "majperc/matchings.hpp"
#include "majperc/rng.hpp"
#include "majperc/state.hpp"

namespace majperc {

template <class G>
concept Graph = requires(const G& g, Vertex v) {
  { g.vertex_count() } -> std::convertible_to<std::size_t>;
  { g.degree(v) } -> std::convertible_to<std::size_t>;
  g.for_each_neighbor(v, [](Vertex) {});
};

enum class RuleKind { kBootstrap, kMajority };

// B_j: activate with >= j active neighbours.
// M_r: activate with >= ceil((deg + r) / 2) active neighbours.
struct Rule {
  RuleKind kind = RuleKind::kMajority;
  std::int64_t param = 1;

  static Rule bootstrap(std::int64_t j) {
    require(j >= 1, "j-neighbour rule needs j >= 1");
    return {RuleKind::kBootstrap, j};
  }
  static Rule majority(std::int64_t r) {
    require(r >= 0, "r-majority rule needs r >= 0");
    return {RuleKind::kMajority, r};
  }

  std::int64_t threshold(std::size_t degree) const {
    if (kind == RuleKind::kBootstrap) return param;
    return ceil_div(static_cast<std::int64_t>(degree) + param, 2);
  }

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct FinalState {
  ActivationState active;
  std::size_t rounds = 0;
  bool disseminated = false;

  std::size_t inactive_count() const { return active.size() - active.count(); }
};

namespace detail {

inline void add_lattice_counts(const LatticeGraph& g, const ActivationState& s,
                               std::vector<std::uint32_t>& counts) {
  const std::int64_t n = g.side();
  const std::int64_t k = g.reach();
  // window[y][x] = active vertices of row y in columns x-k .. x+k (cyclic).
  std::vector<std::uint32_t> window(static_cast<std::size_t>(n * n));
  for (std::int64_t y = 0; y < n; ++y) {
    const std::int64_t row = y * n;
    std::uint32_t sum = 0;
    for (std::int64_t c = -k; c <= k; ++c) sum += s.test(static_cast<std::size_t>(row + wrap(c, n)));
    for (std::int64_t x = 0; x < n; ++x) {
      window[static_cast<std::size_t>(row + x)] = sum;
      sum += s.test(static_cast<std::size_t>(row + wrap(x + k + 1, n)));
      sum -= s.test(static_cast<std::size_t>(row + wrap(x - k, n)));
    }
  }
  for (std::int64_t y = 0; y < n; ++y) {
    const std::int64_t up = wrap(y - 1, n) * n, down = wrap(y + 1, n) * n;
    for (std::int64_t x = 0; x < n; ++x)
      counts[static_cast<std::size_t>(y * n + x)] +=
          window[static_cast<std::size_t>(up + x)] + window[static_cast<std::size_t>(down + x)];
  }
}

}  // namespace detail

// Number of active neighbours of every vertex.
template <Graph G>
std::vector<std::uint32_t> active_neighbor_counts(const G& g, const ActivationState& s) {
  std::vector<std::uint32_t> counts(g.vertex_count(), 0);
  if constexpr (std::same_as<G, LatticeGraph>) {
    if (g.family() == Family::kLattice) {
      detail::add_lattice_counts(g, s, counts);
      return counts;
    }
  } else if constexpr (std::same_as<G, AugmentedGraph>) {
    detail::add_lattice_counts(g.lattice(), s, counts);
    for (const auto& p : g.matchings().partners)
      for (std::size_t v = 0; v < counts.size(); ++v) counts[v] += s.test(p[v]);
    return counts;
  }
  for (std::size_t v = 0; v < counts.size(); ++v) {
    std::uint32_t c = 0;
    g.for_each_neighbor(static_cast<Vertex>(v), [&](Vertex u) { c += s.test(u); });
    counts[v] = c;
  }
  return counts;
}

// One synchronous round: every inactive vertex meeting the threshold
// (counted on the input state) becomes active.
template <Graph G>
ActivationState step_synchronous(const G& g, const Rule& rule, const ActivationState& s) {
  require(s.size() == g.vertex_count(), "state size does not match graph");
  ActivationState next = s;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (s.test(v)) continue;
    std::int64_t c = 0;
    g.for_each_neighbor(static_cast<Vertex>(v), [&](Vertex u) { c += s.test(u); });
    if (c >= rule.threshold(g.degree(static_cast<Vertex>(v)))) next.set(v);
  }
  return next;
}

// Reference semantics: iterate synchronous rounds until nothing changes.
template <Graph G>
FinalState run_synchronous(const G& g, const Rule& rule, const ActivationState& initial) {
  FinalState out{initial, 0, false};
  for (;;) {
    ActivationState next = step_synchronous(g, rule, out.active);
    if (next == out.active) break;
    out.active = std::move(next);
    ++out.rounds;
  }
  out.disseminated = out.active.all();
  return out;
}

// Frontier-queue fixpoint. Activations are grouped by generation: a vertex
// joins generation t+1 when applying generation t lifts its active-neighbour
// count to the threshold, which is exactly the synchronous round in which it
// activates. Total work O(|V| + |E|).
template <Graph G>
FinalState run_to_fixpoint(const G& g, const Rule& rule, const ActivationState& initial) {
  require(initial.size() == g.vertex_count(), "state size does not match graph");
  FinalState out{initial, 0, false};
  ActivationState& active = out.active;
  std::vector<std::uint32_t> counts = active_neighbor_counts(g, initial);
  const auto threshold = [&](Vertex v) { return rule.threshold(g.degree(v)); };

  std::vector<Vertex> layer, next;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    const auto u = static_cast<Vertex>(v);
    if (!active.test(v) && static_cast<std::int64_t>(counts[v]) >= threshold(u)) layer.push_back(u);
  }
  for (Vertex v : layer) active.set(v);
  while (!layer.empty()) {
    ++out.rounds;
    next.clear();
    for (Vertex v : layer) {
      g.for_each_neighbor(v, [&](Vertex u) {
        ++counts[u];
        if (!active.test(u) && static_cast<std::int64_t>(counts[u]) >= threshold(u)) {
          active.set(u);
          next.push_back(u);
        }
      });
    }
    layer.swap(next);
  }
  out.disseminated = active.all();
  return out;
}

// Final inactive set through the k-core characterization: on a d-regular
// graph, B_j leaves inactive exactly the (d-j+1)-core of the subgraph
// induced by the initially inactive vertices. Peeling runs in index order.
template <Graph G>
ActivationState final_inactive_via_core(const G& g, const Rule& rule,
                                        const ActivationState& initial) {
  require(initial.size() == g.vertex_count(), "state size does not match graph");
  const std::size_t nv = g.vertex_count();
  const std::size_t d = nv == 0 ? 0 : g.degree(0);
  for (std::size_t v = 0; v < nv; ++v)
    require(g.degree(static_cast<Vertex>(v)) == d,
            "core characterization needs a regular graph");
  const std::int64_t core = static_cast<std::int64_t>(d) - rule.threshold(d) + 1;

  ActivationState in_core = initial.complement();
  std::vector<std::int64_t> deg(nv, 0);
  std::deque<Vertex> queue;
  for (std::size_t v = 0; v < nv; ++v) {
    if (!in_core.test(v)) continue;
    std::int64_t c = 0;
    g.for_each_neighbor(static_cast<Vertex>(v), [&](Vertex u) { c += in_core.test(u); });
    deg[v] = c;
    if (c < core) queue.push_back(static_cast<Vertex>(v));
  }
  for (Vertex v : queue) in_core.reset(v);
  while (!queue.empty()) {
    const Vertex v = queue.front();
    queue.pop_front();
    g.for_each_neighbor(v, [&](Vertex u) {
      if (!in_core.test(u)) return;
      if (--deg[u] < core) {
        in_core.reset(u);
        queue.push_back(u);
      }
    });
  }
  return in_core;
}

template <Graph G>
bool disseminates(const G& g, const Rule& rule, const ActivationState& initial) {
  return run_to_fixpoint(g, rule, initial).disseminated;
}

// Each vertex active independently with probability p.
inline ActivationState random_initial(std::size_t n_vertices, double p, std::uint64_t seed) {
  require(p >= 0.0 && p <= 1.0, "activation probability must lie in [0,1]");
  ActivationState s(n_vertices);
  Rng rng(seed);
  for (std::size_t v = 0; v < n_vertices; ++v)
    if (uniform01(rng) < p) s.set(v);
  return s;
}

}  // namespace majperc
