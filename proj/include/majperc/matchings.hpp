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
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "majperc/common.hpp"
#include "majperc/lattice.hpp"
#include "majperc/rng.hpp"

namespace majperc {

enum class Provenance { kDeterministic, kSampled };

// r perfect matchings of the n^2 torus vertices, each stored as a partner
// map: partners[j][v] is the vertex matched to v by matching j.
struct MatchingTuple {
  std::int64_t n = 0;
  std::vector<std::vector<Vertex>> partners;
  Provenance provenance = Provenance::kDeterministic;
  std::optional<std::uint64_t> seed;

  std::size_t r() const { return partners.size(); }
  std::size_t vertex_count() const { return static_cast<std::size_t>(n * n); }
  Vertex partner(std::size_t j, Vertex v) const { return partners[j][v]; }

  // True iff {u, v} is an edge of some matching other than skip.
  bool has_edge(Vertex u, Vertex v, std::size_t skip = SIZE_MAX) const {
    for (std::size_t j = 0; j < partners.size(); ++j)
      if (j != skip && partners[j][u] == v) return true;
    return false;
  }

  static MatchingTuple empty(std::int64_t n) { return {n, {}, Provenance::kDeterministic, {}}; }

  friend bool operator==(const MatchingTuple&, const MatchingTuple&) = default;
};

// Cyclic construction: matching j (0-based) pairs (x, y) with
// (n/2 + (x + j) mod n/2, y) for x < n/2. Matching edges keep y fixed while
// every L(n,k) edge changes y by +-1, so the tuple is k-admissible.
inline MatchingTuple deterministic_admissible(std::int64_t n, std::int64_t k,
                                              std::int64_t r) {
  require(n >= 2 && n % 2 == 0, "matchings need an even torus side");
  require(2 * k + 1 <= n, "L(n,k) needs 2k+1 <= n");
  require(r >= 0 && r <= n / 2, "cyclic construction needs r <= n/2");
  const std::int64_t half = n / 2;
  MatchingTuple m = MatchingTuple::empty(n);
  m.partners.assign(static_cast<std::size_t>(r),
                    std::vector<Vertex>(static_cast<std::size_t>(n * n)));
  for (std::int64_t j = 0; j < r; ++j) {
    auto& p = m.partners[static_cast<std::size_t>(j)];
    for (std::int64_t y = 0; y < n; ++y)
      for (std::int64_t x = 0; x < half; ++x) {
        const auto u = static_cast<Vertex>(y * n + x);
        const auto v = static_cast<Vertex>(y * n + half + (x + j) % half);
        p[u] = v;
        p[v] = u;
      }
  }
  return m;
}

enum class ViolationKind { kMalformed, kLatticeEdge, kDuplicateEdge };

struct Violation {
  ViolationKind kind;
  std::size_t matching;
  Vertex u;
  Vertex v;
  std::string describe(std::int64_t n) const {
    const auto a = TorusPoint::from_index(u, n), b = TorusPoint::from_index(v, n);
    const std::string edge = "{(" + std::to_string(a.x) + "," + std::to_string(a.y) +
                             "),(" + std::to_string(b.x) + "," + std::to_string(b.y) + ")}";
    switch (kind) {
      case ViolationKind::kMalformed:
        return "matching " + std::to_string(matching) + " is not a perfect matching at " + edge;
      case ViolationKind::kLatticeEdge:
        return "matching " + std::to_string(matching) + " edge " + edge + " collides with a lattice edge";
      case ViolationKind::kDuplicateEdge:
        return "matching " + std::to_string(matching) + " edge " + edge + " duplicates another matching";
    }
    return {};
  }
};

struct AdmissibilityReport {
  bool admissible = true;
  std::size_t violation_count = 0;
  std::vector<Violation> violations;  // first few, for messages
};

inline AdmissibilityReport is_admissible(const MatchingTuple& m,
                                         const LatticeSpec& spec) {
  constexpr std::size_t kKeep = 16;
  AdmissibilityReport report;
  const auto flag = [&](ViolationKind kind, std::size_t j, Vertex u, Vertex v) {
    report.admissible = false;
    ++report.violation_count;
    if (report.violations.size() < kKeep) report.violations.push_back({kind, j, u, v});
  };
  if (m.n != spec.n) {
    flag(ViolationKind::kMalformed, 0, 0, 0);
    return report;
  }
  const LatticeGraph lattice(spec);
  const std::size_t nv = m.vertex_count();
  for (std::size_t j = 0; j < m.r(); ++j) {
    const auto& p = m.partners[j];
    if (p.size() != nv) {
      flag(ViolationKind::kMalformed, j, 0, 0);
      continue;
    }
    for (std::size_t v = 0; v < nv; ++v) {
      const Vertex u = p[v];
      if (u >= nv || u == v || p[u] != v) {
        flag(ViolationKind::kMalformed, j, static_cast<Vertex>(v), u < nv ? u : 0);
        continue;
      }
      if (u < v) continue;  // each edge once
      if (lattice.adjacent(static_cast<Vertex>(v), u))
        flag(ViolationKind::kLatticeEdge, j, static_cast<Vertex>(v), u);
      for (std::size_t i = 0; i < j; ++i)
        if (m.partners[i].size() == nv && m.partners[i][v] == u)
          flag(ViolationKind::kDuplicateEdge, j, static_cast<Vertex>(v), u);
    }
  }
  return report;
}

struct SamplerOptions {
  // Admissibility-preserving random switches run after repair, in units of
  // (number of vertices) attempts per matching.
  double mixing_sweeps = 2.0;
  // Floor on mixing attempts per matching, for small tori.
  std::size_t min_mixing_attempts = 1024;
};

namespace detail {

// Switch state for building one tuple. Matching j is "live"; conflicts are
// checked against the lattice and every other matching already present.
class SwitchSampler {
 public:
  SwitchSampler(const LatticeGraph& lattice, MatchingTuple& m, Rng& rng)
      : lattice_(lattice), m_(m), rng_(rng), nv_(m.vertex_count()) {}

  bool conflicts(std::size_t j, Vertex u, Vertex v) const {
    return u == v || lattice_.adjacent(u, v) || m_.has_edge(u, v, j);
  }

  void draw_uniform_pairing(std::size_t j) {
    std::vector<Vertex> order(nv_);
    for (std::size_t v = 0; v < nv_; ++v) order[v] = static_cast<Vertex>(v);
    shuffle(std::span<Vertex>(order), rng_);
    auto& p = m_.partners[j];
    for (std::size_t i = 0; i + 1 < nv_; i += 2) {
      p[order[i]] = order[i + 1];
      p[order[i + 1]] = order[i];
    }
  }

  // Replace the edge at u and a uniformly random other edge by the two
  // cross edges, u-w and v-w', when neither cross edge conflicts.
  bool try_switch(std::size_t j, Vertex u) {
    auto& p = m_.partners[j];
    const Vertex v = p[u];
    Vertex w;
    do {
      w = static_cast<Vertex>(uniform_below(rng_, nv_));
    } while (w == u || w == v);
    const Vertex w2 = p[w];
    if (conflicts(j, u, w) || conflicts(j, v, w2)) return false;
    p[u] = w;
    p[w] = u;
    p[v] = w2;
    p[w2] = v;
    return true;
  }

  void repair(std::size_t j) {
    auto& p = m_.partners[j];
    std::vector<Vertex> pending;
    for (std::size_t v = 0; v < nv_; ++v)
      if (v < p[v] && conflicts(j, static_cast<Vertex>(v), p[v]))
        pending.push_back(static_cast<Vertex>(v));
    const std::size_t cap = 100 * (pending.size() + 1);
    std::size_t attempts = 0;
    while (!pending.empty()) {
      const Vertex u = pending.back();
      if (!conflicts(j, u, p[u])) {  // already removed by an earlier switch
        pending.pop_back();
        continue;
      }
      if (attempts++ >= cap)
        throw SamplingError("matching repair did not converge within " +
                            std::to_string(cap) + " switch attempts");
      if (try_switch(j, u)) pending.pop_back();
    }
  }

  void mix(double sweeps, std::size_t floor) {
    if (m_.r() == 0 || nv_ < 4) return;
    const auto per_matching =
        std::max(floor, static_cast<std::size_t>(sweeps * static_cast<double>(nv_)));
    const std::size_t attempts = per_matching * m_.r();
    for (std::size_t a = 0; a < attempts; ++a) {
      const auto j = static_cast<std::size_t>(uniform_below(rng_, m_.r()));
      const auto u = static_cast<Vertex>(uniform_below(rng_, nv_));
      try_switch(j, u);
    }
  }

 private:
  const LatticeGraph& lattice_;
  MatchingTuple& m_;
  Rng& rng_;
  std::size_t nv_;
};

}  // namespace detail

// Pair-and-repair sampler: a uniform pairing per matching, conflicts removed
// by local switches, then a mixing run of admissibility-preserving switches
// (a symmetric chain, so its stationary law is uniform on admissible tuples).
inline MatchingTuple sample_admissible(std::int64_t n, std::int64_t k, std::int64_t r,
                                       std::uint64_t seed,
                                       SamplerOptions options = {}) {
  require(n >= 2 && n % 2 == 0, "matchings need an even torus side");
  require(2 * k + 1 <= n, "L(n,k) needs 2k+1 <= n");
  require(r >= 0, "r must be non-negative");
  require(4 * k + r + 1 < n * n - 1, "too many forbidden partners per vertex");
  const LatticeGraph lattice(LatticeSpec::lattice(n, k));
  MatchingTuple m = MatchingTuple::empty(n);
  m.provenance = Provenance::kSampled;
  m.seed = seed;
  Rng rng(seed);
  detail::SwitchSampler sampler(lattice, m, rng);
  for (std::int64_t j = 0; j < r; ++j) {
    m.partners.emplace_back(m.vertex_count());
    sampler.draw_uniform_pairing(static_cast<std::size_t>(j));
    sampler.repair(static_cast<std::size_t>(j));
  }
  sampler.mix(options.mixing_sweeps, options.min_mixing_attempts);
  return m;
}

// L*(n,k,r): L(n,k) plus the matching edges. (4k+r+2)-regular.
class AugmentedGraph {
 public:
  AugmentedGraph(const LatticeSpec& spec, std::shared_ptr<const MatchingTuple> m)
      : lattice_(spec), matchings_(std::move(m)) {
    require(spec.family == Family::kLattice, "L* is built on L(n,k)");
    const auto report = is_admissible(*matchings_, spec);
    if (!report.admissible)
      throw PreconditionError("inadmissible matching tuple: " +
                              report.violations.front().describe(spec.n));
  }

  const LatticeGraph& lattice() const { return lattice_; }
  const MatchingTuple& matchings() const { return *matchings_; }
  std::size_t vertex_count() const { return lattice_.vertex_count(); }
  std::size_t degree(Vertex) const { return uniform_degree(); }
  std::size_t uniform_degree() const {
    return lattice_.uniform_degree() + matchings_->r();
  }

  template <class F>
  void for_each_neighbor(Vertex v, F&& f) const {
    lattice_.for_each_neighbor(v, f);
    for (const auto& p : matchings_->partners) f(p[v]);
  }

 private:
  LatticeGraph lattice_;
  std::shared_ptr<const MatchingTuple> matchings_;
};

inline AugmentedGraph augmented_graph(const LatticeSpec& spec, MatchingTuple m) {
  return AugmentedGraph(spec, std::make_shared<const MatchingTuple>(std::move(m)));
}

inline nlohmann::json to_json(const MatchingTuple& m) {
  nlohmann::json j;
  j["n"] = m.n;
  j["r"] = m.r();
  j["partners"] = m.partners;
  j["seed"] = m.seed ? nlohmann::json(std::to_string(*m.seed)) : nlohmann::json(nullptr);
  return j;
}

inline MatchingTuple matching_from_json(const nlohmann::json& j) {
  MatchingTuple m;
  m.n = j.at("n").get<std::int64_t>();
  m.partners = j.at("partners").get<std::vector<std::vector<Vertex>>>();
  require(m.r() == j.at("r").get<std::size_t>(), "matching JSON: r does not match partners");
  if (j.contains("seed") && !j["seed"].is_null()) {
    m.seed = std::stoull(j["seed"].get<std::string>());
    m.provenance = Provenance::kSampled;
  }
  return m;
}

}  // namespace majperc
