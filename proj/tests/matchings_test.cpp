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
#include "majperc/matchings.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "gtest/gtest.h"
#include "majperc/engine.hpp"

namespace majperc {
namespace {

Vertex at(std::int64_t x, std::int64_t y, std::int64_t n) {
  return TorusPoint::reduced(x, y, n).index(n);
}

TEST(DeterministicMatchingTest, SingleMatchingOnFourTorus) {
  const auto m = deterministic_admissible(4, 1, 1);
  ASSERT_EQ(m.r(), 1u);
  for (std::int64_t y = 0; y < 4; ++y) {
    // 1-based {(1,y),(3,y)} and {(2,y),(4,y)}
    EXPECT_EQ(m.partner(0, at(0, y, 4)), at(2, y, 4));
    EXPECT_EQ(m.partner(0, at(1, y, 4)), at(3, y, 4));
  }
  EXPECT_TRUE(is_admissible(m, LatticeSpec::lattice(4, 1)).admissible);
}

TEST(DeterministicMatchingTest, TwoMatchingsAreEdgeDisjoint) {
  const auto m = deterministic_admissible(4, 1, 2);
  for (Vertex v = 0; v < 16; ++v) EXPECT_NE(m.partner(0, v), m.partner(1, v));
  EXPECT_TRUE(is_admissible(m, LatticeSpec::lattice(4, 1)).admissible);
}

TEST(DeterministicMatchingTest, RejectsTooManyMatchings) {
  EXPECT_THROW(deterministic_admissible(4, 1, 3), PreconditionError);
  EXPECT_THROW(deterministic_admissible(5, 1, 1), PreconditionError);
}

TEST(DeterministicMatchingTest, AdmissibleAcrossParameters) {
  for (std::int64_t n : {4, 6, 10, 16})
    for (std::int64_t k = 1; 2 * k + 1 <= n; ++k)
      for (std::int64_t r = 0; r <= n / 2; ++r)
        ASSERT_TRUE(is_admissible(deterministic_admissible(n, k, r),
                                  LatticeSpec::lattice(n, k)).admissible)
            << n << " " << k << " " << r;
}

TEST(AdmissibilityTest, ReportsLatticeCollision) {
  auto m = deterministic_admissible(6, 1, 1);
  // Force {(0,0),(1,1)} into the matching by swapping partners.
  const Vertex a = at(0, 0, 6), b = at(1, 1, 6);
  const Vertex pa = m.partners[0][a], pb = m.partners[0][b];
  m.partners[0][a] = b;
  m.partners[0][b] = a;
  m.partners[0][pa] = pb;
  m.partners[0][pb] = pa;
  const auto report = is_admissible(m, LatticeSpec::lattice(6, 1));
  EXPECT_FALSE(report.admissible);
  ASSERT_FALSE(report.violations.empty());
  EXPECT_EQ(report.violations.front().kind, ViolationKind::kLatticeEdge);
}

TEST(AdmissibilityTest, ReportsDuplicateMatching) {
  auto m = deterministic_admissible(6, 1, 1);
  m.partners.push_back(m.partners.front());
  const auto report = is_admissible(m, LatticeSpec::lattice(6, 1));
  EXPECT_FALSE(report.admissible);
  EXPECT_EQ(report.violations.front().kind, ViolationKind::kDuplicateEdge);
  EXPECT_EQ(report.violation_count, 18u);
}

TEST(AdmissibilityTest, ReportsMalformedPartnerMap) {
  auto m = deterministic_admissible(4, 1, 1);
  m.partners[0][0] = 0;
  EXPECT_FALSE(is_admissible(m, LatticeSpec::lattice(4, 1)).admissible);
}

TEST(SampledMatchingTest, ValidAndDeterministic) {
  const auto a = sample_admissible(16, 2, 1, 42);
  EXPECT_TRUE(is_admissible(a, LatticeSpec::lattice(16, 2)).admissible);
  EXPECT_EQ(a, sample_admissible(16, 2, 1, 42));
  EXPECT_NE(a, sample_admissible(16, 2, 1, 43));
  EXPECT_EQ(a.provenance, Provenance::kSampled);
  EXPECT_EQ(a.seed, 42u);
}

TEST(SampledMatchingTest, PropertyAdmissibleInvolutions) {
  std::uint64_t seed = 1;
  for (std::int64_t n : {4, 6, 8, 12, 20})
    for (std::int64_t k = 1; 2 * k + 1 <= n && k <= 4; ++k)
      for (std::int64_t r : {0, 1, 2, 3}) {
        if (4 * k + r + 1 >= n * n - 1) continue;
        const auto m = sample_admissible(n, k, r, seed++);
        ASSERT_EQ(m.r(), static_cast<std::size_t>(r));
        ASSERT_TRUE(is_admissible(m, LatticeSpec::lattice(n, k)).admissible);
        for (const auto& p : m.partners)
          for (Vertex v = 0; v < p.size(); ++v) {
            ASSERT_NE(p[v], v);
            ASSERT_EQ(p[p[v]], v);
          }
      }
}

TEST(SampledMatchingTest, RejectsInfeasibleParameters) {
  EXPECT_THROW(sample_admissible(7, 1, 1, 0), PreconditionError);
  EXPECT_THROW(sample_admissible(4, 2, 1, 0), PreconditionError);
}

// Every admissible perfect matching of the 16 vertices of L(4,1), counted by
// the partner of vertex 0.
std::map<Vertex, double> exact_partner_law_n4() {
  const LatticeGraph lattice(LatticeSpec::lattice(4, 1));
  std::vector<Vertex> partner(16, 16);
  std::map<Vertex, double> counts;
  double total = 0;
  std::function<void()> extend = [&]() {
    Vertex u = 0;
    while (u < 16 && partner[u] != 16) ++u;
    if (u == 16) {
      counts[partner[0]] += 1;
      total += 1;
      return;
    }
    for (Vertex v = u + 1; v < 16; ++v) {
      if (partner[v] != 16 || lattice.adjacent(u, v)) continue;
      partner[u] = v;
      partner[v] = u;
      extend();
      partner[u] = partner[v] = 16;
    }
  };
  extend();
  for (auto& [v, c] : counts) c /= total;
  return counts;
}

TEST(SampledMatchingTest, PartnerLawMatchesExhaustiveEnumeration) {
  const auto exact = exact_partner_law_n4();
  ASSERT_EQ(exact.size(), 9u);  // 15 candidates minus 6 lattice neighbours
  constexpr int kSamples = 100000;
  std::map<Vertex, int> hits;
  for (int s = 0; s < kSamples; ++s) ++hits[sample_admissible(4, 1, 1, 1000 + s).partner(0, 0)];
  for (const auto& [v, f] : exact) {
    const double observed = static_cast<double>(hits[v]) / kSamples;
    const double se = std::sqrt(f * (1 - f) / kSamples);
    EXPECT_LE(std::abs(observed - f), 3 * se) << "partner " << v << " exact " << f;
  }
  for (const auto& [v, c] : hits) EXPECT_TRUE(exact.count(v)) << v;
}

// At n=8 exhaustive enumeration is out of reach (~10^40 matchings), so the
// reference is exact rejection sampling: uniform pairings kept only when
// admissible, which is uniform on admissible matchings by construction.
TEST(SampledMatchingTest, PartnerLawMatchesRejectionSamplerAtN8) {
  const LatticeGraph lattice(LatticeSpec::lattice(8, 1));
  constexpr int kSamples = 100000;
  std::map<Vertex, int> reference, sampled;
  Rng rng(99);
  std::vector<Vertex> order(64);
  for (int got = 0; got < kSamples;) {
    for (Vertex v = 0; v < 64; ++v) order[v] = v;
    shuffle(std::span<Vertex>(order), rng);
    bool ok = true;
    Vertex mate0 = 0;
    for (int i = 0; i < 64 && ok; i += 2) {
      ok = !lattice.adjacent(order[i], order[i + 1]);
      if (order[i] == 0) mate0 = order[i + 1];
      if (order[i + 1] == 0) mate0 = order[i];
    }
    if (!ok) continue;
    ++reference[mate0];
    ++got;
  }
  for (int s = 0; s < kSamples; ++s) ++sampled[sample_admissible(8, 1, 1, 5000 + s).partner(0, 0)];
  EXPECT_EQ(reference.size(), 57u);
  for (Vertex v = 1; v < 64; ++v) {
    if (lattice.adjacent(0, v)) {
      EXPECT_EQ(sampled[v], 0);
      continue;
    }
    const double a = static_cast<double>(reference[v]) / kSamples;
    const double b = static_cast<double>(sampled[v]) / kSamples;
    const double se = std::sqrt((a * (1 - a) + b * (1 - b)) / kSamples);
    EXPECT_LE(std::abs(a - b), 3 * se) << "partner " << v;
  }
}

TEST(AugmentedGraphTest, DegreeAndThreshold) {
  const auto spec = LatticeSpec::lattice(16, 2);
  const auto g = augmented_graph(spec, sample_admissible(16, 2, 1, 3));
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    std::size_t deg = 0;
    g.for_each_neighbor(v, [&](Vertex) { ++deg; });
    ASSERT_EQ(deg, 11u);
  }
  EXPECT_EQ(Rule::majority(1).threshold(g.uniform_degree()), 2 * 2 + 1 + 1);

  const auto plain = augmented_graph(spec, MatchingTuple::empty(16));
  EXPECT_EQ(plain.uniform_degree(), 10u);
  for (Vertex v = 0; v < plain.vertex_count(); v += 17)
    EXPECT_EQ(LatticeGraph(spec).neighbors(v).size(), plain.uniform_degree());
}

TEST(AugmentedGraphTest, RejectsInadmissibleTuple) {
  auto m = deterministic_admissible(8, 1, 1);
  m.partners.push_back(m.partners.front());
  EXPECT_THROW(augmented_graph(LatticeSpec::lattice(8, 1), m), PreconditionError);
}

// One synchronous round of M_r on L*(n,k,r) equals one round of "activate
// with >= 2k+r+1 active neighbours".
TEST(AugmentedGraphTest, MajorityRuleEqualsFixedThreshold) {
  for (std::int64_t r : {1, 2, 3}) {
    const std::int64_t n = 20, k = 3;
    const auto g = augmented_graph(LatticeSpec::lattice(n, k), sample_admissible(n, k, r, 11 * r));
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto s = random_initial(g.vertex_count(), 0.3 + 0.05 * seed, seed);
      EXPECT_EQ(step_synchronous(g, Rule::majority(r), s),
                step_synchronous(g, Rule::bootstrap(2 * k + r + 1), s));
    }
  }
}

TEST(MatchingJsonTest, RoundTrip) {
  for (const auto& m : {sample_admissible(10, 2, 2, 77), deterministic_admissible(6, 1, 3)}) {
    const auto j = to_json(m);
    EXPECT_EQ(j.at("r"), m.r());
    const auto back = matching_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(back, m);
  }
}

}  // namespace
}  // namespace majperc
