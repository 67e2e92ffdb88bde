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
#include "majperc/lattice.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "gtest/gtest.h"

namespace majperc {
namespace {

std::set<TorusPoint> as_set(const std::vector<TorusPoint>& pts) {
  return {pts.begin(), pts.end()};
}

TEST(LatticeTest, NeighborsOfOriginInL10_2) {
  const auto got = neighbors({0, 0}, LatticeSpec::lattice(10, 2));
  std::set<TorusPoint> expected;
  for (int i = -2; i <= 2; ++i) {
    expected.insert(TorusPoint::reduced(i, 1, 10));
    expected.insert(TorusPoint::reduced(i, 9, 10));
  }
  EXPECT_EQ(got.size(), 10u);
  EXPECT_EQ(as_set(got), expected);
}

TEST(LatticeTest, NeighborsInL1AndLinf) {
  const auto l1 = neighbors({0, 0}, LatticeSpec::l1(5));
  EXPECT_EQ(as_set(l1), (std::set<TorusPoint>{{1, 0}, {4, 0}, {0, 1}, {0, 4}}));
  EXPECT_EQ(as_set(neighbors({2, 3}, LatticeSpec::linf(5))).size(), 8u);
}

TEST(LatticeTest, WrappedNeighbourhoodIsRejected) {
  EXPECT_THROW(LatticeGraph(LatticeSpec::lattice(4, 2)), PreconditionError);
  EXPECT_NO_THROW(LatticeGraph(LatticeSpec::lattice(5, 2)));
}

TEST(LatticeTest, RegularSymmetricLoopFree) {
  for (auto spec : {LatticeSpec::lattice(7, 3), LatticeSpec::lattice(12, 2),
                    LatticeSpec::lattice(9, 1), LatticeSpec::l1(6), LatticeSpec::linf(3)}) {
    const LatticeGraph g(spec);
    const std::size_t expected = spec.family == Family::kLattice ? 4 * spec.k + 2
                                 : spec.family == Family::kL1    ? 4
                                                                 : 8;
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
      const auto nb = g.neighbors(v);
      const std::set<Vertex> distinct(nb.begin(), nb.end());
      ASSERT_EQ(distinct.size(), expected) << "v=" << v;
      ASSERT_FALSE(distinct.count(v));
      for (Vertex u : nb) {
        const auto back = g.neighbors(u);
        ASSERT_NE(std::find(back.begin(), back.end(), v), back.end());
        ASSERT_TRUE(g.adjacent(v, u));
      }
    }
    // adjacent() agrees with the enumerated neighbourhoods
    std::size_t edges = 0;
    for (Vertex u = 0; u < g.vertex_count(); ++u)
      for (Vertex v = 0; v < g.vertex_count(); ++v) edges += g.adjacent(u, v);
    EXPECT_EQ(edges, g.vertex_count() * expected);
  }
}

TEST(LatticeTest, TorusDistanceExamples) {
  EXPECT_EQ(torus_distance({0, 0}, {3, 4}, Metric::kL1, 10), 7);
  EXPECT_EQ(torus_distance({0, 0}, {9, 0}, Metric::kL1, 10), 1);
  EXPECT_EQ(torus_distance({0, 0}, {3, 4}, Metric::kLInf, 10), 4);
}

// Distances match BFS graph distance in L1(n) / Linf(n) and satisfy the
// triangle inequality.
TEST(LatticeTest, TorusDistanceIsGraphDistance) {
  for (std::int64_t n : {5, 8}) {
    for (auto [metric, spec] : {std::pair{Metric::kL1, LatticeSpec::l1(n)},
                                std::pair{Metric::kLInf, LatticeSpec::linf(n)}}) {
      const LatticeGraph g(spec);
      std::vector<std::int64_t> dist(g.vertex_count(), -1);
      std::vector<Vertex> frontier{0};
      dist[0] = 0;
      while (!frontier.empty()) {
        std::vector<Vertex> next;
        for (Vertex v : frontier)
          g.for_each_neighbor(v, [&](Vertex u) {
            if (dist[u] < 0) {
              dist[u] = dist[v] + 1;
              next.push_back(u);
            }
          });
        frontier.swap(next);
      }
      for (Vertex v = 0; v < g.vertex_count(); ++v)
        EXPECT_EQ(torus_distance({0, 0}, TorusPoint::from_index(v, n), metric, n), dist[v]);
    }
  }
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> coord(0, 12);
  for (int i = 0; i < 2000; ++i) {
    const TorusPoint a{coord(rng), coord(rng)}, b{coord(rng), coord(rng)}, c{coord(rng), coord(rng)};
    for (auto m : {Metric::kL1, Metric::kLInf}) {
      EXPECT_LE(torus_distance(a, c, m, 13), torus_distance(a, b, m, 13) + torus_distance(b, c, m, 13));
      EXPECT_EQ(torus_distance(a, b, m, 13), torus_distance(b, a, m, 13));
      EXPECT_EQ(torus_distance(a, b, m, 13) == 0, a == b);
    }
  }
}

TEST(TessellationTest, RemainderCells) {
  const auto tess = tessellate(10, 3);
  EXPECT_EQ(tess.cells_per_axis(), 3);
  EXPECT_EQ(tess.boundaries(), (std::vector<std::int64_t>{0, 3, 6, 10}));
  // C_22 covers 1-based [7,10], i.e. 0-based [6,10).
  EXPECT_EQ(tess.span(2).lo, 6);
  EXPECT_EQ(tess.span(2).hi, 10);
  EXPECT_EQ(tess.cell_of({0, 0}), (CellIndex{0, 0}));
  EXPECT_EQ(tess.cell_of({9, 9}), (CellIndex{2, 2}));
  for (std::int64_t i = 0; i < 3; ++i) {
    EXPECT_GE(tess.span(i).length(), 3);
    EXPECT_LT(tess.span(i).length(), 6);
  }
}

TEST(TessellationTest, ExactDivision) {
  const auto tess = tessellate(9, 3);
  for (std::int64_t i = 0; i < 3; ++i) EXPECT_EQ(tess.span(i).length(), 3);
}

TEST(TessellationTest, RejectsOversizedCells) {
  EXPECT_THROW(tessellate(5, 6), PreconditionError);
  EXPECT_THROW(tessellate(5, 0), PreconditionError);
}

TEST(TessellationTest, CellsPartitionTheTorus) {
  for (std::int64_t n : {7, 10, 16, 23})
    for (std::int64_t t = 1; t <= n; ++t) {
      const auto tess = tessellate(n, t);
      ASSERT_EQ(tess.cell_count(), static_cast<std::size_t>((n / t) * (n / t)));
      std::vector<int> hits(static_cast<std::size_t>(n * n), 0);
      for (std::size_t id = 0; id < tess.cell_count(); ++id) {
        const CellIndex c = tess.unflat(id);
        ASSERT_EQ(tess.flat(c), id);
        const auto xs = tess.span(c.i);
        ASSERT_GE(xs.length(), t);
        ASSERT_LT(xs.length(), 2 * t);
        tess.for_each_vertex(c, [&](Vertex v) {
          ++hits[v];
          ASSERT_EQ(tess.cell_of(TorusPoint::from_index(v, n)), c);
        });
      }
      for (int h : hits) ASSERT_EQ(h, 1);
    }
}

// Two L(n,k)-adjacent vertices lie in cells at cell-Linf distance <= 1
// whenever 2k+2 <= t.
TEST(TessellationTest, AdjacentVerticesInNeighbouringCells) {
  for (auto [n, k, t] : {std::tuple{24, 2, 6}, std::tuple{25, 3, 8}, std::tuple{30, 1, 4}}) {
    const LatticeGraph g(LatticeSpec::lattice(n, k));
    const auto tess = tessellate(n, t);
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
      const auto cv = tess.cell_of(TorusPoint::from_index(v, n));
      g.for_each_neighbor(v, [&](Vertex u) {
        ASSERT_LE(tess.cell_distance(cv, tess.cell_of(TorusPoint::from_index(u, n)), Metric::kLInf), 1);
      });
    }
  }
}

TEST(ExplicitGraphTest, RejectsMalformedAdjacency) {
  EXPECT_THROW(ExplicitGraph(std::vector<std::vector<Vertex>>{{1}, {}}), PreconditionError);
  EXPECT_THROW(ExplicitGraph(std::vector<std::vector<Vertex>>{{0}}), PreconditionError);
  const auto wheel = ExplicitGraph::wheel(5);
  EXPECT_EQ(wheel.degree(5), 5u);
  EXPECT_EQ(wheel.degree(0), 3u);
  const auto c = ExplicitGraph::circulant(10, {1, 3, 5});
  for (Vertex v = 0; v < 10; ++v) EXPECT_EQ(c.degree(v), 5u);
}

}  // namespace
}  // namespace majperc
