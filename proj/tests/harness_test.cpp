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
#include "majperc/harness.hpp"

#include <gtest/gtest.h>

#include <cstdlib>

namespace majperc {
namespace {

ExperimentConfig small_star(std::vector<double> grid = {0.5}, std::int64_t trials = 4) {
  ExperimentConfig cfg;
  cfg.n = 32;
  cfg.k = 2;
  cfg.r = 1;
  cfg.graph = GraphKind::kStar;
  cfg.p_grid = std::move(grid);
  cfg.trials = trials;
  cfg.base_seed = 99;
  return cfg;
}

TEST(Config, Validation) {
  ExperimentConfig cfg = small_star();
  EXPECT_NO_THROW(cfg.validate());
  cfg.n = 33;
  EXPECT_THROW(cfg.validate(), PreconditionError);  // L* needs even n
  cfg = small_star();
  cfg.k = 16;
  EXPECT_THROW(cfg.validate(), PreconditionError);
  cfg = small_star({1.5});
  EXPECT_THROW(cfg.validate(), PreconditionError);
  cfg = small_star();
  cfg.trials = 0;
  EXPECT_THROW(cfg.validate(), PreconditionError);
  cfg = small_star();
  cfg.t = 40;
  EXPECT_THROW(cfg.validate(), PreconditionError);
}

TEST(Config, DefaultTessellationSide) {
  ExperimentConfig cfg = small_star();
  std::vector<std::string> warnings;
  EXPECT_EQ(cfg.effective_t(&warnings), 16);  // 100 * 8 capped at n/2
  ASSERT_EQ(warnings.size(), 1u);
  cfg.k = 1;
  cfg.n = 1000;
  warnings.clear();
  EXPECT_EQ(cfg.effective_t(&warnings), 100);
  EXPECT_TRUE(warnings.empty());
  cfg.t = 7;
  EXPECT_EQ(cfg.effective_t(), 7);
  EXPECT_NEAR(cfg.log_epsilon(), 0.0, 1e-15);
  cfg.k = 10;
  EXPECT_NEAR(cfg.epsilon(), 1e-100, 1e-110);
}

TEST(Config, HashIgnoresThreads) {
  ExperimentConfig a = small_star(), b = small_star();
  b.threads = 8;
  EXPECT_EQ(a.config_hash(), b.config_hash());
  EXPECT_EQ(a.config_hash().size(), 16u);
  b.base_seed = 100;
  EXPECT_NE(a.config_hash(), b.config_hash());
}

TEST(Trial, Endpoints) {
  const TrialRecord full = run_trial(small_star({1.0}), 0);
  EXPECT_TRUE(full.disseminated);
  EXPECT_EQ(full.rounds, 0u);
  EXPECT_EQ(full.inactive, 0u);
  const TrialRecord none = run_trial(small_star({0.0}), 0);
  EXPECT_FALSE(none.disseminated);
  EXPECT_EQ(none.inactive, 32u * 32u);
  ExperimentConfig lat = small_star({0.0});
  lat.graph = GraphKind::kLattice;
  EXPECT_EQ(run_trial(lat, 3).inactive, 32u * 32u);
}

TEST(Trial, Deterministic) {
  const ExperimentConfig cfg = small_star({0.35});
  for (std::uint64_t t = 0; t < 3; ++t) {
    const TrialRecord a = run_trial(cfg, t), b = run_trial(cfg, t);
    EXPECT_EQ(a, b);
    EXPECT_EQ(trial_json_line(a, "h"), trial_json_line(b, "h"));
  }
  EXPECT_NE(trial_seed(cfg, 0), trial_seed(cfg, 1));
}

TEST(Trial, InitialSetsNestedInP) {
  const TrialRunner runner(small_star());
  for (std::uint64_t t = 0; t < 4; ++t) {
    const ActivationState lo = runner.initial(0.2, t), hi = runner.initial(0.6, t);
    EXPECT_TRUE(lo.is_subset_of(hi));
  }
}

TEST(Trial, MatchingReuse) {
  ExperimentConfig cfg = small_star();
  const TrialRunner fresh(cfg);
  EXPECT_NE(*fresh.matching_for(0), *fresh.matching_for(1));
  cfg.fixed_matching = true;
  const TrialRunner fixed(cfg);
  EXPECT_EQ(fixed.matching_for(0), fixed.matching_for(5));
  cfg.fixed_matching = false;
  cfg.matching = MatchingSource::kDeterministic;
  EXPECT_EQ(*TrialRunner(cfg).matching_for(2), deterministic_admissible(32, 2, 1));
}

TEST(Trial, CoreConditionRecorded) {
  ExperimentConfig cfg;
  cfg.n = 128;
  cfg.k = 4;
  cfg.r = 2;
  cfg.t = 32;
  cfg.p_grid = {0.2};
  cfg.base_seed = 5;
  ASSERT_TRUE(cfg.lemma42_applicable());
  for (std::uint64_t t = 0; t < 3; ++t) {
    const TrialRecord rec = run_trial(cfg, t);
    EXPECT_EQ(rec.lemma42, "pass");
    EXPECT_FALSE(rec.components.empty());
  }
  cfg.t = 8;  // 2k+2 > t
  EXPECT_FALSE(cfg.lemma42_applicable());
  EXPECT_EQ(run_trial(cfg, 0).lemma42, "skip");
}

TEST(Scan, EndpointGrid) {
  const ScanResult res = run_scan(small_star({0.0, 1.0}, 5));
  ASSERT_EQ(res.points.size(), 2u);
  EXPECT_EQ(res.points[0].freq, 0.0);
  EXPECT_EQ(res.points[1].freq, 1.0);
  EXPECT_TRUE(res.monotone_ok);
  EXPECT_EQ(res.records.size(), 10u);
}

TEST(Scan, ThreadCountInvariant) {
  ExperimentConfig cfg = small_star({0.3, 0.4, 0.5}, 12);
  cfg.threads = 1;
  const ScanResult one = run_scan(cfg);
  for (unsigned th : {2u, 4u, 8u}) {
    cfg.threads = th;
    const ScanResult many = run_scan(cfg);
    EXPECT_EQ(scan_csv(one), scan_csv(many));
    EXPECT_EQ(scan_jsonl(one), scan_jsonl(many));
  }
}

TEST(Scan, WilsonInterval) {
  auto [lo, hi] = wilson_interval(5, 10);
  EXPECT_NEAR(lo, 0.236593, 1e-6);
  EXPECT_NEAR(hi, 0.763407, 1e-6);
  std::tie(lo, hi) = wilson_interval(0, 20);
  EXPECT_EQ(lo, 0.0);
  EXPECT_NEAR(hi, 0.161125, 1e-6);
  for (std::size_t n : {1u, 7u, 50u, 200u})
    for (std::size_t x = 0; x <= n; ++x) {
      std::tie(lo, hi) = wilson_interval(x, n);
      const double ph = static_cast<double>(x) / static_cast<double>(n);
      EXPECT_LE(lo, ph + 1e-12);
      EXPECT_GE(hi, ph - 1e-12);
    }
}

TEST(Scan, MonotoneCheck) {
  std::vector<ScanPoint> pts{{0.1, 100, 90, 0.9, 0.83, 0.94}, {0.2, 100, 10, 0.1, 0.05, 0.17}};
  EXPECT_FALSE(scan_monotone(pts));
  pts[1] = {0.2, 100, 85, 0.85, 0.77, 0.91};
  EXPECT_TRUE(scan_monotone(pts));
  // Order of the grid does not matter.
  std::swap(pts[0], pts[1]);
  EXPECT_TRUE(scan_monotone(pts));
}

TEST(Scan, Outputs) {
  const ScanResult res = run_scan(small_star({0.0, 1.0}, 2));
  const std::string csv = scan_csv(res);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "p,trials,disseminated,freq,wilson_lo,wilson_hi,config_hash");
  EXPECT_NE(csv.find("1.000000,2,2,1.000000,"), std::string::npos);
  const auto j = nlohmann::json::parse(trial_json_line(res.records.front(), res.config_hash));
  for (const char* key : {"trial", "seed", "disseminated", "rounds", "inactive", "components", "lemma42", "config_hash"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_TRUE(j["seed"].is_string());
  EXPECT_EQ(j["config_hash"], res.config_hash);
}

TEST(Scan, ParseGrid) {
  const auto g = parse_p_grid("0.05:0.5:0.05");
  ASSERT_EQ(g.size(), 10u);
  EXPECT_EQ(g.front(), 0.05);
  EXPECT_EQ(g[2], 0.15);
  EXPECT_EQ(g.back(), 0.5);
  EXPECT_EQ(parse_p_grid("0:1:1"), (std::vector<double>{0.0, 1.0}));
  EXPECT_THROW(parse_p_grid("0.1-0.2"), PreconditionError);
  EXPECT_THROW(parse_p_grid("0.5:0.1:0.1"), PreconditionError);
  EXPECT_THROW(parse_p_grid("a:b:c"), PreconditionError);
}

TEST(Coupled, InclusionHolds) {
  ExperimentConfig cfg;
  cfg.n = 128;
  cfg.k = 4;
  cfg.r = 2;
  cfg.base_seed = 17;
  for (double p : {0.15, 0.25, 0.35})
    for (std::uint64_t t = 0; t < 3; ++t) {
      const CoupledRecord rec = coupled_trial(cfg, t, p);
      EXPECT_TRUE(rec.inclusion_holds);
      EXPECT_GE(rec.lattice.inactive, rec.star.inactive);
    }
  const CoupledRecord full = coupled_trial(cfg, 0, 1.0);
  EXPECT_TRUE(full.star.disseminated && full.lattice.disseminated);
  const CoupledRecord none = coupled_trial(cfg, 0, 0.0);
  EXPECT_EQ(none.star.inactive, 128u * 128u);
  EXPECT_EQ(none.lattice.inactive, 128u * 128u);
}

TEST(Threads, EnvironmentOverride) {
  ::setenv("MAJPERC_THREADS", "3", 1);
  EXPECT_EQ(resolve_threads(8), 3u);
  ::setenv("MAJPERC_THREADS", "junk", 1);
  EXPECT_EQ(resolve_threads(8), 8u);
  ::unsetenv("MAJPERC_THREADS");
  EXPECT_EQ(resolve_threads(2), 2u);
  EXPECT_GE(resolve_threads(0), 1u);
}

TEST(Threads, ParallelForFillsSlots) {
  std::vector<int> out(100, -1);
  parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], static_cast<int>(i * i));
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw std::runtime_error("x"); }), std::runtime_error);
}

}  // namespace
}  // namespace majperc
