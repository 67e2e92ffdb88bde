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
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"
#include "majperc/common.hpp"
#include "majperc/engine.hpp"
#include "majperc/lattice.hpp"
#include "majperc/matchings.hpp"
#include "majperc/rng.hpp"
#include "majperc/state.hpp"
#include "majperc/ubiquity.hpp"

namespace majperc {

enum class GraphKind { kLattice, kStar };  // L(n,k) or L*(n,k,r)
enum class MatchingSource { kDeterministic, kSampled };

inline std::string to_string(GraphKind g) { return g == GraphKind::kLattice ? "lattice" : "star"; }
inline std::string to_string(MatchingSource m) { return m == MatchingSource::kDeterministic ? "det" : "sample"; }

struct ExperimentConfig {
  std::int64_t n = 64;
  std::int64_t k = 2;
  std::int64_t r = 1;
  GraphKind graph = GraphKind::kStar;
  // On L(n,k) the rule is M_{2r} when true (the coupling partner of
  // M_r on L*), otherwise M_r.
  bool lattice_doubles_r = false;
  std::vector<double> p_grid{0.5};
  std::int64_t trials = 1;
  std::uint64_t base_seed = 1;
  MatchingSource matching = MatchingSource::kSampled;
  bool fixed_matching = false;
  std::optional<std::int64_t> t;  // tessellation side; auto when empty
  bool lemma42 = true;
  unsigned threads = 1;  // not part of the config hash

  Rule rule() const {
    if (graph == GraphKind::kLattice && lattice_doubles_r) return Rule::majority(2 * r);
    return Rule::majority(r);
  }

  void validate() const {
    require(n >= 3 && k >= 1 && 2 * k + 1 <= n, "need k >= 1 and 2k+1 <= n");
    require(r >= 0, "need r >= 0");
    if (graph == GraphKind::kStar) require(n % 2 == 0, "L* needs an even n");
    if (graph == GraphKind::kStar && matching == MatchingSource::kDeterministic)
      require(r <= n / 2, "cyclic matchings need r <= n/2");
    require(!p_grid.empty(), "need at least one p");
    for (double p : p_grid) require(p >= 0.0 && p <= 1.0, "p must lie in [0,1]");
    require(trials >= 1, "need trials >= 1");
    if (t) require(*t >= 1 && *t <= n, "need 1 <= t <= n");
  }

  // Default side: 100k^3 capped at floor(n/2).
  std::int64_t effective_t(std::vector<std::string>* warnings = nullptr) const {
    if (t) return *t;
    const double want = 100.0 * static_cast<double>(k) * static_cast<double>(k) * static_cast<double>(k);
    const std::int64_t cap = std::max<std::int64_t>(1, n / 2);
    if (want > static_cast<double>(cap)) {
      if (warnings)
        warnings->push_back("tessellation side 100k^3 = " + std::to_string(static_cast<long long>(want)) +
                            " capped at n/2 = " + std::to_string(cap));
      return cap;
    }
    return static_cast<std::int64_t>(want);
  }

  // eps = k^-100, kept as a logarithm since it underflows for large k.
  double log_epsilon() const { return -100.0 * std::log(static_cast<double>(k)); }
  double epsilon() const { return std::exp(log_epsilon()); }

  bool lemma42_applicable() const {
    const std::int64_t tt = effective_t();
    return lemma42 && graph == GraphKind::kStar && n % 2 == 0 && 2 * r < 2 * k + 2 && 2 * k + 2 <= tt && 2 * tt <= n;
  }

  nlohmann::json canonical_json() const {
    nlohmann::json grid = nlohmann::json::array();
    for (double p : p_grid) grid.push_back(p);
    return {{"n", n},
            {"k", k},
            {"r", r},
            {"graph", to_string(graph)},
            {"rule_r", rule().param},
            {"p_grid", grid},
            {"trials", trials},
            {"base_seed", std::to_string(base_seed)},
            {"matching", to_string(matching)},
            {"fixed_matching", fixed_matching},
            {"t", effective_t()},
            {"lemma42", lemma42}};
  }

  // FNV-1a over the canonical JSON; thread count and output paths excluded.
  std::string config_hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_json().dump()) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }
};

// MAJPERC_THREADS beats the requested count; 0 means all cores.
inline unsigned resolve_threads(unsigned requested) {
  if (const char* env = std::getenv("MAJPERC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 0) requested = static_cast<unsigned>(v);
  }
  if (requested == 0) requested = std::max(1u, std::thread::hardware_concurrency());
  return requested;
}

// Runs f(i) for i in [0, count) on a pool; f writes into its own slot, so
// results do not depend on scheduling.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& f) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          f(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

struct ComponentSize {
  std::size_t size = 0;
  std::int64_t diam = 0;
  friend bool operator==(const ComponentSize&, const ComponentSize&) = default;
};

struct TrialRecord {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  double p = 0.0;
  bool valid = true;
  std::string error;
  bool disseminated = false;
  std::size_t rounds = 0;
  std::size_t inactive = 0;
  std::vector<ComponentSize> components;  // l-infinity components of cells touching the final inactive set
  std::string lemma42 = "skip";           // pass, fail or skip
  double wall_time = 0.0;

  // Equality ignores wall time.
  friend bool operator==(const TrialRecord& a, const TrialRecord& b) {
    return a.trial == b.trial && a.seed == b.seed && a.p == b.p && a.valid == b.valid && a.error == b.error &&
           a.disseminated == b.disseminated && a.rounds == b.rounds && a.inactive == b.inactive &&
           a.components == b.components && a.lemma42 == b.lemma42;
  }
};

inline std::uint64_t trial_seed(const ExperimentConfig& cfg, std::uint64_t trial) {
  return derive_seed(cfg.base_seed, trial);
}

// Builds graphs and runs trials for one configuration. Shared state (the
// frozen matching, the lattice) is immutable, so one runner serves all
// worker threads.
class TrialRunner {
 public:
  explicit TrialRunner(ExperimentConfig cfg) : cfg_(std::move(cfg)), spec_(LatticeSpec::lattice(cfg_.n, cfg_.k)) {
    cfg_.validate();
    tess_t_ = cfg_.effective_t(&warnings_);
    if (cfg_.graph == GraphKind::kStar &&
        (cfg_.matching == MatchingSource::kDeterministic || cfg_.fixed_matching))
      shared_ = std::make_shared<const MatchingTuple>(make_matching(trial_seed(cfg_, 0)));
  }

  const ExperimentConfig& config() const { return cfg_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  std::int64_t tessellation_side() const { return tess_t_; }

  std::shared_ptr<const MatchingTuple> matching_for(std::uint64_t trial) const {
    if (cfg_.graph != GraphKind::kStar) return nullptr;
    if (shared_) return shared_;
    return std::make_shared<const MatchingTuple>(make_matching(trial_seed(cfg_, trial)));
  }

  // One trial at each p of the grid, sharing the graph. Initial sets come
  // from one uniform stream per trial, so they are nested in p.
  std::vector<TrialRecord> run_all_p(std::uint64_t trial) const {
    std::vector<TrialRecord> out;
    const std::uint64_t seed = trial_seed(cfg_, trial);
    std::shared_ptr<const MatchingTuple> m;
    std::string error;
    try {
      m = matching_for(trial);
    } catch (const SamplingError& e) {
      error = e.what();
    }
    for (double p : cfg_.p_grid) {
      TrialRecord rec;
      rec.trial = trial;
      rec.seed = seed;
      rec.p = p;
      if (!error.empty()) {
        rec.valid = false;
        rec.error = error;
      } else {
        run_into(rec, m);
      }
      out.push_back(std::move(rec));
    }
    return out;
  }

  TrialRecord run(double p, std::uint64_t trial) const {
    TrialRecord rec;
    rec.trial = trial;
    rec.seed = trial_seed(cfg_, trial);
    rec.p = p;
    try {
      run_into(rec, matching_for(trial));
    } catch (const SamplingError& e) {
      rec.valid = false;
      rec.error = e.what();
    }
    return rec;
  }

  // Fills the outcome fields of rec from a final state; star is the L*
  // graph the state was computed on, if any.
  void summarize(TrialRecord& rec, const FinalState& fs, const AugmentedGraph* star) const {
    rec.disseminated = fs.disseminated;
    rec.rounds = fs.rounds;
    rec.inactive = fs.inactive_count();
    const bool check = star && cfg_.lemma42_applicable();
    if (fs.disseminated) {
      if (check) rec.lemma42 = "pass";  // empty core: vacuous
      return;
    }
    const ActivationState core = fs.active.complement();
    const Tessellation tess(cfg_.n, tess_t_);
    for (const auto& c : components(CellSet::touching(tess, core), Metric::kLInf))
      rec.components.push_back({c.size(), c.diameter});
    if (check) rec.lemma42 = to_string(check_lemma_needstable(*star, core, tess).status);
  }

  ActivationState initial(double p, std::uint64_t trial) const {
    return random_initial(static_cast<std::size_t>(cfg_.n * cfg_.n), p,
                          stream_seed(trial_seed(cfg_, trial), Stream::kInitial));
  }

 private:
  MatchingTuple make_matching(std::uint64_t seed) const {
    if (cfg_.matching == MatchingSource::kDeterministic) return deterministic_admissible(cfg_.n, cfg_.k, cfg_.r);
    return sample_admissible(cfg_.n, cfg_.k, cfg_.r, stream_seed(seed, Stream::kMatching));
  }

  void run_into(TrialRecord& rec, const std::shared_ptr<const MatchingTuple>& m) const {
    const auto start = std::chrono::steady_clock::now();
    const ActivationState init = initial(rec.p, rec.trial);
    if (cfg_.graph == GraphKind::kStar) {
      const AugmentedGraph g(spec_, m);
      summarize(rec, run_to_fixpoint(g, cfg_.rule(), init), &g);
    } else {
      summarize(rec, run_to_fixpoint(LatticeGraph(spec_), cfg_.rule(), init), nullptr);
    }
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  ExperimentConfig cfg_;
  LatticeSpec spec_;
  std::int64_t tess_t_ = 1;
  std::vector<std::string> warnings_;
  std::shared_ptr<const MatchingTuple> shared_;
};

inline TrialRecord run_trial(const ExperimentConfig& cfg, std::uint64_t trial_index, std::optional<double> p = {}) {
  return TrialRunner(cfg).run(p.value_or(cfg.p_grid.front()), trial_index);
}

// Wilson score interval at 95%.
inline std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  const double nn = static_cast<double>(trials), ph = static_cast<double>(successes) / nn;
  const double denom = 1.0 + z * z / nn;
  const double centre = (ph + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(ph * (1.0 - ph) / nn + z * z / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct ScanPoint {
  double p = 0.0;
  std::size_t trials = 0;  // valid trials
  std::size_t disseminated = 0;
  double freq = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 1.0;
};

struct ScanResult {
  std::string config_hash;
  std::vector<ScanPoint> points;
  std::vector<TrialRecord> records;  // ordered by (trial, p index)
  std::size_t invalid_trials = 0;
  std::size_t lemma42_failures = 0;
  bool monotone_ok = true;
  std::vector<std::string> warnings;
};

// Fails when, in increasing p, a later interval lies wholly below an
// earlier neighbour's.
inline bool scan_monotone(const std::vector<ScanPoint>& points) {
  std::vector<ScanPoint> sorted = points;
  std::stable_sort(sorted.begin(), sorted.end(), [](const ScanPoint& a, const ScanPoint& b) { return a.p < b.p; });
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    if (sorted[i + 1].wilson_hi < sorted[i].wilson_lo) return false;
  return true;
}

inline ScanResult run_scan(const ExperimentConfig& cfg) {
  const TrialRunner runner(cfg);
  const auto trials = static_cast<std::size_t>(cfg.trials);
  std::vector<std::vector<TrialRecord>> slots(trials);
  parallel_for(trials, resolve_threads(cfg.threads), [&](std::size_t i) { slots[i] = runner.run_all_p(i); });

  ScanResult res;
  res.config_hash = cfg.config_hash();
  res.warnings = runner.warnings();
  res.points.resize(cfg.p_grid.size());
  for (std::size_t j = 0; j < cfg.p_grid.size(); ++j) res.points[j].p = cfg.p_grid[j];
  for (auto& slot : slots)
    for (std::size_t j = 0; j < slot.size(); ++j) {
      TrialRecord& rec = slot[j];
      if (!rec.valid) {
        ++res.invalid_trials;
      } else {
        ++res.points[j].trials;
        res.points[j].disseminated += rec.disseminated;
      }
      res.lemma42_failures += rec.lemma42 == "fail";
      res.records.push_back(std::move(rec));
    }
  for (auto& pt : res.points) {
    pt.freq = pt.trials ? static_cast<double>(pt.disseminated) / static_cast<double>(pt.trials) : 0.0;
    std::tie(pt.wilson_lo, pt.wilson_hi) = wilson_interval(pt.disseminated, pt.trials);
  }
  res.monotone_ok = scan_monotone(res.points);
  return res;
}

struct CoupledRecord {
  TrialRecord star;     // M_r on L*(n,k,r)
  TrialRecord lattice;  // M_{2r} on L(n,k)
  bool inclusion_holds = true;
};

// Same initial set on both graphs; the M_{2r}(L) final active set must lie
// inside the M_r(L*) one.
inline CoupledRecord coupled_trial(const ExperimentConfig& cfg, std::uint64_t trial_index, std::optional<double> p = {}) {
  require(cfg.graph == GraphKind::kStar, "coupled trial needs the L* graph");
  const double prob = p.value_or(cfg.p_grid.front());
  ExperimentConfig lat = cfg;
  lat.graph = GraphKind::kLattice;
  lat.lattice_doubles_r = true;
  const TrialRunner star_runner(cfg), lattice_runner(lat);

  CoupledRecord out;
  for (TrialRecord* rec : {&out.star, &out.lattice}) {
    rec->trial = trial_index;
    rec->seed = trial_seed(cfg, trial_index);
    rec->p = prob;
  }
  std::shared_ptr<const MatchingTuple> m;
  try {
    m = star_runner.matching_for(trial_index);
  } catch (const SamplingError& e) {
    out.star.valid = out.lattice.valid = false;
    out.star.error = out.lattice.error = e.what();
    return out;
  }
  const ActivationState init = star_runner.initial(prob, trial_index);
  const LatticeSpec spec = LatticeSpec::lattice(cfg.n, cfg.k);
  const AugmentedGraph star(spec, m);
  const FinalState a = run_to_fixpoint(star, Rule::majority(cfg.r), init);
  const FinalState b = run_to_fixpoint(LatticeGraph(spec), Rule::majority(2 * cfg.r), init);
  star_runner.summarize(out.star, a, &star);
  lattice_runner.summarize(out.lattice, b, nullptr);
  out.inclusion_holds = b.active.is_subset_of(a.active);
  return out;
}

// Output ---------------------------------------------------------------

inline std::string trial_json_line(const TrialRecord& rec, const std::string& config_hash) {
  nlohmann::ordered_json comps = nlohmann::ordered_json::array();
  for (const auto& c : rec.components) comps.push_back({{"size", c.size}, {"diam", c.diam}});
  nlohmann::ordered_json j;
  j["trial"] = rec.trial;
  j["p"] = rec.p;
  j["seed"] = std::to_string(rec.seed);
  j["disseminated"] = rec.disseminated;
  j["rounds"] = rec.rounds;
  j["inactive"] = rec.inactive;
  j["components"] = comps;
  j["lemma42"] = rec.lemma42;
  if (!rec.valid) j["error"] = rec.error;
  j["config_hash"] = config_hash;
  return j.dump();
}

inline std::string scan_csv(const ScanResult& res) {
  std::string out = "p,trials,disseminated,freq,wilson_lo,wilson_hi,config_hash\n";
  char buf[256];
  for (const auto& pt : res.points) {
    std::snprintf(buf, sizeof buf, "%.6f,%zu,%zu,%.6f,%.6f,%.6f,%s\n", pt.p, pt.trials, pt.disseminated, pt.freq,
                  pt.wilson_lo, pt.wilson_hi, res.config_hash.c_str());
    out += buf;
  }
  return out;
}

inline std::string scan_jsonl(const ScanResult& res) {
  std::string out;
  for (const auto& rec : res.records) out += trial_json_line(rec, res.config_hash) + "\n";
  return out;
}

// "a:b:step", inclusive of b up to rounding; values rounded to 1e-9.
inline std::vector<double> parse_p_grid(const std::string& text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
  require(c1 != std::string::npos && c2 != std::string::npos, "p-grid must look like a:b:step");
  double a = 0, b = 0, step = 0;
  try {
    a = std::stod(text.substr(0, c1));
    b = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    step = std::stod(text.substr(c2 + 1));
  } catch (const std::exception&) {
    throw PreconditionError("p-grid must look like a:b:step");
  }
  require(step > 0.0 && a <= b, "p-grid needs a <= b and step > 0");
  std::vector<double> out;
  for (std::int64_t i = 0;; ++i) {
    const double p = std::round((a + static_cast<double>(i) * step) * 1e9) / 1e9;
    if (p > b + 1e-9) break;
    out.push_back(p);
  }
  return out;
}

}  // namespace majperc
