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
// Command-line front end: theory tables, graph construction, simulation,
// threshold scans, coupling runs, growth verification and diagnostics.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "majperc/engine.hpp"
#include "majperc/growth.hpp"
#include "majperc/harness.hpp"
#include "majperc/matchings.hpp"
#include "majperc/theory.hpp"
#include "majperc/ubiquity.hpp"

namespace {

using namespace majperc;

constexpr int kOk = 0;
constexpr int kAssertion = 1;
constexpr int kUsage = 2;

struct Options {
  std::int64_t n = 64, k = 2, r = 1;
  double p = 0.5;
  std::string p_grid;
  std::int64_t trials = 1;
  std::uint64_t seed = 1;
  std::string graph = "star";
  std::string matching = "sample";
  bool fixed_matching = false;
  std::int64_t t = 0;  // 0 = auto
  unsigned threads = 1;
  std::string out;
  std::string format;
};

void add_graph_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--n", o.n, "torus side")->capture_default_str();
  cmd->add_option("--k", o.k, "horizontal reach")->capture_default_str();
  cmd->add_option("--r", o.r, "majority margin / number of matchings")->capture_default_str();
  cmd->add_option("--seed", o.seed, "base seed")->capture_default_str();
  cmd->add_option("--graph", o.graph, "lattice or star (L*)")
      ->check(CLI::IsMember({"lattice", "star"}))
      ->capture_default_str();
  cmd->add_option("--matching", o.matching, "det or sample")->check(CLI::IsMember({"det", "sample"}))->capture_default_str();
  cmd->add_option("--out", o.out, "output path (default stdout)");
}

void add_run_flags(CLI::App* cmd, Options& o) {
  add_graph_flags(cmd, o);
  cmd->add_option("--p", o.p, "initial activation probability")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmd->add_option("--trials", o.trials, "trials")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_flag("--fixed-matching", o.fixed_matching, "reuse one matching tuple for all trials");
  cmd->add_option("--t", o.t, "tessellation side (default min(100k^3, n/2))");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores; MAJPERC_THREADS overrides)")->capture_default_str();
}

ExperimentConfig make_config(const Options& o, std::vector<double> grid) {
  ExperimentConfig cfg;
  cfg.n = o.n;
  cfg.k = o.k;
  cfg.r = o.r;
  cfg.graph = o.graph == "lattice" ? GraphKind::kLattice : GraphKind::kStar;
  cfg.matching = o.matching == "det" ? MatchingSource::kDeterministic : MatchingSource::kSampled;
  cfg.fixed_matching = o.fixed_matching;
  cfg.p_grid = std::move(grid);
  cfg.trials = o.trials;
  cfg.base_seed = o.seed;
  if (o.t > 0) cfg.t = o.t;
  cfg.threads = o.threads;
  cfg.validate();
  return cfg;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw PreconditionError("cannot open " + o.out);
  f << text;
}

void warn(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::pair<std::int64_t, std::int64_t> parse_degree_range(const std::string& s) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      const std::int64_t d = std::stoll(s);
      return {d, d};
    }
    return {std::stoll(s.substr(0, dots)), std::stoll(s.substr(dots + 2))};
  } catch (const std::exception&) {
    throw PreconditionError("--d must look like 7 or 3..12");
  }
}

int cmd_theory(const std::string& degrees, const std::string& format, std::optional<double> log_n, double p0) {
  const auto [lo, hi] = parse_degree_range(degrees);
  if (lo < 3 || hi < lo) throw PreconditionError("--d needs 3 <= lo <= hi");
  nlohmann::ordered_json table = nlohmann::ordered_json::array();
  std::ostringstream text;
  text << "d      p_tilde    argmin_y     boundary\n";
  for (std::int64_t d = lo; d <= hi; ++d) {
    const CriticalProbResult res = critical_prob(d);
    table.push_back({{"d", d}, {"p_tilde", res.p_tilde}, {"argmin_y", res.argmin_y}, {"at_boundary", res.at_boundary}});
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-6lld %.6f   %.9f  %s\n", static_cast<long long>(d), res.p_tilde, res.argmin_y,
                  res.at_boundary ? "yes" : "no");
    text << buf;
  }
  const double wheel = wheel_pplus();
  char buf[256];
  std::snprintf(buf, sizeof buf, "wheel p+ %.6f\n", wheel);
  text << buf;
  nlohmann::ordered_json doc{{"critical", table}, {"wheel_pplus", wheel}};
  if (log_n) {
    const ParameterWindow w = theorem_window_log(*log_n, p0);
    doc["window"] = {{"log_n", w.log_n},   {"p", w.p},         {"p_min", w.p_min},
                     {"p_max", w.p_max},   {"k_min", w.k_min}, {"k_max", w.k_max},
                     {"r_max", w.r_max},   {"nonempty", w.nonempty},
                     {"m", w.m},           {"t", w.t},         {"log_epsilon", w.log_eps},
                     {"corollary_k", w.corollary_k}, {"corollary_r", w.corollary_r},
                     {"corollary_degree", w.corollary_degree}};
    std::snprintf(buf, sizeof buf, "window log n=%g: p_min %.6g, k in [%.6g, %.6g], r <= %.6g, %s\n", w.log_n, w.p_min,
                  w.k_min, w.k_max, w.r_max, w.nonempty ? "non-empty" : "empty");
    text << buf;
  }
  std::cout << (format == "json" ? doc.dump(2) + "\n" : text.str());
  return kOk;
}

int cmd_build_graph(const Options& o) {
  const LatticeSpec spec = LatticeSpec::lattice(o.n, o.k);
  nlohmann::ordered_json doc{{"graph", o.graph}, {"n", o.n}, {"k", o.k}};
  if (o.graph == "lattice") {
    const LatticeGraph g(spec);
    doc["vertices"] = g.vertex_count();
    doc["degree"] = g.uniform_degree();
    doc["threshold"] = Rule::majority(o.r).threshold(g.uniform_degree());
    std::cout << doc.dump(2) << "\n";
    return kOk;
  }
  const MatchingTuple m = o.matching == "det" ? deterministic_admissible(o.n, o.k, o.r)
                                              : sample_admissible(o.n, o.k, o.r, stream_seed(derive_seed(o.seed, 0), Stream::kMatching));
  const AdmissibilityReport rep = is_admissible(m, spec);
  const AugmentedGraph g(spec, std::make_shared<const MatchingTuple>(m));
  doc["r"] = o.r;
  doc["matching"] = o.matching;
  doc["vertices"] = g.vertex_count();
  doc["degree"] = g.uniform_degree();
  doc["threshold"] = Rule::majority(o.r).threshold(g.uniform_degree());
  doc["admissible"] = rep.admissible;
  std::cout << doc.dump(2) << "\n";
  if (!o.out.empty()) emit(o, to_json(m).dump() + "\n");
  return rep.admissible ? kOk : kAssertion;
}

int cmd_sample_matchings(const Options& o) {
  const MatchingTuple m = o.matching == "det" ? deterministic_admissible(o.n, o.k, o.r)
                                              : sample_admissible(o.n, o.k, o.r, stream_seed(derive_seed(o.seed, 0), Stream::kMatching));
  const AdmissibilityReport rep = is_admissible(m, LatticeSpec::lattice(o.n, o.k));
  emit(o, to_json(m).dump() + "\n");
  if (!rep.admissible) {
    std::cerr << "inadmissible tuple: " << rep.violation_count << " violations\n";
    return kAssertion;
  }
  return kOk;
}

int cmd_simulate(const Options& o) {
  const ExperimentConfig cfg = make_config(o, {o.p});
  const ScanResult res = run_scan(cfg);
  warn(res.warnings);
  emit(o, scan_jsonl(res));
  if (res.lemma42_failures) {
    std::cerr << "necessary-condition check failed in " << res.lemma42_failures << " trials\n";
    return kAssertion;
  }
  return kOk;
}

int cmd_scan(const Options& o) {
  const ExperimentConfig cfg = make_config(o, o.p_grid.empty() ? std::vector<double>{o.p} : parse_p_grid(o.p_grid));
  const ScanResult res = run_scan(cfg);
  warn(res.warnings);
  emit(o, o.format == "jsonl" ? scan_jsonl(res) : scan_csv(res));
  int code = kOk;
  if (!res.monotone_ok) {
    std::cerr << "monotonicity check failed: a higher p has an interval wholly below a lower p\n";
    code = kAssertion;
  }
  if (res.lemma42_failures) {
    std::cerr << "necessary-condition check failed in " << res.lemma42_failures << " trials\n";
    code = kAssertion;
  }
  if (res.invalid_trials) std::cerr << "warning: " << res.invalid_trials << " invalid trials\n";
  return code;
}

int cmd_coupled(const Options& o) {
  ExperimentConfig cfg = make_config(o, {o.p});
  if (cfg.graph != GraphKind::kStar) throw PreconditionError("coupled runs need --graph star");
  std::vector<CoupledRecord> recs(static_cast<std::size_t>(cfg.trials));
  parallel_for(recs.size(), resolve_threads(cfg.threads),
               [&](std::size_t i) { recs[i] = coupled_trial(cfg, i, o.p); });
  const std::string hash = cfg.config_hash();
  std::string out;
  bool ok = true;
  for (const auto& rec : recs) {
    nlohmann::ordered_json j;
    j["trial"] = rec.star.trial;
    j["seed"] = std::to_string(rec.star.seed);
    j["star"] = nlohmann::ordered_json::parse(trial_json_line(rec.star, hash));
    j["lattice"] = nlohmann::ordered_json::parse(trial_json_line(rec.lattice, hash));
    j["inclusion"] = rec.inclusion_holds;
    out += j.dump() + "\n";
    ok = ok && rec.inclusion_holds;
  }
  emit(o, out);
  if (!ok) {
    std::cerr << "coupling inclusion violated\n";
    return kAssertion;
  }
  return kOk;
}

int cmd_verify(std::int64_t k_max, std::int64_t ab_max, const std::string& format) {
  const auto rows = growth_grid(k_max, ab_max);
  bool ok = true;
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  std::ostringstream text;
  text << "check      k   m   a   b   r   status  detail\n";
  std::size_t pass = 0;
  for (const auto& row : rows) {
    ok = ok && !(row.report.status == CheckReport::Status::kFail);
    pass += row.report.passed();
    doc.push_back({{"check", row.check}, {"k", row.k}, {"m", row.m}, {"a", row.a}, {"b", row.b}, {"r", row.r},
                   {"status", to_string(row.report.status)}, {"detail", row.report.detail}});
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-10s %-3lld %-3lld %-3lld %-3lld %-3lld %-7s %s\n", row.check.c_str(),
                  static_cast<long long>(row.k), static_cast<long long>(row.m), static_cast<long long>(row.a),
                  static_cast<long long>(row.b), static_cast<long long>(row.r), to_string(row.report.status).c_str(),
                  row.report.detail.c_str());
    text << buf;
  }
  text << pass << " of " << rows.size() << " checks passed\n";
  std::cout << (format == "json" ? doc.dump(2) + "\n" : text.str());
  return ok ? kOk : kAssertion;
}

int cmd_diagnose(const Options& o, std::uint64_t trial, std::optional<double> eps_flag) {
  const ExperimentConfig cfg = make_config(o, {o.p});
  const double eps = eps_flag.value_or(cfg.epsilon());
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("eps = k^-100 is outside (0,1); pass --eps");
  const TrialRunner runner(cfg);
  warn(runner.warnings());
  const auto m = runner.matching_for(trial);
  const ActivationState init = runner.initial(o.p, trial);
  const LatticeSpec spec = LatticeSpec::lattice(cfg.n, cfg.k);
  FinalState fs;
  std::optional<AugmentedGraph> star;
  if (m) {
    star.emplace(spec, m);
    fs = run_to_fixpoint(*star, cfg.rule(), init);
  } else {
    fs = run_to_fixpoint(LatticeGraph(spec), cfg.rule(), init);
  }
  TrialRecord rec;
  rec.trial = trial;
  rec.seed = trial_seed(cfg, trial);
  rec.p = o.p;
  runner.summarize(rec, fs, star ? &*star : nullptr);

  const Tessellation tess(cfg.n, runner.tessellation_side());
  const CellSet touched = CellSet::touching(tess, fs.active.complement());
  // Z: the largest l1-component of fully active cells.
  const auto active_parts = components(touched.complement(), Metric::kL1);
  CellSet z(tess.cells_per_axis());
  if (!active_parts.empty()) {
    const auto best = std::max_element(active_parts.begin(), active_parts.end(),
                                       [](const ComponentSummary& a, const ComponentSummary& b) { return a.size() < b.size(); });
    for (CellIndex c : best->cells) z.insert(c);
  }
  const UbiquityReport ub = check_ubiquity(z, eps);
  const DiameterStats stats = component_diameter_stats(z.complement());
  nlohmann::ordered_json doc;
  doc["config_hash"] = cfg.config_hash();
  doc["trial"] = nlohmann::ordered_json::parse(trial_json_line(rec, cfg.config_hash()));
  doc["t"] = runner.tessellation_side();
  doc["cells_per_axis"] = tess.cells_per_axis();
  doc["ubiquity"] = to_json(ub);
  doc["diameter_stats"] = to_json(stats, eps);
  emit(o, doc.dump(2) + "\n");
  return rec.lemma42 == "fail" ? kAssertion : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"majperc: majority bootstrap percolation on augmented toroidal lattices"};
  app.require_subcommand(1);
  Options o;

  std::string degrees = "3..12", theory_format = "text";
  std::optional<double> log_n;
  double p0 = 0.5;
  auto* theory = app.add_subcommand("theory", "critical probabilities, wheel root and parameter window");
  theory->add_option("--d", degrees, "degree or range a..b")->capture_default_str();
  theory->add_option("--format", theory_format, "text or json")->check(CLI::IsMember({"text", "json"}));
  theory->add_option("--log-n", log_n, "natural log of n for the parameter window");
  theory->add_option("--p0", p0, "upper end of the p window")->capture_default_str();

  auto* build = app.add_subcommand("build-graph", "construct L(n,k) or L*(n,k,r) and report its shape");
  add_graph_flags(build, o);
  auto* sample = app.add_subcommand("sample-matchings", "write a k-admissible r-tuple as JSON");
  add_graph_flags(sample, o);

  auto* simulate = app.add_subcommand("simulate", "run trials at one p, JSON lines out");
  add_run_flags(simulate, o);

  auto* scan = app.add_subcommand("scan", "dissemination frequency over a p grid");
  add_run_flags(scan, o);
  scan->add_option("--p-grid", o.p_grid, "grid a:b:step");
  o.format = "csv";
  scan->add_option("--format", o.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}))->capture_default_str();

  auto* coupled = app.add_subcommand("coupled", "M_r on L* against M_2r on L from one initial set");
  add_run_flags(coupled, o);

  std::int64_t k_max = 10, ab_max = 3;
  std::string verify_format = "text";
  auto* verify = app.add_subcommand("verify", "deterministic growth checks over a parameter grid");
  verify->add_option("--k-max", k_max, "largest k")->capture_default_str();
  verify->add_option("--ab-max", ab_max, "largest a and b")->capture_default_str();
  verify->add_option("--format", verify_format, "text or json")->check(CLI::IsMember({"text", "json"}));

  std::uint64_t diag_trial = 0;
  std::optional<double> eps;
  auto* diagnose = app.add_subcommand("diagnose", "cell-level ubiquity report for one trial");
  add_run_flags(diagnose, o);
  diagnose->add_option("--trial", diag_trial, "trial index")->capture_default_str();
  diagnose->add_option("--eps", eps, "epsilon (default k^-100)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*theory) return cmd_theory(degrees, theory_format, log_n, p0);
    if (*build) return cmd_build_graph(o);
    if (*sample) return cmd_sample_matchings(o);
    if (*simulate) return cmd_simulate(o);
    if (*scan) return cmd_scan(o);
    if (*coupled) return cmd_coupled(o);
    if (*verify) return cmd_verify(k_max, ab_max, verify_format);
    if (*diagnose) return cmd_diagnose(o, diag_trial, eps);
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAssertion;
  }
  return kUsage;
}
