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
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "majperc/common.hpp"

namespace majperc {

namespace detail {

// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0, comp_ = 0.0;
};

inline std::vector<double> log_binomials(std::int64_t trials) {
  std::vector<double> out(static_cast<std::size_t>(trials + 1));
  const double lg = std::lgamma(static_cast<double>(trials) + 1.0);
  for (std::int64_t i = 0; i <= trials; ++i)
    out[static_cast<std::size_t>(i)] =
        lg - std::lgamma(static_cast<double>(i) + 1.0) - std::lgamma(static_cast<double>(trials - i) + 1.0);
  return out;
}

// Pr[Bin(trials, q) <= cap] from log binomial coefficients, log q and
// log(1-q). Taking both logs avoids forming 1-q when q is near 1.
inline double binom_cdf_logs(const std::vector<double>& logc, std::int64_t trials, double lq, double lp,
                             std::int64_t cap) {
  if (cap < 0) return 0.0;
  if (cap >= trials) return 1.0;
  std::vector<double> terms(static_cast<std::size_t>(cap + 1));
  double top = -std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i <= cap; ++i) {
    const double t = logc[static_cast<std::size_t>(i)] + static_cast<double>(i) * lq +
                     static_cast<double>(trials - i) * lp;
    terms[static_cast<std::size_t>(i)] = t;
    top = std::max(top, t);
  }
  CompensatedSum s;
  for (double t : terms) s.add(std::exp(t - top));
  return std::min(1.0, std::exp(top) * s.value());
}

inline double binom_cdf_with(const std::vector<double>& logc, std::int64_t trials, double q, std::int64_t cap) {
  if (cap < 0) return 0.0;
  if (cap >= trials) return 1.0;
  if (q <= 0.0) return 1.0;
  if (q >= 1.0) return 0.0;
  return binom_cdf_logs(logc, trials, std::log(q), std::log1p(-q), cap);
}

}  // namespace detail

// Pr[Bin(trials, q) <= cap].
inline double binom_cdf(std::int64_t trials, double q, std::int64_t cap) {
  require(trials >= 0, "binomial needs trials >= 0");
  require(q >= 0.0 && q <= 1.0, "binomial needs q in [0,1]");
  return detail::binom_cdf_with(detail::log_binomials(trials), trials, q, cap);
}

// F(d, y): probability of at most d/2 successes in d trials of success
// probability y.
inline double binom_tail_F(std::int64_t d, double y) { return binom_cdf(d, y, d / 2); }

struct CriticalProbResult {
  std::int64_t d = 0;
  double p_tilde = 0.0;
  double argmin_y = 0.0;
  double objective = 0.0;    // inf of y / F at argmin_y
  double tolerance = 0.0;    // final bracket width in y
  bool at_boundary = false;  // minimiser pressed against y -> 0+ or y -> 1-
};

// Objective y / Pr[Bin(d-1, 1-y) <= floor(d/2)]: a degree-d vertex stays
// inactive while at most floor(d/2) of its d-1 children are active.
class CriticalObjective {
 public:
  explicit CriticalObjective(std::int64_t d) : d_(d), logc_(detail::log_binomials(d - 1)) {}
  double operator()(double y) const {
    // success probability 1-y: log(1-y) and log(y) taken directly
    return y / detail::binom_cdf_logs(logc_, d_ - 1, std::log1p(-y), std::log(y), d_ / 2);
  }

 private:
  std::int64_t d_;
  std::vector<double> logc_;
};

// p~(d) = 1 - inf_{y in (0,1)} y / F(d-1, 1-y) (success cap floor(d/2)).
// Interior grid scan, then golden-section inside the best bracket.
inline CriticalProbResult critical_prob(std::int64_t d, int grid_points = 10000, double y_tol = 1e-9) {
  require(d >= 3, "critical probability needs d >= 3");
  require(grid_points >= 3, "grid needs at least 3 points");
  const CriticalObjective f(d);
  const double h = 1.0 / (grid_points + 1);
  int best = 1;
  double best_val = f(h);
  for (int i = 2; i <= grid_points; ++i) {
    const double v = f(i * h);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double lo = (best - 1) * h, hi = (best + 1) * h;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > y_tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = f(x2);
    }
  }
  CriticalProbResult out;
  out.d = d;
  out.argmin_y = f1 <= f2 ? x1 : x2;
  out.objective = std::min({f1, f2, best_val});
  if (best_val < std::min(f1, f2)) out.argmin_y = best * h;
  out.p_tilde = 1.0 - out.objective;
  out.tolerance = hi - lo;
  out.at_boundary = best == 1 || best == grid_points;
  return out;
}

// Root in [0,1] of x + x^2 - x^3 = 1/2; the left side increases on [0,1].
inline double wheel_pplus(double tol = 1e-12) {
  const auto g = [](double x) { return x + x * x - x * x * x - 0.5; };
  double lo = 0.0, hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Degree thresholds below which 1-majority dissemination fails a.a.s. on
// any regular sequence: d < 1/p for odd d, d < 2/p for even d.
inline std::pair<double, double> rstv_degree_bound(double p) {
  require(p > 0.0 && p <= 1.0, "degree bound needs p in (0,1]");
  return {1.0 / p, 2.0 / p};
}

// Parameter window for a.a.s. dissemination, evaluated at one p.
// n enters only through log n so astronomically large n are representable.
struct ParameterWindow {
  double log_n = 0.0;
  double p = 0.0;      // p at which the k and r bounds are evaluated
  double p_min = 0.0;  // 200 (log log n)^{2/3} / (log n)^{1/3}
  double p_max = 0.0;  // the caller's p0
  double k_min = 0.0;  // ceil((1000/p) log(1/p))
  double k_max = 0.0;  // floor(p^2 log n / (3000 log(1/p)))
  double r_max = 0.0;  // floor(p k_min / 20)
  bool p_ok = false;
  bool k_ok = false;
  bool r_ok = false;
  bool nonempty = false;

  // Phase-one settings at k = k_min.
  double m = 0.0;            // ceil(8/p)
  double t = 0.0;            // 100 k^3
  double log_eps = 0.0;      // log(k^-100)
  double r_phase1_max = 0.0;  // floor(p k / 9)

  // Log-log regime settings: p = p_min, k = k_max(p_min),
  // r = floor(400 log log n), degree 4k + r + 2.
  double corollary_k = 0.0;
  double corollary_r = 0.0;
  double corollary_degree = 0.0;
};

inline double window_p_min(double log_n) {
  require(log_n > 1.0, "window needs log n > 1");
  return 200.0 * std::pow(std::log(log_n), 2.0 / 3.0) / std::cbrt(log_n);
}

inline ParameterWindow theorem_window_log(double log_n, double p0, std::optional<double> p_eval = {}) {
  require(log_n > 1.0, "window needs n >= 16");
  require(p0 > 0.0, "window needs p0 > 0");
  ParameterWindow w;
  w.log_n = log_n;
  w.p_min = window_p_min(log_n);
  w.p_max = p0;
  w.p = p_eval.value_or(std::min(p0, 0.999999));
  require(w.p > 0.0 && w.p < 1.0, "window needs p in (0,1) for log(1/p)");
  const double lip = std::log(1.0 / w.p);
  w.k_min = std::ceil(1000.0 / w.p * lip);
  w.k_max = std::floor(w.p * w.p * log_n / (3000.0 * lip));
  w.r_max = std::floor(w.p * w.k_min / 20.0);
  w.p_ok = w.p_min <= w.p && w.p <= p0;
  w.k_ok = w.k_min <= w.k_max;
  w.r_ok = w.r_max >= 1.0;
  w.nonempty = w.p_ok && w.k_ok && w.r_ok;

  w.m = std::ceil(8.0 / w.p);
  w.t = 100.0 * w.k_min * w.k_min * w.k_min;
  w.log_eps = -100.0 * std::log(w.k_min);
  w.r_phase1_max = std::floor(w.p * w.k_min / 9.0);

  const double lll = std::log(log_n);
  w.corollary_r = std::floor(400.0 * lll);
  if (w.p_min < 1.0) {
    const double pm = w.p_min;
    w.corollary_k = std::floor(pm * pm * log_n / (3000.0 * std::log(1.0 / pm)));
  }
  w.corollary_degree = 4.0 * w.corollary_k + w.corollary_r + 2.0;
  return w;
}

inline ParameterWindow theorem_window(double n, double p0, std::optional<double> p_eval = {}) {
  require(n >= 16.0, "window needs n >= 16");
  return theorem_window_log(std::log(n), p0, p_eval);
}

// Degree threshold for constant k and r at small p:
// smallest k >= ceil((1000/p) log(1/p)) with r+3 <= pk/20, then 4k+r+2.
inline std::int64_t constant_corollary_d0(double p, std::int64_t r) {
  require(p > 0.0 && p < 1.0, "d0 needs p in (0,1)");
  require(r >= 1, "d0 needs r >= 1");
  const auto k0 = static_cast<std::int64_t>(std::ceil(1000.0 / p * std::log(1.0 / p)));
  const auto kr = static_cast<std::int64_t>(std::ceil(20.0 * static_cast<double>(r + 3) / p));
  return 4 * std::max(k0, kr) + r + 2;
}

}  // namespace majperc
