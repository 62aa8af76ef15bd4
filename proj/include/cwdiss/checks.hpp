/*
   Copyright 2026 The cwdiss Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cwdiss/gamma.hpp"
#include "cwdiss/macroflow.hpp"
#include "cwdiss/microsim.hpp"
#include "cwdiss/moddev.hpp"
#include "cwdiss/parallel.hpp"
#include "cwdiss/phases.hpp"

// Named numerical checks shared by the acceptance binary and `cwdiss verify`.

namespace cwdiss::checks {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Check {
  std::string id;
  std::string title;
  double budget_seconds = 0.0;  // 0 = no runtime requirement
  std::function<Outcome()> body;
};

struct Report {
  std::string id;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

inline std::string format(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  char buf[1024];
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

inline Report run(const Check& c) {
  Report r{c.id, c.title, false, {}, 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.passed = o.passed;
  r.detail = o.detail;
  if (c.budget_seconds > 0.0 && r.seconds > c.budget_seconds) {
    r.passed = false;
    r.detail += format(" [over budget: %.3gs > %.3gs]", r.seconds, c.budget_seconds);
  }
  return r;
}

inline std::string line(const Report& r) {
  return format("%s %s: %s (%s, %.3fs)", r.passed ? "PASS" : "FAIL", r.id.c_str(), r.title.c_str(),
                r.detail.c_str(), r.seconds);
}

// ---------------------------------------------------------------------------
// Acceptance criteria

inline Outcome critical_line_formula() {
  const double e = beta_c(2.0, GammaModel::exponential());
  const double t = beta_c(2.0, GammaModel::tanh_plus_one());
  const bool ok = std::abs(e - 2.0) <= 1e-12 && std::abs(t - 2.0) <= 1e-12;
  return {ok, format("beta_c(2): exp %.17g, tanh %.17g", e, t)};
}

inline Outcome tricritical_point() {
  const auto g = GammaModel::exponential();
  const auto k = kappa_tc(g);
  const auto b = beta_tc(g);
  if (!k || !b) return {false, "tri-critical point absent"};
  const double sigma = lyapunov_number(*k, g);
  const double b_line = critical_line_regime(*b, g).b;
  const bool ok = std::abs(*k - 4.0) <= 1e-12 && std::abs(*b - 3.0) <= 1e-12 && std::abs(sigma) <= 1e-10 &&
                  std::abs(b_line) <= 1e-12;
  return {ok, format("kappa_tc %.17g, beta_tc %.17g, sigma_L %.3g, critical-line b %.3g", *k, *b, sigma, b_line)};
}

inline Outcome scenario_discrimination() {
  const auto t = GammaModel::tanh_plus_one();
  bool ok = true;
  std::string d = "tanh sigma_L:";
  for (double kappa : {0.5, 1.0, 2.0, 5.0}) {
    const double s = lyapunov_number(kappa, t);
    ok = ok && s < 0.0;
    d += format(" %.4g", s);
  }
  const double se = lyapunov_number(6.0, GammaModel::exponential());
  ok = ok && se > 0.0;
  d += format("; exp sigma_L(6) %.4g", se);
  return {ok, d};
}

inline Outcome phase_diagram(unsigned threads) {
  const auto t = GammaModel::tanh_plus_one();
  const auto e = GammaModel::exponential();
  ClassifyOptions opts;
  opts.cycles.threads = 1;

  const auto tanh_cells = scan_grid(uniform_grid(0.2, 3.0, 30), uniform_grid(0.2, 3.0, 30), t, threads, opts);
  std::set<Phase> tanh_labels;
  int misplaced = 0;
  for (const auto& c : tanh_cells) {
    tanh_labels.insert(c.label);
    const Phase expected = c.beta >= c.beta_c ? Phase::LC : Phase::FP;
    if (c.label != expected) ++misplaced;
  }
  const bool tanh_ok = tanh_labels.size() == 2 && misplaced == 0;

  const auto exp_cells = scan_grid(uniform_grid(0.2, 8.0, 30), uniform_grid(0.2, 6.0, 30), e, threads, opts);
  int coexist = 0;
  int outside = 0;
  for (const auto& c : exp_cells) {
    if (c.label != Phase::FP_plus_LC) continue;
    ++coexist;
    if (!(c.kappa > 4.0 && c.beta < c.beta_c)) ++outside;
  }
  const auto bd = beta_delta(6.0, e);
  const auto bs = beta_star(6.0, e);
  const bool order_ok = bd && bs && *bd <= *bs && *bs <= 4.0;
  const bool exp_ok = coexist > 0 && outside == 0 && order_ok;
  return {tanh_ok && exp_ok,
          format("tanh: %zu labels, %d cells off the beta_c split; exp: %d FP+LC cells (%d outside kappa>4, "
                 "beta<beta_c), beta_delta(6) %.6f, beta_star(6) %.6f",
                 tanh_labels.size(), misplaced, coexist, outside, bd ? *bd : NAN, bs ? *bs : NAN)};
}

/// Iterates the return map until successive radii agree to `tol`.
inline double iterate_return_map(double r, double beta, double kappa, const GammaModel& g, int max_iter = 2000,
                                 double tol = 1e-12) {
  for (int i = 0; i < max_iter; ++i) {
    const double next = return_map(r, beta, kappa, g).next_radius;
    if (std::abs(next - r) <= tol) return next;
    r = next;
  }
  return r;
}

inline double single_cycle_radius(double beta, double kappa, const GammaModel& g) {
  const auto cycles = find_cycles(beta, kappa, g, default_radius_grid());
  if (cycles.size() != 1) return NAN;
  return cycles.front().radius;
}

inline Outcome limit_cycle_uniqueness() {
  const auto g = GammaModel::tanh_plus_one();
  const auto cycles = find_cycles(2.0, 1.0, g, default_radius_grid());
  const bool one = cycles.size() == 1 && cycles.front().stability == CycleStability::Stable;
  const double from_small = iterate_return_map(0.01, 2.0, 1.0, g);
  const double from_large = iterate_return_map(0.8, 2.0, 1.0, g);
  const double found = one ? cycles.front().radius : NAN;
  const bool agree = std::abs(from_small - from_large) <= 1e-4 && std::abs(from_small - found) <= 1e-4;

  std::vector<double> radii;
  for (double beta : {1.51, 1.6, 1.7, 1.8}) radii.push_back(single_cycle_radius(beta, 1.0, g));
  bool monotone = std::all_of(radii.begin(), radii.end(), [](double r) { return std::isfinite(r); });
  for (std::size_t i = 1; i < radii.size(); ++i) monotone = monotone && radii[i] > radii[i - 1];
  const bool shrinks = radii.front() < radii.back() / 2.0;
  return {one && agree && monotone && shrinks,
          format("%zu cycle(s) at beta=2; limits from 0.01 / 0.8: %.10f / %.10f; radii at beta 1.51,1.6,1.7,1.8: "
                 "%.4f %.4f %.4f %.4f",
                 cycles.size(), from_small, from_large, radii[0], radii[1], radii[2], radii[3])};
}

inline Outcome law_of_large_numbers(unsigned threads) {
  const auto g = GammaModel::tanh_plus_one();
  SimConfig cfg;
  cfg.n = 20000;
  cfg.beta = 1.0;
  cfg.kappa = 2.0;
  cfg.t_max = 5.0;
  cfg.record_dt = 0.01;
  cfg.seed = 20260101;
  const auto init = MicroState::from_magnetization(cfg.n, 0.5, 0.2);
  const auto ode = integrate({0.5, 0.2}, cfg.beta, cfg.kappa, g, cfg.t_max, 1e-11, cfg.record_dt);
  const auto runs = run_ensemble(cfg, g, init, 20, threads);
  int good = 0;
  double worst = 0.0;
  for (const auto& tr : runs) {
    double sup = 0.0;
    const std::size_t len = std::min(tr.size(), ode.size());
    for (std::size_t i = 0; i < len; ++i) {
      if (std::abs(tr.times[i] - ode.times[i]) > 1e-9) throw std::logic_error("time grids differ");
      sup = std::max(sup, std::abs(tr.m[i] - ode.states[i][0]));
    }
    worst = std::max(worst, sup);
    if (sup <= 0.05) ++good;
  }
  return {good >= 16, format("%d/20 replicas within 0.05 (worst sup %.4f)", good, worst)};
}

inline Outcome jump_invariant() {
  const auto g = GammaModel::tanh_plus_one();
  SimConfig cfg;
  cfg.n = 20000;
  cfg.beta = 1.0;
  cfg.kappa = 2.0;
  cfg.t_max = 60.0;
  cfg.record_dt = 1.0;
  cfg.seed = 7;
  double worst = 0.0;
  const auto tr = simulate(cfg, g, MicroState::from_magnetization(cfg.n, 0.5, 0.2),
                           [&](const MicroState& before, const MicroState& after) {
                             const double d = (cfg.beta * after.m() - after.zeta) - (cfg.beta * before.m() - before.zeta);
                             worst = std::max(worst, std::abs(d));
                           });
  return {tr.jumps >= 1000000 && worst <= 1e-12, format("%lld jumps, max change %.3g", (long long)tr.jumps, worst)};
}

// Hand-expanded critical-line Lagrangians for the two builtin rates, with
// the prefactor 1/(16β²x) and Γ(0) = 1.
inline double explicit_lagrangian_tanh(double beta, double x, double v) {
  const double d = v + 0.5 * beta * x * x;
  return d * d / (16.0 * beta * beta * x);
}
inline double explicit_lagrangian_exp(double beta, double x, double v) {
  const double d = v + 0.25 * (3.0 - beta) * x * x;
  return d * d / (16.0 * beta * beta * x);
}
// Tri-critical Lagrangian in the Γ'''/Γ'' parametrization (fourth power of Γ(0) in the drift).
inline double tricritical_lagrangian_literal(const GammaModel& gamma, double x, double v) {
  const auto g = gamma.at_zero();
  const double drift = std::pow(g[0], 4) / (96.0 * g[3]) * (5.0 * g[4] * g[3] - 3.0 * g[5] * g[2]);
  const double d = v + drift * x * x * x;
  return g[0] * g[3] * g[3] / (144.0 * g[2] * g[2] * x) * d * d;
}

inline Outcome legendre_duality() {
  const auto t = GammaModel::tanh_plus_one();
  const auto e = GammaModel::exponential();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ux(0.01, 5.0), uv(-5.0, 5.0);
  struct Case {
    std::string name;
    RegimeSpec spec;
    std::function<double(double, double)> closed;
  };
  const auto sl_t = critical_line_regime(2.0, t);
  const auto sl_e = critical_line_regime(2.0, e);
  const auto sl_e25 = critical_line_regime(2.5, e);
  const auto tri = tricritical_regime(e);
  std::vector<Case> cases{
      {"critical tanh", sl_t, [&](double x, double v) { return lagrangian(sl_t, x, v); }},
      {"critical exp", sl_e, [&](double x, double v) { return lagrangian(sl_e, x, v); }},
      {"tricritical exp", tri, [&](double x, double v) { return lagrangian(tri, x, v); }},
      {"tricritical exp (explicit)", tri, [&](double x, double v) { return tricritical_lagrangian_literal(e, x, v); }},
      {"explicit tanh", sl_t, [](double x, double v) { return explicit_lagrangian_tanh(2.0, x, v); }},
      {"explicit exp", sl_e, [](double x, double v) { return explicit_lagrangian_exp(2.0, x, v); }},
      {"explicit exp beta=2.5", sl_e25, [](double x, double v) { return explicit_lagrangian_exp(2.5, x, v); }},
  };
  bool ok = true;
  std::string d;
  for (const auto& c : cases) {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double x = ux(rng), v = uv(rng);
      const double err = std::abs(legendre_dual(c.spec, x, v) - c.closed(x, v)) / std::max(1.0, c.closed(x, v));
      worst = std::max(worst, err);
    }
    ok = ok && worst <= 1e-6;
    d += format("%s%s %.2g", d.empty() ? "" : ", ", c.name.c_str(), worst);
  }
  return {ok, "max rel. error: " + d};
}

inline Outcome averaging_identities() {
  const auto e = GammaModel::exponential();
  const auto t = GammaModel::tanh_plus_one();
  double avg_err = 0.0;
  auto quad_avg = [](const AngularHamiltonian& h, double r, double p) {
    const int nodes = 512;
    double s = 0.0;
    for (int j = 0; j < nodes; ++j) s += h(2.0 * std::numbers::pi * j / nodes, r, p);
    return s / nodes;
  };
  struct Avg {
    int nu;
    double beta;
    const GammaModel* g;
    RegimeSpec spec;
  };
  const std::vector<Avg> avgs{{2, 2.0, &e, critical_line_regime(2.0, e)},
                              {2, 2.0, &t, critical_line_regime(2.0, t)},
                              {4, 3.0, &e, tricritical_regime(e)}};
  for (const auto& a : avgs) {
    const AngularHamiltonian h(a.nu, a.beta, *a.g);
    for (double r : {0.0, 0.3, 1.0, 2.5}) {
      for (double p : {-1.0, 0.0, 0.4, 2.0}) {
        avg_err = std::max(avg_err, std::abs(quad_avg(h, r, p) - averaged_H(r, p, a.spec)));
      }
    }
  }
  double res1 = 0.0, res2 = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double r = 0.1 + 0.1 * i;
    const FunctionJet f{std::log1p(r), 1.0 / (1.0 + r), -1.0 / ((1.0 + r) * (1.0 + r))};
    for (int j = 0; j < 64; ++j) {
      const double th = 2.0 * std::numbers::pi * j / 64.0;
      res1 = std::max(res1, std::abs(first_order_residual(r, th, f, 2.0, e)));
      res1 = std::max(res1, std::abs(first_order_residual(r, th, f, 2.0, t)));
      res2 = std::max(res2, std::abs(second_order_residual(r, th, f, 3.0, e)));
    }
  }
  return {avg_err <= 1e-10 && res1 <= 1e-8 && res2 <= 1e-7,
          format("average error %.2g, first-order residual %.2g, second-order residual %.2g", avg_err, res1, res2)};
}

inline Outcome zero_cost_path() {
  const auto spec = critical_line_regime(2.0, GammaModel::tanh_plus_one());
  const int points = 10000;
  const double T = 10.0;
  std::vector<double> ts(points), xs(points);
  for (int i = 0; i < points; ++i) {
    ts[i] = T * i / (points - 1);
    xs[i] = 1.0 / (1.0 + spec.b * ts[i]);
  }
  const double s = action(spec, ts, xs);

  double drift = 0.0;
  for (const auto& sp : {spec, tricritical_regime(GammaModel::exponential())}) {
    // Relaxation (p0 = 0), small momenta, and the zero-energy escape branch
    // p = b x^{k-1}/a, all of which stay finite up to t = 5.
    const double xe = sp.k == 2 ? 0.1 : 1.0;
    const double pe = sp.b * std::pow(xe, sp.k - 1) / sp.a;
    for (const auto& [x0, p0] : {std::pair{1.0, 0.0}, {0.5, 0.001}, {1.0, 0.001}, {xe, pe}}) {
      const auto path = hamiltonian_flow(sp, x0, p0, 5.0, 1e-13, 1e-2);
      const double h0 = averaged_H(x0, p0, sp);
      for (const auto& st : path.states) drift = std::max(drift, std::abs(averaged_H(st[0], st[1], sp) - h0));
    }
  }
  return {s <= 1e-10 && drift <= 1e-8, format("action %.3g, energy drift %.3g", s, drift)};
}

inline std::vector<double> containment_grid() {
  std::vector<double> grid{0.0};
  for (int i = 0; i <= 20000; ++i) grid.push_back(10.0 * i / 20000.0);
  for (int i = 0; i <= 20000; ++i) grid.push_back(std::pow(10.0, -8.0 + 14.0 * i / 20000.0));
  std::sort(grid.begin(), grid.end());
  return grid;
}

inline Outcome containment() {
  const auto grid = containment_grid();
  bool ok = true;
  std::string d;
  const std::vector<std::pair<std::string, RegimeSpec>> specs{
      {"critical tanh", critical_line_regime(2.0, GammaModel::tanh_plus_one())},
      {"critical exp", critical_line_regime(2.0, GammaModel::exponential())},
      {"tricritical exp", tricritical_regime(GammaModel::exponential())}};
  for (const auto& [name, spec] : specs) {
    const double sup = containment_check(spec, grid);
    ok = ok && std::isfinite(sup) && sup <= spec.a / 4.0 + 1e-9;
    d += format("%s%s sup %.6g (a/4 = %.6g)", d.empty() ? "" : ", ", name.c_str(), sup, spec.a / 4.0);
  }
  return {ok, d};
}

struct TrendSettings {
  double delta = 0.43;
  double horizon = 1.0;
  std::vector<int> n_values{2000, 8000, 32000};
  std::vector<std::int64_t> replicas{10000, 10000, 40000};
  std::uint64_t seed = 424242;
};

inline Outcome mdp_trend(unsigned threads, const TrendSettings& ts = {}) {
  const auto g = GammaModel::tanh_plus_one();
  std::vector<double> rates;
  std::string d;
  bool ok = true;
  for (std::size_t i = 0; i < ts.n_values.size(); ++i) {
    const int n = ts.n_values[i];
    ExitQuery q;
    q.base.n = n;
    q.base.beta = 1.0;
    q.base.kappa = 2.0;
    q.base.t_max = ts.horizon;
    q.base.record_dt = ts.horizon;
    q.base.seed = ts.seed;
    q.init = MicroState::from_up_count(n, n / 2, 0.0);
    q.replicas = ts.replicas[i];
    q.threads = threads;
    q.delta = ts.delta;
    q.observable = Observable::AbsM;
    q.b_n = std::pow(static_cast<double>(n), 0.25);
    q.horizon = ts.horizon;
    const auto est = estimate_exit_probability(q, g);
    if (i == 0) ok = ok && est.p_hat >= 0.01 && est.p_hat <= 0.2;
    ok = ok && est.rate_defined && est.rate_hat > 0.0;
    rates.push_back(est.rate_defined ? est.rate_hat : NAN);
    d += format("%sn=%d p=%.5f (%lld hits) rate=%.5f", d.empty() ? "" : "; ", n, est.p_hat, (long long)est.hits,
                est.rate_hat);
  }
  const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
  const double spread = (*hi - *lo) / *lo;
  ok = ok && std::isfinite(spread) && spread < 0.3;
  return {ok, d + format("; relative spread %.3f", spread)};
}

inline std::vector<Check> acceptance(unsigned threads) {
  return {
      {"1", "critical line formula", 1e-3, critical_line_formula},
      {"2", "tri-critical point", 1e-3, tricritical_point},
      {"3", "scenario discrimination", 1e-3, scenario_discrimination},
      {"4", "phase diagram", 600.0, [threads] { return phase_diagram(threads); }},
      {"5", "limit cycle existence and uniqueness", 60.0, limit_cycle_uniqueness},
      {"6", "law of large numbers", 120.0, [threads] { return law_of_large_numbers(threads); }},
      {"7", "jump invariant", 30.0, jump_invariant},
      {"8", "Legendre duality", 10.0, legendre_duality},
      {"9", "averaging and perturbation identities", 30.0, averaging_identities},
      {"10", "zero-cost path and energy conservation", 5.0, zero_cost_path},
      {"11", "containment", 1.0, containment},
      {"12", "moderate deviation scaling trend", 1800.0, [threads] { return mdp_trend(threads); }},
  };
}

// ---------------------------------------------------------------------------
// Module invariants (quick)

inline Outcome gamma_derivatives() {
  double worst = 0.0;
  for (const auto& g : {GammaModel::tanh_plus_one(), GammaModel::exponential()}) {
    for (int k = 1; k <= 4; ++k) {
      for (double u = -3.0; u <= 3.0; u += 0.25) {
        const double h = 1e-4;
        const double fd = (g.deriv(k - 1, u + h) - g.deriv(k - 1, u - h)) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - g.deriv(k, u)) / std::max(1.0, std::abs(g.deriv(k, u))));
      }
    }
  }
  return {worst <= 1e-6, format("max rel. deviation from finite differences %.2g", worst)};
}

inline Outcome gamma_assumptions() {
  const auto grid = uniform_grid(-5.0, 5.0, 1001);
  const bool ok = validate(GammaModel::tanh_plus_one(), grid).admissible() &&
                  validate(GammaModel::exponential(), grid).admissible() &&
                  !validate(GammaModel::custom("neg", [](int, double) { return -1.0; }), grid).positive;
  return {ok, "builtin models admissible, negative constant rejected"};
}

inline Outcome ensemble_determinism() {
  const auto g = GammaModel::exponential();
  SimConfig cfg;
  cfg.n = 200;
  cfg.t_max = 2.0;
  cfg.record_dt = 0.1;
  cfg.seed = 5;
  const auto init = MicroState::from_magnetization(200, 0.2, 0.1);
  const auto a = run_ensemble(cfg, g, init, 4, 1);
  const auto b = run_ensemble(cfg, g, init, 4, 4);
  bool same = a.size() == b.size();
  for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i].m == b[i].m && a[i].zeta == b[i].zeta;
  bool lattice = true;
  for (const auto& tr : a) {
    for (double m : tr.m) {
      const double k = cfg.n * (m + 1.0) / 2.0;
      lattice = lattice && std::abs(k - std::round(k)) <= 1e-9;
    }
  }
  return {same && lattice, format("thread-independent %s, lattice %s", same ? "yes" : "no", lattice ? "yes" : "no")};
}

inline Outcome subcritical_attraction() {
  const auto g = GammaModel::tanh_plus_one();
  const auto path = integrate({0.5, 0.2}, 1.0, 2.0, g, 50.0, 1e-10, 1.0);
  const auto& end = path.states.back();
  const double norm = std::hypot(end[0], end[1]);
  bool contracting = true;
  for (double r : {0.05, 0.2, 0.5, 0.8}) contracting = contracting && return_map(r, 1.0, 2.0, g).next_radius < r;
  return {norm <= 1e-6 && contracting, format("|state(50)| = %.3g, return map contracting %s", norm,
                                               contracting ? "yes" : "no")};
}

inline Outcome lienard_round_trip() {
  const auto g = GammaModel::exponential();
  double worst = 0.0;
  for (double z : {-2.0, -0.5, 0.3, 1.7}) worst = std::max(worst, std::abs(lienard_I_inverse(lienard_I(z, g), g) - z));
  double tanh_err = 0.0;
  for (double z : {-3.0, 0.1, 2.0}) tanh_err = std::max(tanh_err, std::abs(lienard_I(z, GammaModel::tanh_plus_one()) - z / 2));
  return {worst <= 1e-9 && tanh_err <= 1e-14, format("round trip %.2g, tanh I(z) - z/2 %.2g", worst, tanh_err)};
}

inline Outcome fixed_point_counts() {
  const auto e = GammaModel::exponential();
  const auto t = GammaModel::tanh_plus_one();
  const auto bd = beta_delta(6.0, e);
  const std::size_t c1 = xi_fixed_points(4.1, 6.0, e).size();
  const std::size_t c2 = xi_fixed_points(1.5, 2.0, t).size();
  const std::size_t c3 = bd ? xi_fixed_points(0.5 * (*bd + 4.0), 6.0, e).size() : 0;
  const bool absent = !beta_delta(2.0, e).has_value();
  return {c1 == 1 && c2 == 0 && c3 == 2 && absent,
          format("roots: %zu (exp, beta>beta_c), %zu (tanh, beta<beta_c), %zu (exp, beta_delta<beta<beta_c); "
                 "no tangency at kappa=2: %s",
                 c1, c2, c3, absent ? "yes" : "no")};
}

inline Outcome rescaling_examples() {
  const auto e = GammaModel::exponential();
  const auto mz = rescale_MZ(0.1, 0.1, 10.0, 2.0, e);
  const auto back = unscale_MZ(mz, 10.0, 2.0, e);
  const auto p = to_polar(1.0, 0.0);
  const auto q = to_polar(0.0, 1.0);
  const bool ok = std::abs(mz.M - 1.0) <= 1e-12 && std::abs(mz.Z - 1.0) <= 1e-12 && std::abs(back.m - 0.1) <= 1e-12 &&
                  std::abs(back.zeta - 0.1) <= 1e-12 && std::abs(p.theta - std::numbers::pi / 2) <= 1e-15 &&
                  q.theta == 0.0 && to_polar(0.0, 0.0).degenerate;
  return {ok, format("(M, Z) = (%.15g, %.15g)", mz.M, mz.Z)};
}

inline Outcome subcritical_duality() {
  const auto spec = subcritical_regime(1.0, 2.0, GammaModel::tanh_plus_one());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  bool off_inf = true;
  for (int i = 0; i < 100; ++i) {
    const Vec2 s{u(rng), u(rng)};
    const double vx = u(rng);
    const Vec2 v{vx, spec.beta * vx - spec.kappa * s[1]};
    const double l = lagrangian(spec, s, v);
    worst = std::max(worst, std::abs(legendre_dual(spec, s, v) - l) / std::max(1.0, l));
    off_inf = off_inf && std::isinf(legendre_dual(spec, s, {v[0], v[1] + 0.1})) && std::isinf(lagrangian(spec, s, {v[0], v[1] + 0.1}));
  }
  return {worst <= 1e-6 && off_inf, format("max rel. error %.2g", worst)};
}

inline std::vector<Check> invariants() {
  return {
      {"gamma.derivatives", "builtin derivatives match finite differences", 0.0, gamma_derivatives},
      {"gamma.validate", "standing assumptions", 0.0, gamma_assumptions},
      {"microsim.determinism", "ensemble thread independence and lattice", 0.0, ensemble_determinism},
      {"macroflow.subcritical", "global attraction below beta_c", 0.0, subcritical_attraction},
      {"macroflow.lienard", "Lienard transform round trip", 0.0, lienard_round_trip},
      {"phases.fixed_points", "fixed-point counts and tangency", 0.0, fixed_point_counts},
      {"moddev.rescaling", "rescaling and polar map", 0.0, rescaling_examples},
      {"moddev.subcritical", "subcritical Legendre duality", 0.0, subcritical_duality},
  };
}

}  // namespace cwdiss::checks
