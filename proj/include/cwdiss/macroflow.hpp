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
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "cwdiss/errors.hpp"
#include "cwdiss/gamma.hpp"
#include "cwdiss/ode.hpp"
#include "cwdiss/parallel.hpp"

// Infinite-volume dynamics
//   ṁ = Γ(ζ) − Γ(−ζ) − m (Γ(ζ) + Γ(−ζ)),   ζ̇ = β ṁ − κ ζ,
// its Liénard form and the Poincaré return map on {ζ = 0, m > 0}.

namespace cwdiss {

struct MacroState {
  double m = 0.0;
  double zeta = 0.0;
};

inline Vec2 vector_field(const MacroState& s, double beta, double kappa, const GammaModel& gamma) {
  const double gp = gamma(s.zeta);
  const double gm = gamma(-s.zeta);
  const double dm = gp - gm - s.m * (gp + gm);
  return {dm, beta * dm - kappa * s.zeta};
}

/// (m, ζ) right-hand side in the form the integrators expect.
struct MacroSystem {
  double beta;
  double kappa;
  const GammaModel* gamma;

  void operator()(const Vec2& s, Vec2& ds, double) const { ds = vector_field({s[0], s[1]}, beta, kappa, *gamma); }
};

/// Sampled solution on [0, t_max]. Fails if m leaves [-1, 1] after starting inside.
inline Path2 integrate(const MacroState& init, double beta, double kappa, const GammaModel& gamma, double t_max,
                       double tol, double out_dt = 0.01) {
  const bool inside = std::abs(init.m) <= 1.0;
  return integrate_sampled(MacroSystem{beta, kappa, &gamma}, {init.m, init.zeta}, t_max, tol, out_dt,
                           [inside](const Vec2& s) {
                             if (inside && std::abs(s[0]) > 1.0 + 1e-9) {
                               throw std::logic_error("macroscopic flow left [-1, 1]: m = " + std::to_string(s[0]));
                             }
                           });
}

// ---------------------------------------------------------------------------
// Liénard coordinates x = ζ − βm, ξ = I(ζ).

/// I(ζ) = ∫₀^ζ du / (Γ(u) + Γ(−u)).
inline double lienard_I(double zeta, const GammaModel& gamma) {
  if (zeta == 0.0) return 0.0;
  if (gamma.kind() == GammaKind::TanhPlusOne) return 0.5 * zeta;  // Γ(u) + Γ(−u) ≡ 2
  if (gamma.kind() == GammaKind::Exp) return 0.5 * std::atan(std::sinh(zeta));  // half the Gudermannian
  auto integrand = [&](double u) { return 1.0 / (gamma(u) + gamma(-u)); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, zeta, 8, 1e-12);
}

/// Inverse of the strictly increasing map I by bracketed Newton.
inline double lienard_I_inverse(double xi, const GammaModel& gamma) {
  if (xi == 0.0) return 0.0;
  if (gamma.kind() == GammaKind::TanhPlusOne) return 2.0 * xi;
  if (gamma.kind() == GammaKind::Exp) {
    if (std::abs(xi) >= std::numbers::pi / 4) {
      throw Error(Errc::NewtonNoConvergence, "ξ = " + std::to_string(xi) + " is outside the range of I");
    }
    return std::asinh(std::tan(2.0 * xi));
  }
  const double target = std::abs(xi);
  double lo = 0.0;
  double hi = std::max(1.0, 2.0 * gamma(0.0) * target);
  double f_hi = lienard_I(hi, gamma) - target;
  while (f_hi < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 700.0) throw Error(Errc::NewtonNoConvergence, "ξ = " + std::to_string(xi) + " is outside the range of I");
    f_hi = lienard_I(hi, gamma) - target;
  }
  double z = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = lienard_I(z, gamma) - target;
    if (f > 0.0) hi = z; else lo = z;
    const double step = f * (gamma(z) + gamma(-z));
    double next = z - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - z) <= 1e-15 * std::max(1.0, std::abs(z)) || hi - lo <= 1e-15 * std::max(1.0, hi)) {
      return std::copysign(next, xi);
    }
    z = next;
  }
  throw Error(Errc::NewtonNoConvergence, "I⁻¹ did not converge for ξ = " + std::to_string(xi));
}

/// 𝔽(u) = ((Γ(u)+Γ(−u)+κ)u − β(Γ(u)−Γ(−u))) / (Γ(u)+Γ(−u)).
inline double lienard_F(double u, double beta, double kappa, const GammaModel& gamma) {
  const double gp = gamma(u);
  const double gm = gamma(-u);
  return ((gp + gm + kappa) * u - beta * (gp - gm)) / (gp + gm);
}

struct LienardState {
  double x = 0.0;
  double xi = 0.0;
};

inline LienardState to_lienard(const MacroState& s, double beta, const GammaModel& gamma) {
  return {s.zeta - beta * s.m, lienard_I(s.zeta, gamma)};
}

inline MacroState from_lienard(const LienardState& l, double beta, const GammaModel& gamma) {
  const double zeta = lienard_I_inverse(l.xi, gamma);
  return {(zeta - l.x) / beta, zeta};
}

/// ẋ = −κ I⁻¹(ξ), ξ̇ = x − 𝔽(I⁻¹(ξ)).
struct LienardSystem {
  double beta;
  double kappa;
  const GammaModel* gamma;

  void operator()(const Vec2& s, Vec2& ds, double) const {
    const double zeta = lienard_I_inverse(s[1], *gamma);
    ds = {-kappa * zeta, s[0] - lienard_F(zeta, beta, kappa, *gamma)};
  }
};

inline Path2 integrate_lienard(const LienardState& init, double beta, double kappa, const GammaModel& gamma,
                               double t_max, double tol, double out_dt = 0.01) {
  return integrate_sampled(LienardSystem{beta, kappa, &gamma}, {init.x, init.xi}, t_max, tol, out_dt);
}

/// W(x, ξ) = x²/2 + κ ∫₀^ξ I⁻¹(u) du, evaluated as κ ∫₀^{I⁻¹(ξ)} z / (Γ(z)+Γ(−z)) dz.
inline double lyapunov_W(const LienardState& l, double kappa, const GammaModel& gamma) {
  const double zeta = lienard_I_inverse(l.xi, gamma);
  double tail = 0.0;
  if (zeta != 0.0) {
    auto integrand = [&](double z) { return z / (gamma(z) + gamma(-z)); };
    tail = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, zeta, 8, 1e-12);
  }
  return 0.5 * l.x * l.x + kappa * tail;
}

// ---------------------------------------------------------------------------
// Return map on the section {ζ = 0, m > 0}. At ζ = 0 one has
// ζ̇ = −2βΓ(0)m < 0, so the section is transversal and every orbit crosses
// it from ζ > 0 to ζ < 0.

struct ReturnMapOptions {
  double rel_tol = 1e-11;
  double time_cap = 0.0;       // 0: derived from the linear frequency
  double collapse_ratio = 1e-7;  // |state| below this fraction of r0 counts as collapse
};

struct ReturnMapResult {
  double next_radius = 0.0;
  double period = 0.0;
};

inline ReturnMapResult return_map(double radius, double beta, double kappa, const GammaModel& gamma,
                                  const ReturnMapOptions& opts = {}) {
  if (!(radius > 0.0)) throw Error(Errc::InvalidConfig, "return map needs a positive radius");
  const double omega = std::sqrt(2.0 * kappa * gamma(0.0));
  const double cap = opts.time_cap > 0.0 ? opts.time_cap : 100.0 + 50.0 * 2.0 * std::numbers::pi / omega;

  DenseFlow<MacroSystem> flow(MacroSystem{beta, kappa, &gamma}, {radius, 0.0}, 0.0, opts.rel_tol,
                              opts.rel_tol * std::min(1.0, radius), 0.25);
  Vec2 prev{radius, 0.0};
  for (;;) {
    const auto [t0, t1] = flow.step();
    const Vec2 cur = flow.state();
    if (prev[1] > 0.0 && cur[1] <= 0.0) {
      double a = t0;
      double b = t1;
      Vec2 hit = cur;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        hit = flow.at(mid);
        if (std::abs(hit[1]) <= 1e-10 * std::min(1.0, radius) || b - a <= 1e-15 * std::max(1.0, b)) break;
        if (hit[1] > 0.0) a = mid; else b = mid;
      }
      const double t_hit = 0.5 * (a + b);
      if (!(hit[0] > 0.0)) {
        throw std::logic_error("section crossing with m <= 0 violates transversality");
      }
      return {hit[0], t_hit};
    }
    if (std::hypot(cur[0], cur[1]) < opts.collapse_ratio * radius) {
      throw Error(Errc::NoReturn, "orbit from r = " + std::to_string(radius) + " collapsed onto the origin");
    }
    if (t1 > cap) {
      throw Error(Errc::NoReturn, "no return to the section before t = " + std::to_string(cap));
    }
    prev = cur;
  }
}

enum class CycleStability { Stable, Unstable, Semistable };

inline const char* to_string(CycleStability s) {
  switch (s) {
    case CycleStability::Stable: return "Stable";
    case CycleStability::Unstable: return "Unstable";
    case CycleStability::Semistable: return "Semistable";
  }
  return "?";
}

struct CycleResult {
  bool found = false;
  double radius = 0.0;  // m-coordinate on the section
  double period = 0.0;
  CycleStability stability = CycleStability::Semistable;
  double floquet_slope = 1.0;  // derivative of the return map
};

struct CycleSearchOptions {
  ReturnMapOptions return_map;
  double semistable_band = 1e-3;
  unsigned threads = 1;
};

/// Geometric grid of section radii in [lo, hi]. m stays in [-1, 1], so
/// every cycle crosses the section below 1.
inline std::vector<double> default_radius_grid(std::size_t count = 40, double lo = 1e-3, double hi = 0.98) {
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) {
    g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return g;
}

inline CycleStability classify_slope(double slope, double band) {
  if (std::abs(slope) < 1.0 - band) return CycleStability::Stable;
  if (std::abs(slope) > 1.0 + band) return CycleStability::Unstable;
  return CycleStability::Semistable;
}

namespace detail {

class Displacement {
 public:
  Displacement(double beta, double kappa, const GammaModel& gamma, const ReturnMapOptions& opts)
      : beta_(beta), kappa_(kappa), gamma_(gamma), opts_(opts) {}

  /// P(r) − r, with P(r) = 0 when the orbit collapses onto the origin.
  double operator()(double r) const {
    try {
      return return_map(r, beta_, kappa_, gamma_, opts_).next_radius - r;
    } catch (const Error& e) {
      if (e.code() != Errc::NoReturn) throw;
      return -r;
    }
  }

  CycleResult describe(double r, double band) const {
    CycleResult c;
    c.found = true;
    c.radius = r;
    c.period = return_map(r, beta_, kappa_, gamma_, opts_).period;
    const double h = 1e-4 * r;
    const double up = return_map(r + h, beta_, kappa_, gamma_, opts_).next_radius;
    const double dn = return_map(r - h, beta_, kappa_, gamma_, opts_).next_radius;
    c.floquet_slope = (up - dn) / (2.0 * h);
    c.stability = classify_slope(c.floquet_slope, band);
    return c;
  }

  double root(double a, double b, double fa, double fb) const {
    boost::math::tools::eps_tolerance<double> tol(40);
    std::uintmax_t iters = 100;
    auto f = [this](double r) { return (*this)(r); };
    const auto br = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
    return 0.5 * (br.first + br.second);
  }

 private:
  double beta_;
  double kappa_;
  const GammaModel& gamma_;
  ReturnMapOptions opts_;
};

}  // namespace detail

/// Fixed points of the return map within the span of `radius_grid`: sign
/// changes of P(r) − r are refined by TOMS 748, and near-tangent local
/// extrema of the displacement are resolved by maximizing it first.
inline std::vector<CycleResult> find_cycles(double beta, double kappa, const GammaModel& gamma,
                                            const std::vector<double>& radius_grid,
                                            const CycleSearchOptions& opts = {}) {
  for (std::size_t i = 0; i < radius_grid.size(); ++i) {
    if (!(radius_grid[i] > 0.0) || (i > 0 && radius_grid[i] <= radius_grid[i - 1])) {
      throw Error(Errc::InvalidConfig, "radius grid must be positive and strictly increasing");
    }
  }
  const detail::Displacement disp(beta, kappa, gamma, opts.return_map);
  const std::size_t n = radius_grid.size();
  std::vector<double> d(n);
  parallel_for(n, opts.threads, [&](std::size_t i) { d[i] = disp(radius_grid[i]); });

  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (d[i] == 0.0) {
      roots.push_back(radius_grid[i]);
    } else if ((d[i] < 0.0) != (d[i + 1] < 0.0) && d[i + 1] != 0.0) {
      roots.push_back(disp.root(radius_grid[i], radius_grid[i + 1], d[i], d[i + 1]));
    }
  }
  if (n > 0 && d[n - 1] == 0.0) roots.push_back(radius_grid[n - 1]);

  // A pair of cycles can sit between two grid nodes with the same sign.
  std::vector<double> tangent;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const bool max_below = d[i] < 0.0 && d[i] > d[i - 1] && d[i] >= d[i + 1];
    const bool min_above = d[i] > 0.0 && d[i] < d[i - 1] && d[i] <= d[i + 1];
    if (!max_below && !min_above) continue;
    const double sign = max_below ? 1.0 : -1.0;
    auto neg = [&](double r) { return -sign * disp(r); };
    const auto best = boost::math::tools::brent_find_minima(neg, radius_grid[i - 1], radius_grid[i + 1], 30);
    const double r_ext = best.first;
    const double d_ext = -sign * best.second;
    if ((d_ext > 0.0) == max_below && d_ext != 0.0) {
      const double d_lo = disp(radius_grid[i - 1]);
      const double d_hi = disp(radius_grid[i + 1]);
      roots.push_back(disp.root(radius_grid[i - 1], r_ext, d_lo, d_ext));
      roots.push_back(disp.root(r_ext, radius_grid[i + 1], d_ext, d_hi));
    } else if (std::abs(d_ext) <= 1e-9 * r_ext) {
      tangent.push_back(r_ext);
    }
  }

  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-8 * std::max(1.0, b); }),
              roots.end());

  std::vector<CycleResult> out;
  for (double r : roots) out.push_back(disp.describe(r, opts.semistable_band));
  for (double r : tangent) {
    CycleResult c = disp.describe(r, opts.semistable_band);
    c.stability = CycleStability::Semistable;
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const CycleResult& a, const CycleResult& b) { return a.radius < b.radius; });
  return out;
}

}  // namespace cwdiss
