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

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "cwdiss/errors.hpp"
#include "cwdiss/gamma.hpp"
#include "cwdiss/macroflow.hpp"
#include "cwdiss/parallel.hpp"

namespace cwdiss {

/// Hopf line β_c(κ) = (κ + 2Γ(0)) / (2Γ'(0)).
inline double beta_c(double kappa, const GammaModel& gamma) {
  const double g1 = gamma.deriv(1, 0.0);
  if (g1 == 0.0) throw Error(Errc::DegenerateGamma, "Γ'(0) = 0");
  return (kappa + 2.0 * gamma(0.0)) / (2.0 * g1);
}

/// Tri-critical abscissa, defined only when Γ'''(0) > 0.
inline std::optional<double> kappa_tc(const GammaModel& gamma) {
  const auto g = gamma.at_zero();
  if (!(g[3] > 0.0)) return std::nullopt;
  return 6.0 * g[2] * g[1] / g[3] - 2.0 * g[0];
}

/// β_c(κ_tc) = 3Γ''(0)/Γ'''(0).
inline std::optional<double> beta_tc(const GammaModel& gamma) {
  const auto g = gamma.at_zero();
  if (!(g[3] > 0.0)) return std::nullopt;
  return 3.0 * g[2] / g[3];
}

/// First Lyapunov number of the focus at the origin on the Hopf line.
/// Negative: supercritical; positive: subcritical.
inline double lyapunov_number(double kappa, const GammaModel& gamma) {
  const auto g = gamma.at_zero();
  const double s = kappa + 2.0 * g[0];
  return -3.0 * std::numbers::pi * g[0] * s * (6.0 * g[2] * g[1] - s * g[3]) /
         (8.0 * std::sqrt(2.0 * kappa * g[0]) * g[1] * g[1] * g[1]);
}

/// Sign of the next-order Lyapunov quantity, −sgn[5Γ⁽⁴⁾Γ''' − 3Γ⁽⁵⁾Γ''] at 0.
inline int second_lyapunov_sign(const GammaModel& gamma) {
  const auto g = gamma.at_zero();
  const double q = 5.0 * g[4] * g[3] - 3.0 * g[5] * g[2];
  return q > 0.0 ? -1 : (q < 0.0 ? 1 : 0);
}

/// Ξ(u) = β(Γ(u) − Γ(−u)) / (Γ(u) + Γ(−u) + κ).
inline double xi_map(double u, double beta, double kappa, const GammaModel& gamma) {
  const double gp = gamma(u);
  const double gm = gamma(-u);
  return beta * (gp - gm) / (gp + gm + kappa);
}

inline double xi_slope_at_zero(double beta, double kappa, const GammaModel& gamma) {
  return 2.0 * beta * gamma.deriv(1, 0.0) / (kappa + 2.0 * gamma(0.0));
}

inline double xi_third_derivative_at_zero(double beta, double kappa, const GammaModel& gamma) {
  const auto g = gamma.at_zero();
  const double s = kappa + 2.0 * g[0];
  return -2.0 * beta * (6.0 * g[2] * g[1] - s * g[3]) / (s * s);
}

namespace detail {

// Ξ = β g with g = D/Q, D = Γ(u) − Γ(−u), Q = Γ(u) + Γ(−u) + κ.
struct XiJet {
  double g, g1, g2;
};

inline XiJet xi_jet(double u, double kappa, const GammaModel& gamma) {
  const double d0 = gamma(u) - gamma(-u);
  const double d1 = gamma.deriv(1, u) + gamma.deriv(1, -u);
  const double d2 = gamma.deriv(2, u) - gamma.deriv(2, -u);
  const double q0 = gamma(u) + gamma(-u) + kappa;
  const double q1 = gamma.deriv(1, u) - gamma.deriv(1, -u);
  const double q2 = gamma.deriv(2, u) + gamma.deriv(2, -u);
  const double g = d0 / q0;
  const double g1 = (d1 * q0 - d0 * q1) / (q0 * q0);
  const double g2 = (d2 * q0 - d0 * q2) / (q0 * q0) - 2.0 * q1 * (d1 * q0 - d0 * q1) / (q0 * q0 * q0);
  return {g, g1, g2};
}

}  // namespace detail

inline double default_u_max(double beta) { return std::min(5.0 * beta, 300.0); }

/// Positive roots of Ξ(u) = u on (0, u_max]: sign changes on a 2000-point
/// grid, then bisection to 1e-10.
inline std::vector<double> xi_fixed_points(double beta, double kappa, const GammaModel& gamma, double u_max) {
  if (!(u_max > 0.0)) throw Error(Errc::InvalidConfig, "u_max must be positive");
  constexpr int kNodes = 2000;
  auto f = [&](double u) { return xi_map(u, beta, kappa, gamma) - u; };
  std::vector<double> roots;
  double a = u_max / kNodes;
  double fa = f(a);
  for (int i = 2; i <= kNodes; ++i) {
    const double b = u_max * i / kNodes;
    const double fb = f(b);
    if (fa == 0.0) {
      roots.push_back(a);
    } else if ((fa < 0.0) != (fb < 0.0) && fb != 0.0) {
      double lo = a, hi = b, flo = fa;
      while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  if (fa == 0.0) roots.push_back(a);
  return roots;
}

inline std::vector<double> xi_fixed_points(double beta, double kappa, const GammaModel& gamma) {
  return xi_fixed_points(beta, kappa, gamma, default_u_max(beta));
}

// Newton also converges toward the trivial solution (u, β) → (0, β_c), where
// both residuals are O(u²); anything this close to 0 is rejected.
inline constexpr double kTrivialTangency = 1e-3;

struct TangencyPoint {
  double u = 0.0;
  double beta = 0.0;
};

/// Solves Ξ(u*) = u*, Ξ'(u*) = 1 with u* > 0 by damped Newton in (u, β),
/// restarting from several initial points. Absent when Γ'''(0) ≤ 0 or when no
/// restart reaches a tangency with u* > 0.
inline std::optional<TangencyPoint> tangency(double kappa, const GammaModel& gamma) {
  if (!(gamma.deriv(3, 0.0) > 0.0)) return std::nullopt;
  const double bc = beta_c(kappa, gamma);
  // Tangency points satisfy g(u) = u g'(u) for g = Ξ/β; sign changes of
  // g − u g' on a grid give starts near every nontrivial solution. The fixed
  // starts follow.
  std::vector<std::pair<double, double>> starts;
  {
    const double u_max = default_u_max(bc);
    double prev_u = 0.0, prev_h = 0.0;
    for (int i = 1; i <= 400; ++i) {
      const double u = u_max * i / 400.0;
      const auto j = detail::xi_jet(u, kappa, gamma);
      const double h = j.g - u * j.g1;
      if (i > 1 && ((prev_h < 0.0) != (h < 0.0))) {
        const double um = 0.5 * (u + prev_u);
        starts.emplace_back(um, um / detail::xi_jet(um, kappa, gamma).g);
      }
      prev_u = u;
      prev_h = h;
    }
  }
  const std::array<std::pair<double, double>, 8> fixed{{{1.0, 0.9 * bc},
                                                         {0.5, 0.9 * bc},
                                                         {2.0, 0.9 * bc},
                                                         {1.5, 0.95 * bc},
                                                         {3.0, 0.8 * bc},
                                                         {0.75, 0.98 * bc},
                                                         {4.0, 0.7 * bc},
                                                         {0.25, 0.99 * bc}}};
  starts.insert(starts.end(), fixed.begin(), fixed.end());
  for (const auto& [u0, b0] : starts) {
    double u = u0;
    double b = b0;
    bool ok = false;
    for (int it = 0; it < 100; ++it) {
      const auto j = detail::xi_jet(u, kappa, gamma);
      const double r1 = b * j.g - u;
      const double r2 = b * j.g1 - 1.0;
      const double norm = std::hypot(r1, r2);
      if (norm <= 1e-13) {
        ok = true;
        break;
      }
      // Jacobian of (r1, r2) with respect to (u, β).
      const double a11 = b * j.g1 - 1.0, a12 = j.g;
      const double a21 = b * j.g2, a22 = j.g1;
      const double det = a11 * a22 - a12 * a21;
      if (det == 0.0 || !std::isfinite(det)) break;
      const double du = (r1 * a22 - r2 * a12) / det;
      const double db = (a11 * r2 - a21 * r1) / det;
      double lambda = 1.0;
      bool moved = false;
      for (int k = 0; k < 30; ++k, lambda *= 0.5) {
        const double un = u - lambda * du;
        const double bn = b - lambda * db;
        if (!(un > 0.0) || !(bn > 0.0)) continue;
        const auto jn = detail::xi_jet(un, kappa, gamma);
        if (std::hypot(bn * jn.g - un, bn * jn.g1 - 1.0) < norm) {
          u = un;
          b = bn;
          moved = true;
          break;
        }
      }
      if (!moved) {
        ok = norm <= 1e-9;
        break;
      }
    }
    if (ok && u > kTrivialTangency && std::isfinite(b)) return TangencyPoint{u, b};
  }
  return std::nullopt;
}

inline std::optional<double> beta_delta(double kappa, const GammaModel& gamma) {
  const auto t = tangency(kappa, gamma);
  if (!t) return std::nullopt;
  return t->beta;
}

struct StarOptions {
  std::vector<double> radius_grid = default_radius_grid();
  CycleSearchOptions cycles;
  double tolerance = 1e-3;
};

inline bool has_stable_cycle(double beta, double kappa, const GammaModel& gamma, const StarOptions& opts) {
  for (const auto& c : find_cycles(beta, kappa, gamma, opts.radius_grid, opts.cycles)) {
    if (c.stability != CycleStability::Unstable) return true;
  }
  return false;
}

/// Saddle-node curve of cycles: infimum of β in [β_Δ, β_c) at which a
/// stable (or semistable) cycle exists, by bisection to `tolerance`.
inline std::optional<double> beta_star(double kappa, const GammaModel& gamma, const StarOptions& opts = {}) {
  const auto kt = kappa_tc(gamma);
  if (!kt || !(kappa > *kt)) return std::nullopt;
  const double bc = beta_c(kappa, gamma);
  const auto bd = beta_delta(kappa, gamma);
  double lo = bd ? *bd : 0.5 * bc;
  double hi = bc - 0.5 * opts.tolerance;
  if (!has_stable_cycle(hi, kappa, gamma, opts)) {
    throw Error(Errc::WindowEmpty, "no stable cycle just below β_c at κ = " + std::to_string(kappa));
  }
  if (has_stable_cycle(lo, kappa, gamma, opts)) return lo;
  while (hi - lo > opts.tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (has_stable_cycle(mid, kappa, gamma, opts)) hi = mid; else lo = mid;
  }
  return hi;
}

struct CriticalCurves {
  double kappa = 0.0;
  double beta_c = 0.0;
  std::optional<double> kappa_tc;
  std::optional<double> beta_delta;
  std::optional<double> beta_star;
  double sigma_L = 0.0;
};

inline CriticalCurves critical_curves(double kappa, const GammaModel& gamma, bool with_star = true,
                                      const StarOptions& opts = {}) {
  CriticalCurves c;
  c.kappa = kappa;
  c.beta_c = beta_c(kappa, gamma);
  c.kappa_tc = kappa_tc(gamma);
  c.sigma_L = lyapunov_number(kappa, gamma);
  if (c.kappa_tc && kappa > *c.kappa_tc) {
    c.beta_delta = beta_delta(kappa, gamma);
    if (with_star) c.beta_star = beta_star(kappa, gamma, opts);
  }
  return c;
}

enum class Phase { FP, LC, FP_plus_LC };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::FP: return "FP";
    case Phase::LC: return "LC";
    case Phase::FP_plus_LC: return "FP+LC";
  }
  return "?";
}

struct PhaseClassification {
  Phase label = Phase::FP;
  double beta = 0.0;
  double kappa = 0.0;
  double beta_c = 0.0;
  double sigma_L = 0.0;
  bool origin_stable = true;
  std::vector<CycleResult> cycles;
};

struct ClassifyOptions {
  std::vector<double> radius_grid = default_radius_grid();
  CycleSearchOptions cycles;
};

/// Linear stability of the origin decides LC (β ≥ β_c, ties go to LC);
/// below the Hopf line a stable or semistable cycle makes it FP+LC.
inline PhaseClassification classify(double beta, double kappa, const GammaModel& gamma,
                                    const ClassifyOptions& opts = {}) {
  if (!(beta > 0.0) || !(kappa > 0.0)) throw Error(Errc::InvalidConfig, "β and κ must be positive");
  PhaseClassification pc;
  pc.beta = beta;
  pc.kappa = kappa;
  pc.beta_c = beta_c(kappa, gamma);
  pc.sigma_L = lyapunov_number(kappa, gamma);
  pc.origin_stable = beta < pc.beta_c;
  pc.cycles = find_cycles(beta, kappa, gamma, opts.radius_grid, opts.cycles);
  if (!pc.origin_stable) {
    pc.label = Phase::LC;
  } else {
    bool stable_cycle = false;
    for (const auto& c : pc.cycles) stable_cycle = stable_cycle || c.stability != CycleStability::Unstable;
    pc.label = stable_cycle ? Phase::FP_plus_LC : Phase::FP;
  }
  return pc;
}

struct PhaseCell {
  double kappa = 0.0;
  double beta = 0.0;
  Phase label = Phase::FP;
  double beta_c = 0.0;
  double sigma_L = 0.0;
};

/// classify() on the lattice kappas × betas, row-major in κ.
inline std::vector<PhaseCell> scan_grid(const std::vector<double>& kappas, const std::vector<double>& betas,
                                        const GammaModel& gamma, unsigned threads = 1,
                                        const ClassifyOptions& opts = {}) {
  std::vector<PhaseCell> cells(kappas.size() * betas.size());
  parallel_for(cells.size(), threads, [&](std::size_t idx) {
    const double k = kappas[idx / betas.size()];
    const double b = betas[idx % betas.size()];
    const auto pc = classify(b, k, gamma, opts);
    cells[idx] = PhaseCell{k, b, pc.label, pc.beta_c, pc.sigma_L};
  });
  return cells;
}

}  // namespace cwdiss
