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
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "cwdiss/errors.hpp"
#include "cwdiss/gamma.hpp"
#include "cwdiss/ode.hpp"
#include "cwdiss/phases.hpp"

// Moderate deviations around the origin: rescaled coordinates, the angular
// (pre-averaged) and averaged Hamiltonians, the perturbations that remove
// the fast angle, and the regime Lagrangians with their action functionals.

namespace cwdiss {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Constants and coordinates

struct KConstants {
  double K0 = 0.0;
  double K1 = 0.0;
  double K2 = 0.0;
};

/// K_j = Γ(0)^{2j} [β Γ^{(2j+1)}(0) − (2j+1) Γ^{(2j)}(0)].
inline KConstants k_constants(double beta, const GammaModel& gamma) {
  const auto g = gamma.at_zero();
  KConstants k;
  k.K0 = beta * g[1] - g[0];
  k.K1 = std::pow(g[0], 2) * (beta * g[3] - 3.0 * g[2]);
  k.K2 = std::pow(g[0], 4) * (beta * g[5] - 5.0 * g[4]);
  return k;
}

/// √(Γ(0) K0), the angular frequency scale of the linearized flow.
inline double angular_scale(double beta, const GammaModel& gamma) {
  const double k0 = k_constants(beta, gamma).K0;
  const double g0 = gamma(0.0);
  if (!(g0 * k0 > 0.0)) {
    throw Error(Errc::NonPositiveK0, "Γ(0)(βΓ'(0) − Γ(0)) must be positive, got " + std::to_string(g0 * k0));
  }
  return std::sqrt(g0 * k0);
}

struct MZPoint {
  double M = 0.0;
  double Z = 0.0;
};

/// M = b_n(βm − ζ)/√(Γ(0)K0), Z = b_n ζ/Γ(0).
inline MZPoint rescale_MZ(double m, double zeta, double b_n, double beta, const GammaModel& gamma) {
  const double s = angular_scale(beta, gamma);
  return {b_n * (beta * m - zeta) / s, b_n * zeta / gamma(0.0)};
}

inline MacroState unscale_MZ(const MZPoint& p, double b_n, double beta, const GammaModel& gamma) {
  const double s = angular_scale(beta, gamma);
  const double zeta = p.Z * gamma(0.0) / b_n;
  return {(p.M * s / b_n + zeta) / beta, zeta};
}

/// (radius squared, angle). The angle satisfies x = √r sin θ, ξ = √r cos θ,
/// so increasing θ traverses a circle clockwise in the (ξ, x) plane.
struct PolarPoint {
  double r = 0.0;
  double theta = 0.0;
  bool degenerate = true;
};

inline PolarPoint to_polar(double x, double xi) {
  const double r = x * x + xi * xi;
  if (r == 0.0) return {};
  double theta = std::atan2(x, xi);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  if (theta >= 2.0 * std::numbers::pi) theta = 0.0;
  return {r, theta, false};
}

inline std::pair<double, double> from_polar(const PolarPoint& p) {
  if (p.degenerate || p.r == 0.0) return {0.0, 0.0};
  const double s = std::sqrt(p.r);
  return {s * std::sin(p.theta), s * std::cos(p.theta)};
}

/// Speed n·b_n^{−(ν+2)} of the moderate deviation principle (ν = 0 for the
/// unscaled subcritical case).
inline double mdp_speed(double n, double b_n, int nu) { return n * std::pow(b_n, -(nu + 2)); }

// ---------------------------------------------------------------------------
// Trigonometric monomials O_{i,j}(θ) = cos^i θ sin^j θ

inline double trig_monomial(int i, int j, double theta) {
  return std::pow(std::cos(theta), i) * std::pow(std::sin(theta), j);
}

/// ∫₀^θ cos^i α sin^j α dα by the standard reduction formulas.
inline double trig_integral(int i, int j, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  if (j >= 2) {
    return (-std::pow(c, i + 1) * std::pow(s, j - 1) + (j - 1) * trig_integral(i, j - 2, theta)) / (i + j);
  }
  if (i >= 2) {
    return (std::pow(c, i - 1) * std::pow(s, j + 1) + (i - 1) * trig_integral(i - 2, j, theta)) / (i + j);
  }
  if (i == 0 && j == 0) return theta;
  if (i == 1 && j == 0) return s;
  if (i == 0 && j == 1) return 1.0 - c;
  return 0.5 * s * s;  // i == 1, j == 1
}

/// (1/2π) ∫₀^{2π} O_{i,j}: (i−1)!!(j−1)!!/(i+j)!! for even i, j; else 0.
inline double trig_average(int i, int j) {
  if (i % 2 != 0 || j % 2 != 0) return 0.0;
  auto dfact = [](int k) {
    double r = 1.0;
    for (; k > 1; k -= 2) r *= k;
    return r;
  };
  return dfact(i - 1) * dfact(j - 1) / dfact(i + j);
}

// ---------------------------------------------------------------------------
// Regimes

enum class Regime { Subcritical, CriticalLine, TriCritical };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::Subcritical: return "subcritical";
    case Regime::CriticalLine: return "critical";
    case Regime::TriCritical: return "tricritical";
  }
  return "?";
}

/// Singular Hamiltonian H(x, p) = −b x^k p + a x p² (critical regimes), or
/// the constrained quadratic subcritical Hamiltonian.
struct RegimeSpec {
  Regime regime = Regime::CriticalLine;
  double a = 0.0;
  double b = 0.0;
  int k = 2;
  double beta = 0.0;
  double kappa = 0.0;
  double gamma0 = 0.0;
  double gamma1 = 0.0;
  int nu = 2;  // time-scale exponent: R_n(b_n^ν t)
};

inline RegimeSpec subcritical_regime(double beta, double kappa, const GammaModel& gamma) {
  RegimeSpec s;
  s.regime = Regime::Subcritical;
  s.beta = beta;
  s.kappa = kappa;
  s.gamma0 = gamma(0.0);
  s.gamma1 = gamma.deriv(1, 0.0);
  s.nu = 0;
  s.k = 1;
  return s;
}

/// Critical line κ = 2βΓ'(0) − 2Γ(0): a = 4β²/Γ(0), b = Γ(0)²(3Γ''(0) − βΓ'''(0))/4, k = 2.
inline RegimeSpec critical_line_regime(double beta, const GammaModel& gamma) {
  const auto g = gamma.at_zero();
  RegimeSpec s;
  s.regime = Regime::CriticalLine;
  s.beta = beta;
  s.kappa = 2.0 * beta * g[1] - 2.0 * g[0];
  s.gamma0 = g[0];
  s.gamma1 = g[1];
  s.a = 4.0 * beta * beta / g[0];
  s.b = 0.25 * g[0] * g[0] * (3.0 * g[2] - beta * g[3]);
  s.k = 2;
  s.nu = 2;
  return s;
}

/// Tri-critical point β = 3Γ''(0)/Γ'''(0): b = Γ(0)⁴(5Γ⁽⁴⁾(0) − βΓ⁽⁵⁾(0))/96, k = 3.
inline RegimeSpec tricritical_regime(const GammaModel& gamma) {
  const auto g = gamma.at_zero();
  if (!(g[3] > 0.0)) throw Error(Errc::RegimeMismatch, "no tri-critical point: Γ'''(0) <= 0");
  const double beta = 3.0 * g[2] / g[3];
  if (!(beta > 0.0)) throw Error(Errc::RegimeMismatch, "tri-critical β must be positive");
  RegimeSpec s;
  s.regime = Regime::TriCritical;
  s.beta = beta;
  s.kappa = 6.0 * g[2] * g[1] / g[3] - 2.0 * g[0];
  s.gamma0 = g[0];
  s.gamma1 = g[1];
  s.a = 4.0 * beta * beta / g[0];
  s.b = std::pow(g[0], 4) * (5.0 * g[4] - beta * g[5]) / 96.0;
  s.k = 3;
  s.nu = 4;
  return s;
}

/// H(r, p) = −b r^k p + a r p² for the critical regimes.
inline double averaged_H(double r, double p, const RegimeSpec& spec) {
  if (spec.regime == Regime::Subcritical) {
    throw Error(Errc::RegimeMismatch, "averaged_H is defined for the critical regimes");
  }
  return -spec.b * std::pow(r, spec.k) * p + spec.a * r * p * p;
}

/// Subcritical H((x,y),(p_x,p_y)) = d p_x + (βd − κy) p_y + 2Γ(0)(p_x + βp_y)², d = 2(Γ'(0)y − Γ(0)x).
inline double subcritical_H(const RegimeSpec& spec, const Vec2& state, const Vec2& momentum) {
  const double d = 2.0 * (spec.gamma1 * state[1] - spec.gamma0 * state[0]);
  const double q = momentum[0] + spec.beta * momentum[1];
  return d * momentum[0] + (spec.beta * d - spec.kappa * state[1]) * momentum[1] + 2.0 * spec.gamma0 * q * q;
}

// ---------------------------------------------------------------------------
// Angular Hamiltonians and perturbations

/// H_θ(r, p) = [c_odd O_{ν+1,1}(θ) + c_even O_{ν+2,0}(θ)] r^{ν/2+1} p + c_quad O_{2,0}(θ) r p².
class AngularHamiltonian {
 public:
  AngularHamiltonian(int nu, double beta, const GammaModel& gamma) : nu_(nu) {
    const auto g = gamma.at_zero();
    const auto k = k_constants(beta, gamma);
    const double w = angular_scale(beta, gamma);
    c_quad_ = 8.0 * beta * beta / g[0];
    if (nu == 2) {
      c_odd_ = -2.0 * g[0] * g[2] * w;
      c_even_ = 2.0 * k.K1 / 3.0;
    } else if (nu == 4) {
      const double scale = std::abs(std::pow(g[0], 2) * (beta * g[3] + 3.0 * g[2])) + 1.0;
      if (std::abs(k.K1) > 1e-12 * scale) {
        throw Error(Errc::RegimeMismatch, "ν = 4 requires K1 = 0 (tri-critical β), got K1 = " + std::to_string(k.K1));
      }
      c_odd_ = -std::pow(g[0], 3) * g[4] * w / 6.0;
      c_even_ = k.K2 / 30.0;
    } else {
      throw Error(Errc::RegimeMismatch, "ν must be 2 or 4");
    }
  }

  int nu() const { return nu_; }

  double operator()(double theta, double r, double p) const {
    const double rk = std::pow(r, nu_ / 2 + 1);
    return (c_odd_ * trig_monomial(nu_ + 1, 1, theta) + c_even_ * trig_monomial(nu_ + 2, 0, theta)) * rk * p +
           c_quad_ * trig_monomial(2, 0, theta) * r * p * p;
  }

  /// ∫₀^θ H_α(r, p) dα in closed form.
  double integral(double theta, double r, double p) const {
    const double rk = std::pow(r, nu_ / 2 + 1);
    return (c_odd_ * trig_integral(nu_ + 1, 1, theta) + c_even_ * trig_integral(nu_ + 2, 0, theta)) * rk * p +
           c_quad_ * trig_integral(2, 0, theta) * r * p * p;
  }

  /// (1/2π) ∫₀^{2π} H_θ(r, p) dθ.
  double average(double r, double p) const {
    const double rk = std::pow(r, nu_ / 2 + 1);
    return (c_odd_ * trig_average(nu_ + 1, 1) + c_even_ * trig_average(nu_ + 2, 0)) * rk * p +
           c_quad_ * trig_average(2, 0) * r * p * p;
  }

 private:
  int nu_;
  double c_odd_ = 0.0;
  double c_even_ = 0.0;
  double c_quad_ = 0.0;
};

inline double pre_averaged_H(double theta, double r, double p, int nu, double beta, const GammaModel& gamma) {
  return AngularHamiltonian(nu, beta, gamma)(theta, r, p);
}

/// Value and first two derivatives of a radial test function at r.
struct FunctionJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Perturbation Λ^{(order)}_f(r, θ), order ∈ {0, 1, 2}. Order 0 belongs to
/// ν = 2; orders 1 and 2 to ν = 4 (tri-critical β).
inline double perturbation_lambda(int order, double r, double theta, const FunctionJet& f, double beta,
                                  const GammaModel& gamma) {
  const double g0 = gamma(0.0);
  const double g2 = gamma.deriv(2, 0.0);
  const double w = angular_scale(beta, gamma);
  switch (order) {
    case 0: {
      const AngularHamiltonian h(2, beta, gamma);
      return (theta * h.average(r, f.d1) - h.integral(theta, r, f.d1)) / (2.0 * w);
    }
    case 1:
      return -0.25 * g0 * g2 * trig_monomial(4, 0, theta) * r * r * f.d1;
    case 2: {
      const AngularHamiltonian h(4, beta, gamma);
      const double c = g0 * g0 * g2 * g2 * w;
      return (theta * h.average(r, f.d1) - h.integral(theta, r, f.d1) +
              c / 6.0 * (trig_monomial(6, 0, theta) - 1.0) * std::pow(r, 3) * f.d1 +
              c / 16.0 * (trig_monomial(8, 0, theta) - 1.0) * std::pow(r, 4) * f.d2) /
             (2.0 * w);
    }
    default:
      throw Error(Errc::RegimeMismatch, "perturbation order must be 0, 1 or 2");
  }
}

/// H_θ(r, f') + 2√(Γ(0)K0) ∂_θΛ^{(0)} − H(r, f'), with ∂_θ by central differences.
inline double first_order_residual(double r, double theta, const FunctionJet& f, double beta, const GammaModel& gamma,
                                   double h = 1e-5) {
  const AngularHamiltonian ham(2, beta, gamma);
  const double w = angular_scale(beta, gamma);
  const double dl = (perturbation_lambda(0, r, theta + h, f, beta, gamma) -
                     perturbation_lambda(0, r, theta - h, f, beta, gamma)) /
                    (2.0 * h);
  return ham(theta, r, f.d1) + 2.0 * w * dl - ham.average(r, f.d1);
}

/// Residual of the second-order averaging condition (ν = 4).
inline double second_order_residual(double r, double theta, const FunctionJet& f, double beta,
                                    const GammaModel& gamma, double h = 1e-5) {
  const AngularHamiltonian ham(4, beta, gamma);
  const double w = angular_scale(beta, gamma);
  const double g0 = gamma(0.0);
  const double g2 = gamma.deriv(2, 0.0);
  const double c = g0 * g0 * g2 * g2 * w;
  const double dl = (perturbation_lambda(2, r, theta + h, f, beta, gamma) -
                     perturbation_lambda(2, r, theta - h, f, beta, gamma)) /
                    (2.0 * h);
  const double extra =
      c * (trig_monomial(5, 1, theta) * std::pow(r, 3) * f.d1 + 0.5 * trig_monomial(7, 1, theta) * std::pow(r, 4) * f.d2);
  return ham(theta, r, f.d1) + extra + 2.0 * w * dl - ham.average(r, f.d1);
}

/// −Γ(0)Γ''(0) O_{3,1}(θ) r² f'(r) + ∂_θΛ^{(1)}: the O(b_n²) term that Λ^{(1)} removes.
inline double divergent_term_residual(double r, double theta, const FunctionJet& f, double beta,
                                      const GammaModel& gamma, double h = 1e-5) {
  const double g0 = gamma(0.0);
  const double g2 = gamma.deriv(2, 0.0);
  const double dl = (perturbation_lambda(1, r, theta + h, f, beta, gamma) -
                     perturbation_lambda(1, r, theta - h, f, beta, gamma)) /
                    (2.0 * h);
  return -g0 * g2 * trig_monomial(3, 1, theta) * r * r * f.d1 + dl;
}

// ---------------------------------------------------------------------------
// Lagrangians

inline constexpr double kConstraintTol = 1e-9;

/// Critical regimes: (v + b x^k)² / (4 a x) for x > 0; at x = 0 the value is
/// 0 for v = 0 and +∞ otherwise. Negative x lies outside the state space.
inline double lagrangian(const RegimeSpec& spec, double x, double v) {
  if (spec.regime == Regime::Subcritical) {
    throw Error(Errc::RegimeMismatch, "use the two-dimensional subcritical Lagrangian");
  }
  if (x < 0.0) return kInf;
  if (x == 0.0) return v == 0.0 ? 0.0 : kInf;
  const double drift = v + spec.b * std::pow(x, spec.k);
  return drift * drift / (4.0 * spec.a * x);
}

/// Subcritical: |v_x − 2(Γ'(0)y − Γ(0)x)|² / (8Γ(0)) on v_y = βv_x − κy, +∞ off it.
inline double lagrangian(const RegimeSpec& spec, const Vec2& state, const Vec2& velocity,
                         double constraint_tol = kConstraintTol) {
  if (spec.regime != Regime::Subcritical) {
    throw Error(Errc::RegimeMismatch, "two-dimensional Lagrangian is subcritical only");
  }
  const double violation = velocity[1] - (spec.beta * velocity[0] - spec.kappa * state[1]);
  if (std::abs(violation) > constraint_tol) return kInf;
  const double dev = velocity[0] - 2.0 * (spec.gamma1 * state[1] - spec.gamma0 * state[0]);
  return dev * dev / (8.0 * spec.gamma0);
}

namespace detail {

// sup of a concave function of one variable: grow a symmetric bracket until
// the objective decreases at both ends, then Brent (golden section with
// parabolic steps).
template <class F>
double concave_sup(F&& phi, double center) {
  double half = 1.0;
  const double f0 = phi(center);
  for (int i = 0; i < 200; ++i, half *= 2.0) {
    if (phi(center + half) < f0 && phi(center - half) < f0) break;
    if (!std::isfinite(half)) throw Error(Errc::UnboundedSup, "supremum is unbounded");
  }
  auto neg = [&](double p) { return -phi(p); };
  const auto best = boost::math::tools::brent_find_minima(neg, center - half, center + half,
                                                          std::numeric_limits<double>::digits / 2);
  return -best.second;
}

}  // namespace detail

/// sup_p [p v − H(x, p)] computed numerically; independent of lagrangian().
inline double legendre_dual(const RegimeSpec& spec, double x, double v) {
  if (spec.regime == Regime::Subcritical) {
    throw Error(Errc::RegimeMismatch, "use the two-dimensional subcritical dual");
  }
  if (x < 0.0) throw Error(Errc::InvalidConfig, "x must be nonnegative");
  if (x == 0.0) {
    if (v == 0.0) return 0.0;
    throw Error(Errc::UnboundedSup, "H(0, p) = 0, so sup_p p v = +inf for v != 0");
  }
  auto phi = [&](double p) { return p * v - averaged_H(x, p, spec); };
  // The maximizer scales like |v|/(a x); start the bracket from p = 0 but at that scale.
  double scale = 1.0;
  for (int i = 0; i < 60 && phi(scale) > phi(0.0) && phi(2.0 * scale) > phi(scale); ++i) scale *= 2.0;
  for (int i = 0; i < 60 && phi(-scale) > phi(0.0) && phi(-2.0 * scale) > phi(-scale); ++i) scale *= 2.0;
  return detail::concave_sup(phi, 0.0);
}

/// Subcritical dual: sup over (p_x, p_y). Unbounded (+∞) unless the linear
/// constraint holds; otherwise a one-dimensional concave sup along p_x.
inline double legendre_dual(const RegimeSpec& spec, const Vec2& state, const Vec2& velocity,
                            double constraint_tol = kConstraintTol) {
  if (spec.regime != Regime::Subcritical) {
    throw Error(Errc::RegimeMismatch, "two-dimensional dual is subcritical only");
  }
  auto phi = [&](const Vec2& p) { return p[0] * velocity[0] + p[1] * velocity[1] - subcritical_H(spec, state, p); };
  // Along the direction (−β, 1) the quadratic part is flat and φ is linear
  // with slope v_y − βv_x + κy.
  const double far = 1e6;
  const double slope = (phi({-spec.beta * far, far}) - phi({spec.beta * far, -far})) / (2.0 * far);
  if (std::abs(slope) > constraint_tol) return kInf;
  return detail::concave_sup([&](double px) { return phi({px, 0.0}); }, 0.0);
}

// ---------------------------------------------------------------------------
// Action functionals

using InitialCost = std::function<double(double)>;
using InitialCost2 = std::function<double(const Vec2&)>;

namespace detail {

inline void check_path(std::span<const double> times, std::size_t values) {
  if (times.size() != values) throw Error(Errc::InvalidConfig, "times and values differ in length");
  if (times.size() < 3) throw Error(Errc::TooFewPoints, "action needs at least 3 samples");
}

// Central differences inside, second-order one-sided differences at the ends.
template <class Get>
double velocity(std::span<const double> t, std::size_t i, Get&& x) {
  const std::size_t n = t.size();
  if (i == 0) {
    const double h = t[1] - t[0];
    return (-3.0 * x(0) + 4.0 * x(1) - x(2)) / (2.0 * h);
  }
  if (i == n - 1) {
    const double h = t[n - 1] - t[n - 2];
    return (3.0 * x(n - 1) - 4.0 * x(n - 2) + x(n - 3)) / (2.0 * h);
  }
  return (x(i + 1) - x(i - 1)) / (t[i + 1] - t[i - 1]);
}

}  // namespace detail

/// I(γ) = I₀(γ(0)) + ∫ ℒ(γ, γ̇) dt for a sampled path in a critical regime,
/// treating the samples as a piecewise-smooth curve (trapezoid rule).
inline double action(const RegimeSpec& spec, std::span<const double> times, std::span<const double> x,
                     const InitialCost& initial_cost = {}) {
  detail::check_path(times, x.size());
  auto at = [&](std::size_t i) { return x[i]; };
  double total = initial_cost ? initial_cost(x[0]) : 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double v = detail::velocity(times, i, at);
    double l;
    if (x[i] == 0.0) {
      l = std::abs(v) > 1e-9 ? kInf : 0.0;
    } else {
      l = lagrangian(spec, x[i], v);
    }
    if (!std::isfinite(l)) return kInf;
    if (i > 0) total += 0.5 * (times[i] - times[i - 1]) * (prev + l);
    prev = l;
  }
  return total;
}

inline double action(const RegimeSpec& spec, std::span<const double> times, std::span<const Vec2> xy,
                     const InitialCost2& initial_cost = {}, double constraint_tol = kConstraintTol) {
  detail::check_path(times, xy.size());
  auto x_at = [&](std::size_t i) { return xy[i][0]; };
  auto y_at = [&](std::size_t i) { return xy[i][1]; };
  double total = initial_cost ? initial_cost(xy[0]) : 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Vec2 v{detail::velocity(times, i, x_at), detail::velocity(times, i, y_at)};
    const double l = lagrangian(spec, xy[i], v, constraint_tol);
    if (!std::isfinite(l)) return kInf;
    if (i > 0) total += 0.5 * (times[i] - times[i - 1]) * (prev + l);
    prev = l;
  }
  return total;
}

/// Characteristics ẋ = ∂_pH = −b x^k + 2a x p, ṗ = −∂_xH = k b x^{k−1} p − a p².
struct CharacteristicSystem {
  RegimeSpec spec;

  void operator()(const Vec2& s, Vec2& ds, double) const {
    const double x = s[0];
    const double p = s[1];
    ds = {-spec.b * std::pow(x, spec.k) + 2.0 * spec.a * x * p,
          spec.k * spec.b * std::pow(x, spec.k - 1) * p - spec.a * p * p};
  }
};

/// Path (x(t), p(t)) along the Hamiltonian characteristics.
inline Path2 hamiltonian_flow(const RegimeSpec& spec, double x0, double p0, double t_max, double tol = 1e-12,
                              double out_dt = 1e-3) {
  if (spec.regime == Regime::Subcritical) throw Error(Errc::RegimeMismatch, "characteristics for critical regimes");
  if (!(x0 >= 0.0)) throw Error(Errc::InvalidConfig, "x0 must be nonnegative");
  return integrate_sampled(CharacteristicSystem{spec}, {x0, p0}, t_max, tol, out_dt);
}

/// max over the grid of H(x, Υ'(x)) with Υ(x) = log(1 + x).
inline double containment_check(const RegimeSpec& spec, std::span<const double> x_grid) {
  double best = -kInf;
  for (double x : x_grid) {
    if (x < 0.0) throw Error(Errc::InvalidConfig, "containment grid must be nonnegative");
    best = std::max(best, averaged_H(x, 1.0 / (1.0 + x), spec));
  }
  return best;
}

}  // namespace cwdiss
