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

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cwdiss/moddev.hpp"
#include "expect_error.hpp"

using namespace cwdiss;

namespace {

const GammaModel kExp = GammaModel::exponential();
const GammaModel kTanh = GammaModel::tanh_plus_one();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class F>
double simpson(F&& f, double a, double b, int m = 4000) {
  const double h = (b - a) / (2 * m);
  double s = f(a) + f(b);
  for (int i = 1; i < 2 * m; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

double periodic_mean(const std::function<double(double)>& f, int nodes = 512) {
  double s = 0.0;
  for (int j = 0; j < nodes; ++j) s += f(kTwoPi * j / nodes);
  return s / nodes;
}

FunctionJet log_jet(double r) { return {std::log1p(r), 1.0 / (1.0 + r), -1.0 / ((1.0 + r) * (1.0 + r))}; }

}  // namespace

TEST(Moddev, KConstants) {
  const auto e = k_constants(2.0, kExp);
  EXPECT_DOUBLE_EQ(e.K0, 1.0);
  EXPECT_DOUBLE_EQ(e.K1, -1.0);
  EXPECT_DOUBLE_EQ(e.K2, -3.0);
  const auto t = k_constants(2.0, kTanh);
  EXPECT_DOUBLE_EQ(t.K0, 1.0);
  EXPECT_DOUBLE_EQ(t.K1, -4.0);
  EXPECT_DOUBLE_EQ(t.K2, 32.0);
  EXPECT_DOUBLE_EQ(k_constants(3.0, kExp).K1, 0.0);
}

TEST(Moddev, Rescaling) {
  const auto z = rescale_MZ(0.0, 0.0, 7.0, 2.0, kExp);
  EXPECT_EQ(z.M, 0.0);
  EXPECT_EQ(z.Z, 0.0);
  const auto p = rescale_MZ(0.1, 0.1, 10.0, 2.0, kExp);
  EXPECT_NEAR(p.M, 1.0, 1e-12);
  EXPECT_NEAR(p.Z, 1.0, 1e-12);
  for (double m : {-0.4, 0.05, 0.9}) {
    const auto q = rescale_MZ(m, -0.3, 12.5, 2.5, kTanh);
    const auto back = unscale_MZ(q, 12.5, 2.5, kTanh);
    EXPECT_NEAR(back.m, m, 1e-12);
    EXPECT_NEAR(back.zeta, -0.3, 1e-12);
  }
  EXPECT_ERRC(rescale_MZ(0.1, 0.1, 1.0, 0.5, kTanh), NonPositiveK0);
}

TEST(Moddev, PolarMap) {
  auto p = to_polar(1.0, 0.0);
  EXPECT_DOUBLE_EQ(p.r, 1.0);
  EXPECT_DOUBLE_EQ(p.theta, std::numbers::pi / 2);
  p = to_polar(0.0, 1.0);
  EXPECT_EQ(p.theta, 0.0);
  p = to_polar(0.0, 0.0);
  EXPECT_TRUE(p.degenerate);
  const auto [x0, xi0] = from_polar(p);
  EXPECT_EQ(x0, 0.0);
  EXPECT_EQ(xi0, 0.0);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng), xi = u(rng);
    const auto q = to_polar(x, xi);
    EXPECT_GE(q.theta, 0.0);
    EXPECT_LT(q.theta, kTwoPi);
    const auto [x1, xi1] = from_polar(q);
    EXPECT_NEAR(x1, x, 1e-12);
    EXPECT_NEAR(xi1, xi, 1e-12);
  }
  // Negative x lies in the lower half (θ > π).
  EXPECT_GT(to_polar(-1.0, 0.0).theta, std::numbers::pi);
}

TEST(Moddev, TrigIntegralsMatchQuadrature) {
  for (int i = 0; i <= 8; ++i) {
    for (int j = 0; i + j <= 8; ++j) {
      for (double th : {0.0, 0.7, 2.0, 4.5, kTwoPi, 9.0}) {
        const double q = simpson([&](double a) { return trig_monomial(i, j, a); }, 0.0, th);
        EXPECT_NEAR(trig_integral(i, j, th), q, 1e-12) << i << "," << j << " θ=" << th;
      }
      EXPECT_NEAR(trig_average(i, j), periodic_mean([&](double a) { return trig_monomial(i, j, a); }), 1e-14);
    }
  }
  EXPECT_DOUBLE_EQ(trig_average(4, 0), 3.0 / 8.0);
  EXPECT_DOUBLE_EQ(trig_average(6, 0), 5.0 / 16.0);
  EXPECT_DOUBLE_EQ(trig_average(2, 0), 0.5);
  EXPECT_EQ(trig_average(3, 1), 0.0);
}

TEST(Moddev, RegimeCoefficients) {
  const auto e = critical_line_regime(2.0, kExp);
  EXPECT_DOUBLE_EQ(e.kappa, 2.0);
  EXPECT_DOUBLE_EQ(e.a, 16.0);
  EXPECT_DOUBLE_EQ(e.b, 0.25);
  EXPECT_EQ(e.k, 2);
  EXPECT_DOUBLE_EQ(averaged_H(1.0, 1.0, e), 15.75);
  const auto t = critical_line_regime(2.0, kTanh);
  EXPECT_DOUBLE_EQ(t.b, 1.0);  // β/2 for tanh
  const auto tri = tricritical_regime(kExp);
  EXPECT_DOUBLE_EQ(tri.beta, 3.0);
  EXPECT_DOUBLE_EQ(tri.kappa, 4.0);
  EXPECT_DOUBLE_EQ(tri.b, 2.0 / 96.0);
  EXPECT_EQ(tri.k, 3);
  // The critical-line drift vanishes at the tri-critical β.
  EXPECT_EQ(critical_line_regime(3.0, kExp).b, 0.0);
  // 1/(4a) is the prefactor Γ(0)/(16β²).
  for (double beta : {1.5, 2.0, 3.7}) EXPECT_DOUBLE_EQ(1.0 / (4.0 * critical_line_regime(beta, kExp).a), 1.0 / (16.0 * beta * beta));
  EXPECT_ERRC(tricritical_regime(kTanh), RegimeMismatch);
  for (double p : {-2.0, 0.0, 3.0}) EXPECT_EQ(averaged_H(0.0, p, e), 0.0);
}

TEST(Moddev, AngularHamiltonianAverages) {
  struct Case {
    int nu;
    double beta;
    const GammaModel* g;
    RegimeSpec spec;
  };
  const std::vector<Case> cases{{2, 2.0, &kExp, critical_line_regime(2.0, kExp)},
                                {2, 2.5, &kTanh, critical_line_regime(2.5, kTanh)},
                                {4, 3.0, &kExp, tricritical_regime(kExp)}};
  for (const auto& c : cases) {
    for (double r : {0.0, 0.2, 1.0, 3.0}) {
      for (double p : {-1.5, 0.0, 0.5, 2.0}) {
        const double q = periodic_mean([&](double th) { return pre_averaged_H(th, r, p, c.nu, c.beta, *c.g); });
        EXPECT_NEAR(q, averaged_H(r, p, c.spec), 1e-10) << "nu=" << c.nu << " r=" << r << " p=" << p;
        const AngularHamiltonian h(c.nu, c.beta, *c.g);
        EXPECT_NEAR(h.average(r, p), averaged_H(r, p, c.spec), 1e-12);
        EXPECT_NEAR(h.integral(kTwoPi, r, p), kTwoPi * h.average(r, p), 1e-12);
      }
    }
  }
  EXPECT_EQ(pre_averaged_H(1.3, 2.0, 0.0, 2, 2.0, kExp), 0.0);
  EXPECT_ERRC(AngularHamiltonian(4, 2.0, kExp), RegimeMismatch);
  EXPECT_ERRC(AngularHamiltonian(3, 2.0, kExp), RegimeMismatch);
}

TEST(Moddev, TanhHasNoOddDriftTerm) {
  // Γ''(0) = 0: H_θ reduces to the O_{4,0} and O_{2,0} terms.
  const double beta = 2.0;
  const double k1 = k_constants(beta, kTanh).K1;
  for (double th : {0.3, 1.9, 4.0}) {
    const double r = 0.7, p = 1.1;
    const double expected = (2.0 / 3.0) * k1 * trig_monomial(4, 0, th) * r * r * p +
                            8.0 * beta * beta * trig_monomial(2, 0, th) * r * p * p;
    EXPECT_NEAR(pre_averaged_H(th, r, p, 2, beta, kTanh), expected, 1e-13);
  }
}

TEST(Moddev, PerturbationZeroth) {
  for (double r : {0.1, 1.0, 2.0}) {
    EXPECT_EQ(perturbation_lambda(0, r, 0.0, log_jet(r), 2.0, kExp), 0.0);
    EXPECT_NEAR(perturbation_lambda(0, r, kTwoPi, log_jet(r), 2.0, kExp), 0.0, 1e-13);
  }
  EXPECT_ERRC(perturbation_lambda(3, 1.0, 0.0, log_jet(1.0), 2.0, kExp), RegimeMismatch);
}

TEST(Moddev, PerturbationIdentities) {
  double r1 = 0.0, r2 = 0.0, r0 = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double r = 0.1 + 0.1 * i;
    for (int j = 0; j < 64; ++j) {
      const double th = kTwoPi * j / 64;
      r1 = std::max(r1, std::abs(first_order_residual(r, th, log_jet(r), 2.0, kExp)));
      r1 = std::max(r1, std::abs(first_order_residual(r, th, log_jet(r), 2.5, kTanh)));
      r2 = std::max(r2, std::abs(second_order_residual(r, th, log_jet(r), 3.0, kExp)));
      r0 = std::max(r0, std::abs(divergent_term_residual(r, th, log_jet(r), 3.0, kExp)));
    }
  }
  EXPECT_LE(r1, 1e-8);
  EXPECT_LE(r2, 1e-7);
  EXPECT_LE(r0, 1e-8);
}

TEST(Moddev, PerturbationSecondIsPeriodic) {
  for (double r : {0.3, 1.5}) {
    const auto f = log_jet(r);
    EXPECT_EQ(perturbation_lambda(2, r, 0.0, f, 3.0, kExp), 0.0);
    EXPECT_NEAR(perturbation_lambda(2, r, kTwoPi, f, 3.0, kExp), 0.0, 1e-12);
  }
}

TEST(Moddev, ExplicitLagrangians) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ux(0.01, 5.0), uv(-5.0, 5.0);
  for (double beta : {1.5, 2.0, 3.0}) {
    const auto t = critical_line_regime(beta, kTanh);
    const auto e = critical_line_regime(beta, kExp);
    for (int i = 0; i < 50; ++i) {
      const double x = ux(rng), v = uv(rng);
      const double lt = std::pow(v + 0.5 * beta * x * x, 2) / (16 * beta * beta * x);
      const double le = std::pow(v + 0.25 * (3 - beta) * x * x, 2) / (16 * beta * beta * x);
      EXPECT_NEAR(lagrangian(t, x, v), lt, 1e-12 * std::max(1.0, lt));
      EXPECT_NEAR(lagrangian(e, x, v), le, 1e-12 * std::max(1.0, le));
    }
  }
}

TEST(Moddev, LagrangianBoundaryCases) {
  const auto s = critical_line_regime(2.0, kExp);
  EXPECT_EQ(lagrangian(s, 0.0, 0.0), 0.0);
  EXPECT_TRUE(std::isinf(lagrangian(s, 0.0, 0.3)));
  EXPECT_TRUE(std::isinf(lagrangian(s, -0.1, 0.0)));
  for (double x : {0.1, 1.0, 4.0}) EXPECT_EQ(lagrangian(s, x, -s.b * x * x), 0.0);
  EXPECT_ERRC(lagrangian(s, Vec2{0, 0}, Vec2{0, 0}), RegimeMismatch);
}

TEST(Moddev, LegendreDuality) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> ux(0.01, 5.0), uv(-5.0, 5.0);
  for (const auto& spec : {critical_line_regime(2.0, kTanh), critical_line_regime(2.0, kExp), tricritical_regime(kExp)}) {
    for (int i = 0; i < 100; ++i) {
      const double x = ux(rng), v = uv(rng);
      const double l = lagrangian(spec, x, v);
      EXPECT_NEAR(legendre_dual(spec, x, v), l, 1e-6 * std::max(1.0, l));
    }
    EXPECT_EQ(legendre_dual(spec, 0.0, 0.0), 0.0);
    EXPECT_ERRC(legendre_dual(spec, 0.0, 1.0), UnboundedSup);
  }
}

TEST(Moddev, SubcriticalLagrangian) {
  const auto s = subcritical_regime(1.0, 2.0, kTanh);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const Vec2 st{u(rng), u(rng)};
    const double vx = u(rng);
    const Vec2 v{vx, s.beta * vx - s.kappa * st[1]};
    const double l = lagrangian(s, st, v);
    EXPECT_GE(l, 0.0);
    EXPECT_NEAR(legendre_dual(s, st, v), l, 1e-6 * std::max(1.0, l));
    EXPECT_TRUE(std::isinf(lagrangian(s, st, Vec2{v[0], v[1] + 1e-6})));
    EXPECT_TRUE(std::isinf(legendre_dual(s, st, Vec2{v[0], v[1] + 1e-6})));
    // Zero on the linear drift.
    const double vd = 2.0 * (s.gamma1 * st[1] - s.gamma0 * st[0]);
    EXPECT_EQ(lagrangian(s, st, Vec2{vd, s.beta * vd - s.kappa * st[1]}), 0.0);
  }
}

TEST(Moddev, ActionConstantPath) {
  const auto s = critical_line_regime(2.0, kExp);
  const std::vector<double> ts{0.0, 0.5, 1.0, 1.5, 2.0};
  const std::vector<double> xs(5, 0.8);
  EXPECT_NEAR(action(s, ts, xs), 2.0 * lagrangian(s, 0.8, 0.0), 1e-14);
  EXPECT_NEAR(action(s, ts, xs, [](double x) { return 10 * x; }), 8.0 + 2.0 * lagrangian(s, 0.8, 0.0), 1e-14);
  EXPECT_ERRC(action(s, std::vector<double>{0, 1}, std::vector<double>{1, 1}), TooFewPoints);
}

TEST(Moddev, ActionZeroCostRelaxation) {
  const auto s = critical_line_regime(2.0, kTanh);
  std::vector<double> ts(10000), xs(10000);
  for (int i = 0; i < 10000; ++i) {
    ts[i] = 10.0 * i / 9999;
    xs[i] = 1.0 / (1.0 + s.b * ts[i]);
  }
  EXPECT_LE(action(s, ts, xs), 1e-10);
}

TEST(Moddev, ActionEscapeFromZero) {
  // γ(t) = t² leaves 0 at finite cost: ℒ = (2 + b t³)² / (4a).
  const auto s = critical_line_regime(2.0, kExp);
  const int n = 4001;
  std::vector<double> ts(n), xs(n);
  for (int i = 0; i < n; ++i) {
    ts[i] = double(i) / (n - 1);
    xs[i] = ts[i] * ts[i];
  }
  const double exact = simpson([&](double t) { return std::pow(2 + s.b * t * t * t, 2) / (4 * s.a); }, 0.0, 1.0);
  // At the first node x = v = 0 and the integrand is taken as 0 rather than
  // its limit 1/a, so the trapezoid sum is short by h/(2a).
  const double h = 1.0 / (n - 1);
  EXPECT_NEAR(action(s, ts, xs), exact - h / (2.0 * s.a), 1e-9);
  // A jump off 0 has infinite cost.
  std::vector<double> ys{0.0, 0.5, 1.0};
  EXPECT_TRUE(std::isinf(action(s, std::vector<double>{0.0, 0.5, 1.0}, ys)));
}

TEST(Moddev, ActionSubcriticalConstraint) {
  const auto s = subcritical_regime(1.0, 2.0, kTanh);
  // Along the linearized relaxation the constraint holds and the cost vanishes.
  const int n = 2001;
  std::vector<double> ts(n);
  std::vector<Vec2> path(n);
  const auto ode = integrate_sampled(
      [&](const Vec2& z, Vec2& dz, double) {
        const double vx = 2.0 * (s.gamma1 * z[1] - s.gamma0 * z[0]);
        dz = {vx, s.beta * vx - s.kappa * z[1]};
      },
      {0.5, 0.2}, 2.0, 1e-13, 1e-3);
  for (int i = 0; i < n; ++i) {
    ts[i] = ode.times[i];
    path[i] = ode.states[i];
  }
  EXPECT_LE(action(s, ts, path, {}, 1e-5), 1e-10);
  path[1000][1] += 1e-3;
  EXPECT_TRUE(std::isinf(action(s, ts, path, {}, 1e-5)));
}

TEST(Moddev, HamiltonianFlow) {
  const auto s = critical_line_regime(2.0, kTanh);
  const auto relax = hamiltonian_flow(s, 1.0, 0.0, 5.0, 1e-12, 0.5);
  for (std::size_t i = 0; i < relax.size(); ++i) {
    EXPECT_NEAR(relax.states[i][0], 1.0 / (1.0 + s.b * relax.times[i]), 1e-10);
    EXPECT_EQ(relax.states[i][1], 0.0);
  }
  const auto path = hamiltonian_flow(s, 0.5, 0.001, 5.0, 1e-13, 0.01);
  const double h0 = averaged_H(0.5, 0.001, s);
  for (const auto& st : path.states) EXPECT_NEAR(averaged_H(st[0], st[1], s), h0, 1e-8);
  EXPECT_ERRC(hamiltonian_flow(s, -1.0, 0.0, 1.0), InvalidConfig);
}

TEST(Moddev, EscapeBranchHasFiniteAction) {
  // On H = 0 with p = b x/a the characteristic moves away from 0 and
  // ℒ = p ẋ, so the action is ∫ p dx = b (x₁² − x₀²) / (2a).
  const auto s = critical_line_regime(2.0, kTanh);
  const double x0 = 0.1;
  const auto path = hamiltonian_flow(s, x0, s.b * x0 / s.a, 9.0, 1e-13, 1e-3);
  std::vector<double> xs;
  for (const auto& st : path.states) xs.push_back(st[0]);
  EXPECT_NEAR(xs.back(), x0 / (1.0 - s.b * x0 * 9.0), 1e-8);
  const double exact = s.b * (xs.back() * xs.back() - x0 * x0) / (2.0 * s.a);
  EXPECT_NEAR(action(s, path.times, xs), exact, 1e-6);
}

TEST(Moddev, Containment) {
  for (const auto& s : {critical_line_regime(2.0, kTanh), critical_line_regime(2.0, kExp), tricritical_regime(kExp)}) {
    std::vector<double> grid{0.0};
    for (int i = 0; i <= 10000; ++i) grid.push_back(std::pow(10.0, -6.0 + 12.0 * i / 10000));
    const double sup = containment_check(s, grid);
    EXPECT_TRUE(std::isfinite(sup));
    EXPECT_LE(sup, s.a / 4 + 1e-9);
    EXPECT_EQ(containment_check(s, std::vector<double>{0.0}), 0.0);
    EXPECT_LT(containment_check(s, std::vector<double>{1e3, 1e4, 1e6}), 0.0);
  }
}

TEST(Moddev, Speed) {
  EXPECT_DOUBLE_EQ(mdp_speed(1e4, 10.0, 0), 100.0);
  EXPECT_DOUBLE_EQ(mdp_speed(1e8, 10.0, 2), 1e4);
}
