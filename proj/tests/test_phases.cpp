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

#include "cwdiss/phases.hpp"
#include "expect_error.hpp"

using namespace cwdiss;

namespace {

const GammaModel kExp = GammaModel::exponential();
const GammaModel kTanh = GammaModel::tanh_plus_one();

// Nontrivial tangency by one-dimensional bisection: with Ξ = βg, the system
// Ξ(u) = u, Ξ'(u) = 1 reduces to g(u) = u g'(u) and β = u/g(u).
std::pair<double, double> tangency_by_bisection(double kappa) {
  auto g = [&](double u) { return 2 * std::sinh(u) / (2 * std::cosh(u) + kappa); };
  auto g1 = [&](double u) {
    const double q = 2 * std::cosh(u) + kappa;
    return (2 * std::cosh(u) * q - 4 * std::sinh(u) * std::sinh(u)) / (q * q);
  };
  auto h = [&](double u) { return g(u) - u * g1(u); };
  double a = 0.05, b = 20.0;
  EXPECT_LT(h(a), 0.0);
  EXPECT_GT(h(b), 0.0);
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    (h(m) < 0 ? a : b) = m;
  }
  const double u = 0.5 * (a + b);
  return {u, u / g(u)};
}

template <class F>
double third_derivative(F&& f, double h) {
  return (f(2 * h) - 2 * f(h) + 2 * f(-h) - f(-2 * h)) / (2 * h * h * h);
}

}  // namespace

TEST(Phases, HopfLine) {
  EXPECT_DOUBLE_EQ(beta_c(2.0, kExp), 2.0);
  EXPECT_DOUBLE_EQ(beta_c(2.0, kTanh), 2.0);
  EXPECT_NEAR(beta_c(1e-12, kExp), 1.0, 1e-12);
  const auto flat = GammaModel::custom("flat", [](int k, double) { return k == 0 ? 1.0 : 0.0; });
  EXPECT_ERRC(beta_c(1.0, flat), DegenerateGamma);
}

TEST(Phases, TriCriticalPoint) {
  EXPECT_DOUBLE_EQ(*kappa_tc(kExp), 4.0);
  EXPECT_DOUBLE_EQ(*beta_tc(kExp), 3.0);
  EXPECT_DOUBLE_EQ(beta_c(*kappa_tc(kExp), kExp), 3.0);
  EXPECT_FALSE(kappa_tc(kTanh).has_value());
  // Γ''(0) = 0 < Γ'''(0) puts the tri-critical point at κ = −2Γ(0).
  const auto odd = GammaModel::custom("cubic", [](int k, double u) {
    const double c[4] = {1.0 + u + u * u * u / 6, 1.0 + u * u / 2, u, 1.0};
    return k < 4 ? c[k] : 0.0;
  });
  EXPECT_DOUBLE_EQ(*kappa_tc(odd), -2.0);
}

TEST(Phases, LyapunovNumber) {
  EXPECT_NEAR(lyapunov_number(*kappa_tc(kExp), kExp), 0.0, 1e-10);
  for (double k : {0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) EXPECT_LT(lyapunov_number(k, kTanh), 0.0);
  EXPECT_GT(lyapunov_number(6.0, kExp), 0.0);
  EXPECT_LT(lyapunov_number(2.0, kExp), 0.0);
  // Literal value for tanh at κ = 2: −3π·1·4·(0 + 8)/(8·2·1).
  EXPECT_NEAR(lyapunov_number(2.0, kTanh), -6.0 * std::numbers::pi, 1e-12);
  EXPECT_EQ(second_lyapunov_sign(kExp), -1);
}

TEST(Phases, XiMap) {
  EXPECT_EQ(xi_map(0.0, 2.0, 1.0, kExp), 0.0);
  for (double u : {-2.0, 0.4, 3.3}) {
    EXPECT_NEAR(xi_map(u, 1.7, 6.0, kExp), 2 * 1.7 * std::sinh(u) / (2 * std::cosh(u) + 6.0), 1e-14);
  }
  const double h = 1e-6;
  for (const auto* g : {&kExp, &kTanh}) {
    const double fd = (xi_map(h, 1.3, 2.5, *g) - xi_map(-h, 1.3, 2.5, *g)) / (2 * h);
    EXPECT_NEAR(fd, xi_slope_at_zero(1.3, 2.5, *g), 1e-8);
    const double d3 = third_derivative([&](double u) { return xi_map(u, 1.3, 2.5, *g); }, 1e-2);
    EXPECT_NEAR(d3, xi_third_derivative_at_zero(1.3, 2.5, *g), 1e-3);
  }
  EXPECT_DOUBLE_EQ(xi_slope_at_zero(beta_c(3.0, kExp), 3.0, kExp), 1.0);
}

TEST(Phases, FixedPointCounts) {
  EXPECT_EQ(xi_fixed_points(4.1, 6.0, kExp).size(), 1u);
  EXPECT_TRUE(xi_fixed_points(1.5, 2.0, kTanh).empty());
  const double bd = *beta_delta(6.0, kExp);
  const auto roots = xi_fixed_points(0.5 * (bd + 4.0), 6.0, kExp);
  ASSERT_EQ(roots.size(), 2u);
  for (double u : roots) EXPECT_NEAR(xi_map(u, 0.5 * (bd + 4.0), 6.0, kExp), u, 1e-9);
}

TEST(Phases, FixedPointCountsRandomized) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    // F1: one root above the Hopf line.
    const double k1 = 0.2 + 8 * unit(rng);
    for (const auto* g : {&kExp, &kTanh}) {
      const double b = beta_c(k1, *g) * (1.02 + unit(rng));
      EXPECT_EQ(xi_fixed_points(b, k1, *g).size(), 1u) << "F1 k=" << k1 << " b=" << b;
    }
    // F2: none at or below it when Ξ'''(0) < 0.
    const double b2 = beta_c(k1, kTanh) * (0.1 + 0.9 * unit(rng));
    ASSERT_LT(xi_third_derivative_at_zero(b2, k1, kTanh), 0.0);
    EXPECT_TRUE(xi_fixed_points(b2, k1, kTanh).empty()) << "F2";
    // F3: zero or two roots below it when Ξ'''(0) > 0, two exactly above β_Δ.
    const double k3 = 4.5 + 4 * unit(rng);
    const double bc3 = beta_c(k3, kExp);
    const double bd3 = *beta_delta(k3, kExp);
    const double b3 = bd3 + (bc3 - bd3) * (unit(rng) * 2.0 - 1.0) * 0.95;
    const auto n3 = xi_fixed_points(b3, k3, kExp).size();
    EXPECT_EQ(n3, b3 > bd3 ? 2u : 0u) << "F3 k=" << k3 << " b=" << b3;
    // F4: one root on the Hopf line.
    EXPECT_EQ(xi_fixed_points(bc3, k3, kExp).size(), 1u) << "F4";
  }
}

TEST(Phases, TangencyMatchesOneDimensionalReduction) {
  for (double kappa : {4.5, 6.0, 8.0, 12.0}) {
    const auto t = tangency(kappa, kExp);
    ASSERT_TRUE(t.has_value()) << kappa;
    EXPECT_LE(std::abs(xi_map(t->u, t->beta, kappa, kExp) - t->u), 1e-9);
    const double h = 1e-6;
    const double slope = (xi_map(t->u + h, t->beta, kappa, kExp) - xi_map(t->u - h, t->beta, kappa, kExp)) / (2 * h);
    EXPECT_NEAR(slope, 1.0, 1e-8);
    const auto [u, b] = tangency_by_bisection(kappa);
    EXPECT_NEAR(t->u, u, 1e-7);
    EXPECT_NEAR(t->beta, b, 1e-9);
    EXPECT_LT(t->beta, beta_c(kappa, kExp));
  }
  EXPECT_FALSE(beta_delta(2.0, kExp).has_value());
  EXPECT_FALSE(beta_delta(3.9, kExp).has_value());
  EXPECT_FALSE(beta_delta(2.0, kTanh).has_value());
}

TEST(Phases, BetaStar) {
  const double bd = *beta_delta(6.0, kExp);
  const double bs = *beta_star(6.0, kExp);
  EXPECT_LE(bd, bs);
  EXPECT_LE(bs, 4.0);
  StarOptions opts;
  EXPECT_TRUE(has_stable_cycle(4.0 - 1e-3, 6.0, kExp, opts));
  EXPECT_FALSE(has_stable_cycle(0.9 * bd, 6.0, kExp, opts));
  const auto above = find_cycles(bs + 1e-2, 6.0, kExp, default_radius_grid());
  ASSERT_EQ(above.size(), 2u);
  EXPECT_GT(above[1].radius - above[0].radius, 1e-3);
  EXPECT_TRUE(find_cycles(bs - 1e-2, 6.0, kExp, default_radius_grid()).empty());
  EXPECT_FALSE(beta_star(2.0, kExp).has_value());
}

TEST(Phases, CriticalCurvesOrdering) {
  for (double kappa : {5.0, 6.0, 7.5}) {
    const auto c = critical_curves(kappa, kExp);
    ASSERT_TRUE(c.beta_delta && c.beta_star);
    EXPECT_LE(*c.beta_delta, *c.beta_star);
    EXPECT_LE(*c.beta_star, c.beta_c);
    EXPECT_GT(c.sigma_L, 0.0);
  }
  const auto t = critical_curves(1.0, kTanh);
  EXPECT_FALSE(t.kappa_tc || t.beta_delta || t.beta_star);
}

TEST(Phases, ClassifyLabels) {
  EXPECT_EQ(classify(1.0, 6.0, kExp).label, Phase::FP);
  EXPECT_EQ(classify(3.9, 6.0, kExp).label, Phase::FP_plus_LC);
  EXPECT_EQ(classify(4.5, 6.0, kExp).label, Phase::LC);
  // Exactly on the Hopf line counts as LC.
  EXPECT_EQ(classify(beta_c(1.0, kTanh), 1.0, kTanh).label, Phase::LC);
  EXPECT_ERRC(classify(-1.0, 1.0, kTanh), InvalidConfig);
  EXPECT_STREQ(to_string(Phase::FP_plus_LC), "FP+LC");
}

TEST(Phases, ClassifyAgreesWithLongIntegration) {
  // Attractors reached from a small, a medium and a large initial condition.
  auto reaches_origin = [](double m0, double beta, double kappa, const GammaModel& g) {
    const auto p = integrate({m0, 0.0}, beta, kappa, g, 600.0, 1e-9, 600.0);
    return std::hypot(p.states.back()[0], p.states.back()[1]) < 1e-3;
  };
  int checked = 0;
  for (const auto* g : {&kTanh, &kExp}) {
    for (int i = 0; i < 10; ++i) {
      const double kappa = 0.5 + 0.75 * i;
      for (int j = 0; j < 10; ++j) {
        const double bc = beta_c(kappa, *g);
        const double beta = bc * (0.5 + 0.1 * j + 0.05);
        if (std::abs(beta - bc) < 0.08 * bc) continue;  // slow dynamics near the Hopf line
        if (g == &kExp && kappa > 4.0) {
          const auto bs = beta_star(kappa, *g);
          if (bs && std::abs(beta - *bs) < 0.02) continue;  // near the saddle-node of cycles
        }
        int to_origin = 0;
        for (double m0 : {0.01, 0.3, 0.95}) to_origin += reaches_origin(m0, beta, kappa, *g) ? 1 : 0;
        const Phase expected = to_origin == 3 ? Phase::FP : (to_origin == 0 ? Phase::LC : Phase::FP_plus_LC);
        EXPECT_EQ(classify(beta, kappa, *g).label, expected) << g->name() << " k=" << kappa << " b=" << beta;
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 150);
}

TEST(Phases, ScanGridThreadIndependent) {
  const auto ks = uniform_grid(0.5, 7.0, 5);
  const auto bs = uniform_grid(0.5, 5.0, 5);
  const auto a = scan_grid(ks, bs, kExp, 1);
  const auto b = scan_grid(ks, bs, kExp, 3);
  ASSERT_EQ(a.size(), 25u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].label, b[i].label);
    EXPECT_EQ(a[i].kappa, ks[i / 5]);
    EXPECT_EQ(a[i].beta, bs[i % 5]);
  }
}
