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
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cwdiss/errors.hpp"

namespace cwdiss {

enum class GammaKind { TanhPlusOne, Exp, Custom };

inline constexpr int kMaxGammaDerivative = 6;

/// Spin-flip intensity Γ together with its derivatives up to order six.
///
/// Builtin kinds carry closed-form derivatives. Custom models must supply
/// every derivative explicitly through a callable `(order, u) -> value`.
class GammaModel {
 public:
  using DerivativeFn = std::function<double(int, double)>;

  static GammaModel tanh_plus_one() { return GammaModel(GammaKind::TanhPlusOne, "tanh", {}); }
  static GammaModel exponential() { return GammaModel(GammaKind::Exp, "exp", {}); }
  static GammaModel custom(std::string name, DerivativeFn fn) {
    return GammaModel(GammaKind::Custom, std::move(name), std::move(fn));
  }

  GammaKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }

  double operator()(double u) const { return eval(u); }

  double eval(double u) const {
    switch (kind_) {
      case GammaKind::TanhPlusOne: return 1.0 + std::tanh(u);
      case GammaKind::Exp: return std::exp(u);
      case GammaKind::Custom: return custom_(0, u);
    }
    return 0.0;
  }

  /// k-th derivative, k in [0, 6]. deriv(0, u) is eval(u).
  double deriv(int k, double u) const {
    if (k == 0) return eval(u);
    switch (kind_) {
      case GammaKind::TanhPlusOne: return tanh_derivative(k, u);
      case GammaKind::Exp: return std::exp(u);
      case GammaKind::Custom: return custom_(k, u);
    }
    return 0.0;
  }

  /// Γ(0), Γ'(0), ..., Γ⁽⁶⁾(0).
  std::array<double, kMaxGammaDerivative + 1> at_zero() const {
    std::array<double, kMaxGammaDerivative + 1> out{};
    for (int k = 0; k <= kMaxGammaDerivative; ++k) out[k] = deriv(k, 0.0);
    return out;
  }

 private:
  GammaModel(GammaKind kind, std::string name, DerivativeFn fn)
      : kind_(kind), name_(std::move(name)), custom_(std::move(fn)) {}

  // d^k/du^k tanh(u) = P_k(tanh u) with P_0(t) = t and P_{k+1} = P_k'(t)(1 - t²).
  static double tanh_derivative(int k, double u) {
    static const auto table = [] {
      std::array<std::vector<double>, kMaxGammaDerivative + 1> p;
      p[0] = {0.0, 1.0};
      for (int j = 0; j < kMaxGammaDerivative; ++j) {
        const auto& c = p[j];
        std::vector<double> dc(c.size() > 1 ? c.size() - 1 : 1, 0.0);
        for (std::size_t i = 1; i < c.size(); ++i) dc[i - 1] = static_cast<double>(i) * c[i];
        std::vector<double> next(dc.size() + 2, 0.0);
        for (std::size_t i = 0; i < dc.size(); ++i) {
          next[i] += dc[i];
          next[i + 2] -= dc[i];
        }
        p[j + 1] = std::move(next);
      }
      return p;
    }();
    if (k < 0 || k > kMaxGammaDerivative) return 0.0;
    const double t = std::tanh(u);
    const auto& c = table[k];
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
    return acc;
  }

  GammaKind kind_;
  std::string name_;
  DerivativeFn custom_;
};

inline GammaModel make_builtin(GammaKind kind) {
  switch (kind) {
    case GammaKind::TanhPlusOne: return GammaModel::tanh_plus_one();
    case GammaKind::Exp: return GammaModel::exponential();
    case GammaKind::Custom: break;
  }
  throw Error(Errc::InvalidConfig, "make_builtin requires a builtin kind");
}

/// Γ(u) = Σ c_k u^k / k! for a coefficient list of length at most 7.
/// Rejected when Γ is not strictly positive on [-5, 5].
inline GammaModel polynomial_gamma(std::span<const double> coeffs) {
  if (coeffs.empty() || coeffs.size() > kMaxGammaDerivative + 1) {
    throw Error(Errc::InvalidConfig, "polynomial Γ needs between 1 and 7 coefficients");
  }
  std::vector<double> c(coeffs.begin(), coeffs.end());
  c.resize(kMaxGammaDerivative + 1, 0.0);
  auto fn = [c](int order, double u) {
    double acc = 0.0;
    double term = 1.0;  // u^(k-order) / (k-order)!
    for (int k = order; k <= kMaxGammaDerivative; ++k) {
      acc += c[k] * term;
      term *= u / static_cast<double>(k - order + 1);
    }
    return acc;
  };
  for (int i = 0; i <= 1000; ++i) {
    const double u = -5.0 + 0.01 * i;
    if (!(fn(0, u) > 0.0)) {
      throw Error(Errc::InadmissibleGamma, "polynomial Γ is not positive on [-5, 5]");
    }
  }
  return GammaModel::custom("poly", std::move(fn));
}

inline GammaModel gamma_from_name(const std::string& name, std::span<const double> coeffs = {}) {
  if (name == "tanh") return GammaModel::tanh_plus_one();
  if (name == "exp") return GammaModel::exponential();
  if (name == "poly") return polynomial_gamma(coeffs);
  throw Error(Errc::InvalidConfig, "unknown Γ '" + name + "' (expected tanh, exp or poly)");
}

struct AssumptionReport {
  bool positive = false;
  bool increasing = false;
  bool gamma0_nonzero = false;
  bool gamma1_nonzero = false;
  bool gamma2_nonneg = false;
  bool inflection_count_ok = false;
  int inflection_count = 0;

  bool admissible() const {
    return positive && increasing && gamma0_nonzero && gamma1_nonzero && gamma2_nonneg &&
           inflection_count_ok;
  }
};

/// Grid check of the standing assumptions on Γ. The inflection test counts
/// sign changes of the centred second difference of
/// u -> (Γ(u) - Γ(-u)) / (Γ(u) + Γ(-u) + κ) over the positive grid nodes.
inline AssumptionReport validate(const GammaModel& gamma, std::span<const double> grid,
                                 double kappa = 1.0) {
  if (grid.empty()) throw Error(Errc::EmptyGrid, "validate needs a nonempty grid");
  constexpr double kDeadBand = 1e-10;

  AssumptionReport rep;
  rep.positive = std::all_of(grid.begin(), grid.end(), [&](double u) { return gamma(u) > 0.0; });
  rep.increasing = true;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (gamma(grid[i]) < gamma(grid[i - 1])) rep.increasing = false;
  }
  rep.gamma0_nonzero = gamma.deriv(0, 0.0) != 0.0;
  rep.gamma1_nonzero = gamma.deriv(1, 0.0) != 0.0;
  rep.gamma2_nonneg = gamma.deriv(2, 0.0) >= 0.0;

  auto xi = [&](double u) {
    const double gp = gamma(u);
    const double gm = gamma(-u);
    return (gp - gm) / (gp + gm + kappa);
  };
  std::vector<double> pos;
  for (double u : grid) {
    if (u > 0.0) pos.push_back(u);
  }
  int last_sign = 0;
  for (std::size_t i = 1; i + 1 < pos.size(); ++i) {
    const double hl = pos[i] - pos[i - 1];
    const double hr = pos[i + 1] - pos[i];
    const double d2 = 2.0 *
                      ((xi(pos[i + 1]) - xi(pos[i])) / hr - (xi(pos[i]) - xi(pos[i - 1])) / hl) /
                      (hl + hr);
    if (std::abs(d2) <= kDeadBand) continue;
    const int s = d2 > 0.0 ? 1 : -1;
    if (last_sign != 0 && s != last_sign) ++rep.inflection_count;
    last_sign = s;
  }
  rep.inflection_count_ok = rep.inflection_count <= 1;
  return rep;
}

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t count) {
  std::vector<double> g(count);
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  for (std::size_t i = 0; i < count; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return g;
}

}  // namespace cwdiss
