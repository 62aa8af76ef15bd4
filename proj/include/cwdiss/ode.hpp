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
#include <limits>
#include <utility>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "cwdiss/errors.hpp"

namespace cwdiss {

using Vec2 = std::array<double, 2>;

/// Uniformly sampled planar path.
struct Path2 {
  std::vector<double> times;
  std::vector<Vec2> states;

  std::size_t size() const { return times.size(); }
};

/// Dormand–Prince 5(4) with continuous extension, stepped one accepted step
/// at a time so callers can locate events on the interpolant.
template <class System>
class DenseFlow {
  using Stepper = boost::numeric::odeint::runge_kutta_dopri5<Vec2>;
  using Dense = typename boost::numeric::odeint::result_of::make_dense_output<Stepper>::type;

 public:
  DenseFlow(System system, const Vec2& init, double t0, double rel_tol, double abs_tol,
            double max_dt = std::numeric_limits<double>::infinity())
      : system_(std::move(system)),
        dense_(std::isfinite(max_dt)
                   ? boost::numeric::odeint::make_dense_output(abs_tol, rel_tol, max_dt, Stepper())
                   : boost::numeric::odeint::make_dense_output(abs_tol, rel_tol, Stepper())) {
    dense_.initialize(init, t0, std::min(1e-3, max_dt));
  }

  /// Advances one accepted step; returns the covered interval.
  std::pair<double, double> step() {
    auto span = dense_.do_step(std::ref(system_));
    const double dt = span.second - span.first;
    if (!(dt > 1e-13 * std::max(1.0, std::abs(span.second)))) {
      throw Error(Errc::StepSizeUnderflow, "step size underflow at t = " + std::to_string(span.second));
    }
    return span;
  }

  double time() const { return dense_.current_time(); }
  double previous_time() const { return dense_.previous_time(); }
  const Vec2& state() const { return dense_.current_state(); }

  /// Interpolated state, valid for t in [previous_time(), time()].
  Vec2 at(double t) const {
    Vec2 x{};
    dense_.calc_state(t, x);
    return x;
  }

 private:
  System system_;
  mutable Dense dense_;
};

/// Integrates to t_max and samples the dense output every out_dt (the final
/// sample is t_max). `check(state)` is called at every accepted step.
template <class System, class Check>
Path2 integrate_sampled(System system, const Vec2& init, double t_max, double tol, double out_dt, Check&& check) {
  if (!(tol > 0.0)) throw Error(Errc::InvalidConfig, "tolerance must be positive");
  if (!(out_dt > 0.0)) throw Error(Errc::InvalidConfig, "output step must be positive");
  Path2 path;
  const auto n_out = static_cast<std::size_t>(std::floor(t_max / out_dt + 1e-9));
  path.times.reserve(n_out + 2);
  path.states.reserve(n_out + 2);
  path.times.push_back(0.0);
  path.states.push_back(init);
  if (!(t_max > 0.0)) return path;

  DenseFlow<System> flow(std::move(system), init, 0.0, tol, tol);
  std::size_t next = 1;
  auto next_time = [&] { return next <= n_out ? static_cast<double>(next) * out_dt : t_max; };
  bool done = false;
  while (!done) {
    const auto [t0, t1] = flow.step();
    (void)t0;
    check(flow.state());
    while (next_time() <= t1) {
      const double s = next_time();
      path.times.push_back(s);
      path.states.push_back(flow.at(s));
      if (next > n_out) {
        done = true;
        break;
      }
      ++next;
      if (next > n_out && path.times.back() >= t_max - 1e-12) {
        done = true;
        break;
      }
    }
  }
  return path;
}

template <class System>
Path2 integrate_sampled(System system, const Vec2& init, double t_max, double tol, double out_dt) {
  return integrate_sampled(std::move(system), init, t_max, tol, out_dt, [](const Vec2&) {});
}

}  // namespace cwdiss
