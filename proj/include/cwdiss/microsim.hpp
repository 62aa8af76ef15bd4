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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cwdiss/errors.hpp"
#include "cwdiss/gamma.hpp"
#include "cwdiss/parallel.hpp"
#include "cwdiss/rng.hpp"

// Exact simulation of the mean-field pair (m_n, ζ_n). Between jumps m is
// frozen and ζ decays as ζ(t) = ζ(0) e^{-κt}; jumps happen at the
// state-dependent rates n(1±m)/2 Γ(∓ζ) and are sampled by thinning.

namespace cwdiss {

struct SimConfig {
  int n = 100;
  double beta = 1.0;
  double kappa = 1.0;
  double t_max = 1.0;
  double record_dt = 0.01;
  std::uint64_t seed = 0;
  std::int64_t replica_index = 0;

  void check() const {
    if (n <= 0) throw Error(Errc::InvalidConfig, "n must be positive");
    if (!(beta > 0.0) || !(kappa > 0.0)) throw Error(Errc::InvalidConfig, "beta and kappa must be positive");
    if (!(record_dt > 0.0)) throw Error(Errc::InvalidConfig, "record_dt must be positive");
    if (!(t_max >= record_dt)) throw Error(Errc::InvalidConfig, "t_max must be at least record_dt");
  }
};

/// Lattice state. The magnetization is carried as the number of up spins so
/// that long runs do not accumulate rounding in m.
struct MicroState {
  int n = 1;
  std::int64_t up = 0;
  double zeta = 0.0;
  double t = 0.0;

  double m() const { return -1.0 + 2.0 * static_cast<double>(up) / static_cast<double>(n); }

  static MicroState from_up_count(int n, std::int64_t up, double zeta, double t = 0.0) {
    if (n <= 0 || up < 0 || up > n) throw Error(Errc::InvalidInit, "up-spin count outside [0, n]");
    if (!std::isfinite(zeta)) throw Error(Errc::InvalidInit, "zeta must be finite");
    return MicroState{n, up, zeta, t};
  }

  /// Requires n(m+1)/2 to be an integer to within 1e-9.
  static MicroState from_magnetization(int n, double m, double zeta, double t = 0.0) {
    if (n <= 0) throw Error(Errc::InvalidInit, "n must be positive");
    if (!(m >= -1.0 && m <= 1.0)) throw Error(Errc::InvalidInit, "m outside [-1, 1]");
    const double k = static_cast<double>(n) * (m + 1.0) / 2.0;
    const double k_round = std::round(k);
    if (std::abs(k - k_round) > 1e-9) {
      throw Error(Errc::InvalidInit, "m = " + std::to_string(m) + " is not on the lattice for n = " + std::to_string(n));
    }
    return from_up_count(n, static_cast<std::int64_t>(k_round), zeta, t);
  }

  /// Nearest lattice point to m.
  static MicroState nearest(int n, double m, double zeta, double t = 0.0) {
    const double k = std::round(static_cast<double>(n) * (std::clamp(m, -1.0, 1.0) + 1.0) / 2.0);
    return from_up_count(n, static_cast<std::int64_t>(k), zeta, t);
  }
};

inline double flow_zeta(double zeta0, double kappa, double dt) { return zeta0 * std::exp(-kappa * dt); }

struct JumpRates {
  double down = 0.0;  // m -> m - 2/n, ζ -> ζ - 2β/n
  double up = 0.0;    // m -> m + 2/n, ζ -> ζ + 2β/n
  double total() const { return down + up; }
};

inline JumpRates jump_rates(const MicroState& s, const GammaModel& gamma) {
  const double nd = static_cast<double>(s.n);
  const double n_up = static_cast<double>(s.up);
  const double n_down = nd - n_up;
  // n(1+m)/2 = #up spins, n(1-m)/2 = #down spins; exact zero at m = ±1.
  return JumpRates{n_up > 0 ? n_up * gamma(-s.zeta) : 0.0, n_down > 0 ? n_down * gamma(s.zeta) : 0.0};
}

inline JumpRates jump_rates(const MicroState& s, const SimConfig&, const GammaModel& gamma) {
  return jump_rates(s, gamma);
}

/// Positivity and monotonicity of Γ on [-5, 5]; required before simulating.
inline void require_simulable(const GammaModel& gamma) {
  const auto grid = uniform_grid(-5.0, 5.0, 201);
  const auto rep = validate(gamma, grid);
  if (!rep.positive || !rep.increasing) {
    throw Error(Errc::InadmissibleGamma, "Γ must be positive and nondecreasing to simulate");
  }
}

enum class JumpOutcome { Rejected, Down, Up };

/// One inter-jump clock with thinning. propose() draws the next candidate
/// time from a rate bound valid until that time; resolve() moves the state
/// there and accepts or rejects the candidate.
class JumpKernel {
 public:
  JumpKernel(const SimConfig& cfg, const GammaModel& gamma, const MicroState& init, ReplicaStream& rng)
      : gamma_(gamma), rng_(rng), state_(init), beta_(cfg.beta), kappa_(cfg.kappa),
        dzeta_(2.0 * cfg.beta / static_cast<double>(cfg.n)), gamma_zero_(gamma(0.0)) {}

  const MicroState& state() const { return state_; }
  std::int64_t rejections() const { return rejections_; }
  /// State at the last candidate time, before the jump was applied.
  const MicroState& pre_jump() const { return pre_jump_; }

  double zeta_at(double s) const { return flow_zeta(state_.zeta, kappa_, s - state_.t); }

  /// Absolute time of the next candidate event (+inf if both rates vanish).
  double propose() {
    const double nd = static_cast<double>(state_.n);
    const double n_up = static_cast<double>(state_.up);
    const double n_down = nd - n_up;
    // |ζ| decreases monotonically to 0 between jumps and Γ is increasing, so
    // Γ(±ζ(s)) stays below max(Γ(±ζ₀), Γ(0)) until the next jump.
    bound_ = n_up * std::max(gamma_(-state_.zeta), gamma_zero_) +
             n_down * std::max(gamma_(state_.zeta), gamma_zero_);
    if (!(bound_ > 0.0)) return std::numeric_limits<double>::infinity();
    candidate_ = state_.t + rng_.exponential(bound_);
    return candidate_;
  }

  JumpOutcome resolve() {
    state_.zeta = zeta_at(candidate_);
    state_.t = candidate_;
    pre_jump_ = state_;
    const JumpRates r = jump_rates(state_, gamma_);
    const double total = r.total();
    if (total > bound_ * (1.0 + 1e-12)) {
      throw std::logic_error("thinning bound violated: rate " + std::to_string(total) + " > " + std::to_string(bound_));
    }
    const double u = rng_.uniform() * bound_;
    if (u >= total) {
      ++rejections_;
      return JumpOutcome::Rejected;
    }
    if (u < r.down) {
      state_.up -= 1;
      state_.zeta -= dzeta_;
      return JumpOutcome::Down;
    }
    state_.up += 1;
    state_.zeta += dzeta_;
    return JumpOutcome::Up;
  }

 private:
  const GammaModel& gamma_;
  ReplicaStream& rng_;
  MicroState state_;
  double beta_;
  double kappa_;
  double dzeta_;
  double gamma_zero_;
  double bound_ = 0.0;
  double candidate_ = 0.0;
  MicroState pre_jump_;
  std::int64_t rejections_ = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> m;
  std::vector<double> zeta;
  std::int64_t jumps = 0;
  SimConfig meta;
  double wall_time = 0.0;  // seconds

  std::size_t size() const { return times.size(); }
};

struct NoJumpObserver {
  void operator()(const MicroState&, const MicroState&) const noexcept {}
};

/// Sample path on [0, t_max], recorded by sample-and-hold every record_dt.
/// `on_jump(before, after)` is called for every accepted jump.
template <class OnJump = NoJumpObserver>
Trajectory simulate(const SimConfig& cfg, const GammaModel& gamma, const MicroState& init,
                    OnJump&& on_jump = {}, bool check_gamma = true) {
  cfg.check();
  if (init.n != cfg.n) throw Error(Errc::InvalidInit, "initial state has a different n");
  if (init.up < 0 || init.up > init.n || !std::isfinite(init.zeta)) {
    throw Error(Errc::InvalidInit, "initial state off the lattice");
  }
  if (check_gamma) require_simulable(gamma);

  const auto start = std::chrono::steady_clock::now();
  ReplicaStream rng(cfg.seed, static_cast<std::uint64_t>(cfg.replica_index));
  MicroState s0 = init;
  s0.t = 0.0;
  JumpKernel kernel(cfg, gamma, s0, rng);

  Trajectory traj;
  traj.meta = cfg;
  const auto n_grid = static_cast<std::int64_t>(std::floor(cfg.t_max / cfg.record_dt + 1e-9));
  traj.times.reserve(static_cast<std::size_t>(n_grid) + 2);
  traj.m.reserve(static_cast<std::size_t>(n_grid) + 2);
  traj.zeta.reserve(static_cast<std::size_t>(n_grid) + 2);

  std::int64_t next_index = 0;
  bool final_recorded = false;
  auto record_until = [&](double horizon) {
    for (;;) {
      double s = static_cast<double>(next_index) * cfg.record_dt;
      if (next_index > n_grid) {
        if (final_recorded || traj.times.back() >= cfg.t_max - 1e-12) return;
        s = cfg.t_max;
        if (s > horizon) return;
        final_recorded = true;
      } else if (s > horizon) {
        return;
      }
      traj.times.push_back(s);
      traj.m.push_back(kernel.state().m());
      traj.zeta.push_back(kernel.zeta_at(s));
      ++next_index;
    }
  };

  for (;;) {
    const double candidate = kernel.propose();
    record_until(std::min(candidate, cfg.t_max));
    if (candidate > cfg.t_max) break;
    const JumpOutcome out = kernel.resolve();
    if (out != JumpOutcome::Rejected) {
      ++traj.jumps;
      on_jump(kernel.pre_jump(), kernel.state());
    }
  }
  traj.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return traj;
}

/// Independent replicas; replica r draws from the stream (seed, r) so the
/// output does not depend on the number of threads.
inline std::vector<Trajectory> run_ensemble(const SimConfig& base, const GammaModel& gamma, const MicroState& init,
                                            std::int64_t replicas, unsigned threads) {
  if (replicas <= 0) return {};
  base.check();
  require_simulable(gamma);
  std::vector<Trajectory> out(static_cast<std::size_t>(replicas));
  parallel_for(out.size(), threads, [&](std::size_t r) {
    SimConfig cfg = base;
    cfg.replica_index = static_cast<std::int64_t>(r);
    out[r] = simulate(cfg, gamma, init, NoJumpObserver{}, false);
  });
  return out;
}

enum class Observable { AbsM, AbsZeta, Radius };

inline double observe(Observable obs, double m, double zeta) {
  switch (obs) {
    case Observable::AbsM: return std::abs(m);
    case Observable::AbsZeta: return std::abs(zeta);
    case Observable::Radius: return std::hypot(m, zeta);
  }
  return 0.0;
}

struct ExitQuery {
  SimConfig base;  // n, beta, kappa, seed are used; t_max is replaced by horizon
  MicroState init;
  std::int64_t replicas = 1;
  unsigned threads = 1;
  double delta = 1.0;
  Observable observable = Observable::AbsM;
  double b_n = 1.0;
  double horizon = 1.0;
  bool common_stream = false;  // every replica reuses stream 0
};

struct ExitSample {
  std::int64_t replica = 0;
  double sup_obs = 0.0;  // running sup of b_n·obs up to the first hit or the horizon
  bool hit = false;
  double first_hit_time = std::numeric_limits<double>::quiet_NaN();
};

struct ExitEstimate {
  double p_hat = 0.0;
  double std_err = 0.0;
  double rate_hat = std::numeric_limits<double>::quiet_NaN();
  bool rate_defined = false;  // false ⇔ zero hits
  std::int64_t hits = 0;
  std::int64_t replicas = 0;
  std::vector<ExitSample> samples;
};

/// First passage of b_n·obs above delta on [0, horizon]. Between jumps m is
/// constant and |ζ| decreases, so the supremum is attained at t = 0 or at a
/// jump time; the run stops at the first hit.
inline ExitSample first_passage(const SimConfig& cfg, const GammaModel& gamma, const MicroState& init,
                                ReplicaStream& rng, double delta, Observable obs, double b_n, double horizon) {
  ExitSample out;
  MicroState s0 = init;
  s0.t = 0.0;
  JumpKernel kernel(cfg, gamma, s0, rng);
  out.sup_obs = b_n * observe(obs, s0.m(), s0.zeta);
  if (out.sup_obs >= delta) {
    out.hit = true;
    out.first_hit_time = 0.0;
    return out;
  }
  for (;;) {
    const double candidate = kernel.propose();
    if (candidate > horizon) break;
    if (kernel.resolve() == JumpOutcome::Rejected) continue;
    const double v = b_n * observe(obs, kernel.state().m(), kernel.state().zeta);
    if (v > out.sup_obs) out.sup_obs = v;
    if (v >= delta) {
      out.hit = true;
      out.first_hit_time = kernel.state().t;
      break;
    }
  }
  return out;
}

inline ExitEstimate summarize_exits(std::vector<ExitSample> samples, double n, double b_n) {
  ExitEstimate est;
  est.replicas = static_cast<std::int64_t>(samples.size());
  for (const auto& s : samples) est.hits += s.hit ? 1 : 0;
  if (est.replicas > 0) {
    const double r = static_cast<double>(est.replicas);
    est.p_hat = static_cast<double>(est.hits) / r;
    est.std_err = std::sqrt(est.p_hat * (1.0 - est.p_hat) / r);
  }
  if (est.hits > 0) {
    est.rate_defined = true;
    est.rate_hat = est.hits == est.replicas ? 0.0 : -(b_n * b_n / n) * std::log(est.p_hat);
  }
  est.samples = std::move(samples);
  return est;
}

/// Monte Carlo estimate of P(sup_{t≤T} b_n·obs(t) ≥ δ) and of the
/// moderate-deviation rate -(b_n²/n) log p̂.
inline ExitEstimate estimate_exit_probability(const ExitQuery& q, const GammaModel& gamma) {
  if (!(q.delta >= 0.0)) throw Error(Errc::InvalidConfig, "threshold must be nonnegative");
  if (!(q.b_n > 0.0)) throw Error(Errc::InvalidConfig, "b_n must be positive");
  if (!(q.horizon > 0.0)) throw Error(Errc::InvalidConfig, "horizon must be positive");
  if (q.init.n != q.base.n) throw Error(Errc::InvalidInit, "initial state has a different n");
  require_simulable(gamma);
  std::vector<ExitSample> samples(static_cast<std::size_t>(std::max<std::int64_t>(q.replicas, 0)));
  parallel_for(samples.size(), q.threads, [&](std::size_t r) {
    ReplicaStream rng(q.base.seed, q.common_stream ? 0 : static_cast<std::uint64_t>(r));
    samples[r] = first_passage(q.base, gamma, q.init, rng, q.delta, q.observable, q.b_n, q.horizon);
    samples[r].replica = static_cast<std::int64_t>(r);
  });
  return summarize_exits(std::move(samples), static_cast<double>(q.base.n), q.b_n);
}

}  // namespace cwdiss
