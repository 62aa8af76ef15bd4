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

// Command-line front end: phase, ode, simulate, mdp, verify.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/version.hpp>

#include "CLI11.hpp"
#include "cwdiss/checks.hpp"
#include "cwdiss/io.hpp"

namespace fs = std::filesystem;
using namespace cwdiss;
using io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

std::string versions() {
  return "cwdiss 1.0.0; boost " + std::to_string(BOOST_VERSION / 100000) + "." +
         std::to_string(BOOST_VERSION / 100 % 1000) + "; nlohmann_json " + std::to_string(NLOHMANN_JSON_VERSION_MAJOR) +
         "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH) +
         "; CLI11 " CLI11_VERSION;
}

Error config_error(const std::string& what) { return Error(Errc::InvalidConfig, what); }

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw config_error("cannot parse " + what + " '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw config_error("cannot parse " + what + " '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

// "start:stop:count" (inclusive) or a single value.
std::vector<double> parse_range(const std::string& s, const std::string& what) {
  const auto parts = split(s, ':');
  if (parts.size() == 1) return {parse_double(parts[0], what)};
  if (parts.size() != 3) throw config_error(what + " must be a value or start:stop:count, got '" + s + "'");
  const double lo = parse_double(parts[0], what);
  const double hi = parse_double(parts[1], what);
  const double count = parse_double(parts[2], what);
  if (count < 1 || count != std::floor(count) || count > 1e6) throw config_error(what + ": bad count in '" + s + "'");
  if (count == 1) {
    if (lo != hi) throw config_error(what + ": a single point needs start == stop");
    return {lo};
  }
  return uniform_grid(lo, hi, static_cast<std::size_t>(count));
}

std::pair<double, double> parse_pair(const std::string& s, const std::string& what) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw config_error(what + " must be 'a,b', got '" + s + "'");
  return {parse_double(parts[0], what), parse_double(parts[1], what)};
}

GammaModel parse_gamma(const std::string& name) {
  if (name != "tanh" && name != "exp") throw config_error("unknown gamma '" + name + "' (tanh|exp)");
  return gamma_from_name(name);
}

// Everything that shapes the outputs, without the output location or worker count.
std::uint64_t config_hash(const CLI::App& sub) {
  std::string canonical = sub.get_name() + "\n";
  std::istringstream in(sub.config_to_str(true, false));
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("out=", 0) == 0 || line.rfind("threads=", 0) == 0 || line.rfind("config=", 0) == 0) continue;
    canonical += line + "\n";
  }
  return io::fnv1a(canonical);
}

struct Outputs {
  fs::path dir;
  std::vector<std::string> files;

  fs::path add(const std::string& name) {
    files.push_back(name);
    return dir / name;
  }
};

void write_manifest(const CLI::App& sub, Outputs& out, std::uint64_t seed) {
  io::RunManifest m{sub.get_name(), config_hash(sub), seed, out.files, versions()};
  m.outputs.push_back("manifest.json");
  io::write_json(out.dir / "manifest.json", m.to_json());
}

// ---------------------------------------------------------------------------

struct Common {
  std::string gamma = "tanh";
  std::string out = "cwdiss_out";
  unsigned threads = default_threads();
};

void add_common(CLI::App* sub, Common& c, bool threads) {
  sub->add_option("--gamma", c.gamma, "rate function: tanh (1+tanh) or exp")->capture_default_str();
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  if (threads) sub->add_option("--threads", c.threads, "worker threads (default: CWDISS_THREADS or all cores)");
}

struct PhaseArgs {
  Common common;
  std::string kappa;
  std::string beta;
  bool curves = false;
  bool star = true;
};

int cmd_phase(const CLI::App& sub, const PhaseArgs& a) {
  const auto g = parse_gamma(a.common.gamma);
  const auto kappas = parse_range(a.kappa, "--kappa");
  for (double k : kappas) {
    if (!(k > 0.0)) throw config_error("kappa must be positive");
  }
  Outputs out{a.common.out, {}};
  if (!a.beta.empty()) {
    const auto betas = parse_range(a.beta, "--beta");
    for (double b : betas) {
      if (!(b > 0.0)) throw config_error("beta must be positive");
    }
    ClassifyOptions opts;
    const auto cells = scan_grid(kappas, betas, g, a.common.threads, opts);
    io::write_phase_csv(out.add("phase.csv"), cells);
    std::cout << "phase.csv: " << cells.size() << " cells\n";
  }
  if (a.curves || a.beta.empty()) {
    std::vector<CriticalCurves> curves(kappas.size());
    parallel_for(curves.size(), a.common.threads, [&](std::size_t i) { curves[i] = critical_curves(kappas[i], g, a.star); });
    const json j = {{"gamma", g.name()}, {"curves", io::curves_json(curves)}};
    io::write_json(out.add("curves.json"), j);
    std::cout << "curves.json: " << curves.size() << " rows\n";
  }
  write_manifest(sub, out, 0);
  return kExitOk;
}

struct OdeArgs {
  Common common;
  double beta = 2.0;
  double kappa = 1.0;
  std::string init = "0.1,0.1";
  double tmax = 100.0;
  double dt = 0.01;
  double tol = 1e-10;
  bool cycles = false;
};

int cmd_ode(const CLI::App& sub, const OdeArgs& a) {
  const auto g = parse_gamma(a.common.gamma);
  if (!(a.beta > 0.0) || !(a.kappa > 0.0)) throw config_error("beta and kappa must be positive");
  if (!(a.tmax > 0.0) || !(a.dt > 0.0) || !(a.tol > 0.0)) throw config_error("tmax, dt and tol must be positive");
  const auto [m0, z0] = parse_pair(a.init, "--init");
  if (std::abs(m0) > 1.0) throw Error(Errc::InvalidInit, "m outside [-1, 1]");
  Outputs out{a.common.out, {}};
  const auto path = integrate({m0, z0}, a.beta, a.kappa, g, a.tmax, a.tol, a.dt);
  std::vector<double> m, z;
  for (const auto& s : path.states) {
    m.push_back(s[0]);
    z.push_back(s[1]);
  }
  io::write_trajectory_csv(out.add("trajectory.csv"), path.times, m, z);
  std::cout << "trajectory.csv: " << path.size() << " rows\n";
  if (a.cycles) {
    const auto found = find_cycles(a.beta, a.kappa, g, default_radius_grid());
    const json j = {{"gamma", g.name()},
                    {"beta", a.beta},
                    {"kappa", a.kappa},
                    {"count", found.size()},
                    {"cycles", io::cycles_json(found, a.beta, a.kappa)}};
    io::write_json(out.add("cycles.json"), j);
    std::cout << "cycles.json: " << found.size() << " cycle(s)\n";
  }
  write_manifest(sub, out, 0);
  return kExitOk;
}

struct SimArgs {
  Common common;
  int n = 1000;
  double beta = 1.0;
  double kappa = 2.0;
  std::string init = "0.5,0.2";
  double tmax = 5.0;
  double dt = 0.01;
  std::int64_t replicas = 1;
  std::uint64_t seed = 1;
};

std::string replica_name(std::int64_t r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "traj_%04lld.csv", static_cast<long long>(r));
  return buf;
}

int cmd_simulate(const CLI::App& sub, const SimArgs& a) {
  const auto g = parse_gamma(a.common.gamma);
  if (a.replicas < 1) throw config_error("replicas must be at least 1");
  SimConfig cfg;
  cfg.n = a.n;
  cfg.beta = a.beta;
  cfg.kappa = a.kappa;
  cfg.t_max = a.tmax;
  cfg.record_dt = a.dt;
  cfg.seed = a.seed;
  cfg.check();
  const auto [m0, z0] = parse_pair(a.init, "--init");
  if (std::abs(m0) > 1.0) throw Error(Errc::InvalidInit, "m outside [-1, 1]");
  // Off-lattice magnetizations snap to the nearest admissible value.
  const auto init = MicroState::nearest(a.n, m0, z0);
  const auto runs = run_ensemble(cfg, g, init, a.replicas, a.common.threads);
  Outputs out{a.common.out, {}};
  json summary = {{"gamma", g.name()}, {"initial_m", init.m()}, {"initial_zeta", init.zeta}, {"replicas", json::array()}};
  for (std::size_t r = 0; r < runs.size(); ++r) {
    io::write_trajectory_csv(out.add(replica_name(static_cast<std::int64_t>(r))), runs[r]);
    summary["replicas"].push_back(io::trajectory_summary(runs[r], false));
  }
  io::write_json(out.add("summary.json"), summary);
  std::cout << runs.size() << " trajectories written to " << out.dir.string() << "\n";
  write_manifest(sub, out, a.seed);
  return kExitOk;
}

struct MdpArgs {
  Common common;
  std::string regime = "critical";
  double beta = 2.0;
  double kappa = 2.0;
  std::string path = "zero_cost";
  double x0 = 1.0;
  std::string init = "0.5,0.2";
  double tmax = 10.0;
  int points = 10000;
  bool exit = false;
  int n = 2000;
  double delta = 0.43;
  double b_n = 0.0;
  double horizon = 1.0;
  std::int64_t replicas = 1000;
  std::uint64_t seed = 1;
  std::string observable = "absm";
};

RegimeSpec make_regime(const MdpArgs& a, const GammaModel& g) {
  if (a.regime == "critical") return critical_line_regime(a.beta, g);
  if (a.regime == "tricritical") return tricritical_regime(g);
  if (a.regime == "subcritical") return subcritical_regime(a.beta, a.kappa, g);
  throw config_error("unknown regime '" + a.regime + "' (critical|tricritical|subcritical)");
}

// Rows of a numeric CSV with a header line.
std::vector<std::vector<double>> read_csv(const fs::path& file, std::size_t columns) {
  std::ifstream in(file);
  if (!in) throw config_error("cannot read path file " + file.string());
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() < columns) throw config_error("path file row has fewer than " + std::to_string(columns) + " columns");
    std::vector<double> row;
    for (std::size_t c = 0; c < columns; ++c) row.push_back(parse_double(cells[c], "path value"));
    rows.push_back(std::move(row));
  }
  return rows;
}

Observable parse_observable(const std::string& s) {
  if (s == "absm") return Observable::AbsM;
  if (s == "abszeta") return Observable::AbsZeta;
  if (s == "radius") return Observable::Radius;
  throw config_error("unknown observable '" + s + "' (absm|abszeta|radius)");
}

int cmd_mdp(const CLI::App& sub, const MdpArgs& a) {
  const auto g = parse_gamma(a.common.gamma);
  const auto spec = make_regime(a, g);
  Outputs out{a.common.out, {}};
  if (a.points < 3) throw Error(Errc::TooFewPoints, "--points must be at least 3");
  if (!(a.tmax > 0.0)) throw config_error("tmax must be positive");

  double value = 0.0;
  std::string path_file;
  if (spec.regime == Regime::Subcritical) {
    std::vector<double> ts;
    std::vector<Vec2> xy;
    if (a.path == "zero_cost") {
      const auto [x0, y0] = parse_pair(a.init, "--init");
      const auto relax = integrate_sampled(
          [&](const Vec2& z, Vec2& dz, double) {
            const double vx = 2.0 * (spec.gamma1 * z[1] - spec.gamma0 * z[0]);
            dz = {vx, spec.beta * vx - spec.kappa * z[1]};
          },
          {x0, y0}, a.tmax, 1e-13, a.tmax / (a.points - 1));
      ts = relax.times;
      xy = relax.states;
      path_file = "path.csv";
      auto f = io::open_out(out.add(path_file));
      f << "t,x,y\n";
      for (std::size_t i = 0; i < ts.size(); ++i) f << io::num(ts[i]) << ',' << io::num(xy[i][0]) << ',' << io::num(xy[i][1]) << '\n';
    } else {
      for (const auto& row : read_csv(a.path, 3)) {
        ts.push_back(row[0]);
        xy.push_back({row[1], row[2]});
      }
      path_file = a.path;
    }
    value = action(spec, ts, xy, {}, 1e-5);
  } else {
    std::vector<double> ts, xs;
    if (a.path == "zero_cost") {
      if (!(a.x0 >= 0.0)) throw config_error("x0 must be nonnegative");
      // ẋ = −b x^k in closed form.
      for (int i = 0; i < a.points; ++i) {
        const double t = a.tmax * i / (a.points - 1);
        ts.push_back(t);
        xs.push_back(spec.k == 2 ? a.x0 / (1.0 + spec.b * a.x0 * t)
                                 : a.x0 / std::sqrt(1.0 + 2.0 * spec.b * a.x0 * a.x0 * t));
      }
      path_file = "path.csv";
      auto f = io::open_out(out.add(path_file));
      f << "t,x\n";
      for (std::size_t i = 0; i < ts.size(); ++i) f << io::num(ts[i]) << ',' << io::num(xs[i]) << '\n';
    } else {
      for (const auto& row : read_csv(a.path, 2)) {
        ts.push_back(row[0]);
        xs.push_back(row[1]);
      }
      path_file = a.path;
    }
    value = action(spec, ts, xs);
  }
  json report = io::action_report(spec.regime, path_file, value);
  report["gamma"] = g.name();
  report["beta"] = spec.beta;
  report["kappa"] = spec.kappa;
  std::cout << "action = " << io::num(value) << "\n";

  if (a.exit) {
    ExitQuery q;
    q.base.n = a.n;
    q.base.beta = a.beta;
    q.base.kappa = a.kappa;
    q.base.t_max = a.horizon;
    q.base.record_dt = a.horizon;
    q.base.seed = a.seed;
    q.base.check();
    if (a.n % 2 != 0) throw config_error("exit estimation starts at m = 0 and needs an even n");
    q.init = MicroState::from_up_count(a.n, a.n / 2, 0.0);
    q.replicas = a.replicas;
    q.threads = a.common.threads;
    q.delta = a.delta;
    q.observable = parse_observable(a.observable);
    q.b_n = a.b_n > 0.0 ? a.b_n : std::pow(static_cast<double>(a.n), 0.25);
    q.horizon = a.horizon;
    const auto est = estimate_exit_probability(q, g);
    io::write_exit_csv(out.add("exit.csv"), est.samples);
    report["exit"] = {{"n", a.n},
                      {"b_n", q.b_n},
                      {"delta", a.delta},
                      {"horizon", a.horizon},
                      {"observable", a.observable},
                      {"replicas", est.replicas},
                      {"hits", est.hits},
                      {"p_hat", est.p_hat},
                      {"std_err", est.std_err},
                      {"rate_defined", est.rate_defined},
                      {"rate_hat", est.rate_defined ? io::jnum(est.rate_hat) : json(nullptr)}};
    std::cout << "exit: p_hat = " << io::num(est.p_hat) << " (" << est.hits << "/" << est.replicas << ")";
    if (est.rate_defined) {
      std::cout << ", rate = " << io::num(est.rate_hat) << "\n";
    } else {
      std::cout << ", no hits: rate undefined\n";
    }
  }
  io::write_json(out.add("action.json"), report);
  write_manifest(sub, out, a.exit ? a.seed : 0);
  return kExitOk;
}

struct VerifyArgs {
  Common common;
  bool full = false;
};

int cmd_verify(const CLI::App& sub, const VerifyArgs& a) {
  std::vector<checks::Check> suite = checks::invariants();
  // The long criteria (phase diagram, Monte Carlo trend) only run with --full.
  for (auto& c : checks::acceptance(a.common.threads)) {
    if (a.full || c.budget_seconds <= 120.0) suite.push_back(std::move(c));
  }
  bool all = true;
  json results = json::array();
  for (const auto& c : suite) {
    const auto r = checks::run(c);
    std::cout << checks::line(r) << std::endl;
    all = all && r.passed;
    results.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"detail", r.detail}});
  }
  Outputs out{a.common.out, {}};
  io::write_json(out.add("verify.json"), {{"all_passed", all}, {"checks", results}});
  write_manifest(sub, out, 0);
  return all ? kExitOk : kExitNumeric;
}

int exit_code_for(Errc e) {
  switch (e) {
    case Errc::StepSizeUnderflow:
    case Errc::NewtonNoConvergence:
    case Errc::NoReturn:
    case Errc::UnboundedSup:
    case Errc::ZeroHits:
      return kExitNumeric;
    default:
      return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curie-Weiss model with dissipative coupling: phases, flows, simulation, moderate deviations"};
  app.set_config("--config", "", "INI/TOML file; [phase], [ode], ... sections, flags override it");
  app.require_subcommand(1);

  PhaseArgs phase;
  auto* p = app.add_subcommand("phase", "scan the phase diagram and critical curves");
  add_common(p, phase.common, true);
  p->add_option("--kappa", phase.kappa, "kappa value or start:stop:count")->required();
  p->add_option("--beta", phase.beta, "beta value or start:stop:count (omit for curves only)");
  p->add_flag("--curves", phase.curves, "write critical curves JSON");
  p->add_flag("!--no-star", phase.star, "skip the cycle-fold curve beta_star");

  OdeArgs ode;
  auto* o = app.add_subcommand("ode", "integrate the macroscopic flow");
  add_common(o, ode.common, false);
  o->add_option("--beta", ode.beta)->capture_default_str();
  o->add_option("--kappa", ode.kappa)->capture_default_str();
  o->add_option("--init", ode.init, "m,zeta")->capture_default_str();
  o->add_option("--tmax", ode.tmax)->capture_default_str();
  o->add_option("--dt", ode.dt, "output spacing")->capture_default_str();
  o->add_option("--tol", ode.tol, "relative tolerance")->capture_default_str();
  o->add_flag("--cycles", ode.cycles, "locate limit cycles");

  SimArgs sim;
  auto* s = app.add_subcommand("simulate", "run the n-spin Markov process");
  add_common(s, sim.common, true);
  s->add_option("--n", sim.n)->capture_default_str();
  s->add_option("--beta", sim.beta)->capture_default_str();
  s->add_option("--kappa", sim.kappa)->capture_default_str();
  s->add_option("--init", sim.init, "m,zeta")->capture_default_str();
  s->add_option("--tmax", sim.tmax)->capture_default_str();
  s->add_option("--dt", sim.dt, "recording spacing")->capture_default_str();
  s->add_option("--replicas", sim.replicas)->capture_default_str();
  s->add_option("--seed", sim.seed)->capture_default_str();

  MdpArgs mdp;
  auto* d = app.add_subcommand("mdp", "moderate deviation actions and exit probabilities");
  add_common(d, mdp.common, true);
  d->add_option("--regime", mdp.regime, "critical|tricritical|subcritical")->capture_default_str();
  d->add_option("--beta", mdp.beta)->capture_default_str();
  d->add_option("--kappa", mdp.kappa, "subcritical regime and exit estimation")->capture_default_str();
  d->add_option("--path", mdp.path, "zero_cost or a CSV file (t,x or t,x,y)")->capture_default_str();
  d->add_option("--x0", mdp.x0, "start of the zero-cost path")->capture_default_str();
  d->add_option("--init", mdp.init, "subcritical zero-cost start x,y")->capture_default_str();
  d->add_option("--tmax", mdp.tmax)->capture_default_str();
  d->add_option("--points", mdp.points)->capture_default_str();
  d->add_flag("--exit", mdp.exit, "also estimate an exit probability by simulation");
  d->add_option("--n", mdp.n)->capture_default_str();
  d->add_option("--delta", mdp.delta)->capture_default_str();
  d->add_option("--bn", mdp.b_n, "scale b_n (0: n^(1/4))")->capture_default_str();
  d->add_option("--horizon", mdp.horizon)->capture_default_str();
  d->add_option("--replicas", mdp.replicas)->capture_default_str();
  d->add_option("--seed", mdp.seed)->capture_default_str();
  d->add_option("--observable", mdp.observable, "absm|abszeta|radius")->capture_default_str();

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "run the built-in check suite");
  add_common(v, verify.common, true);
  v->add_flag("--full", verify.full, "include the long acceptance criteria");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*p) return cmd_phase(*p, phase);
    if (*o) return cmd_ode(*o, ode);
    if (*s) return cmd_simulate(*s, sim);
    if (*d) return cmd_mdp(*d, mdp);
    if (*v) return cmd_verify(*v, verify);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitConfig;
}
