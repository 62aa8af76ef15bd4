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

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cwdiss/errors.hpp"
#include "cwdiss/macroflow.hpp"
#include "cwdiss/microsim.hpp"
#include "cwdiss/moddev.hpp"
#include "cwdiss/phases.hpp"

// CSV and JSON exports. Numbers are written in shortest round-trip form so
// identical inputs give identical bytes.

namespace cwdiss::io {

using nlohmann::json;

inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// JSON has no inf/nan; those become null.
inline json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::InvalidConfig, "cannot open " + path.string() + " for writing");
  return out;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// CSV

inline void write_trajectory_csv(const std::filesystem::path& path, const std::vector<double>& t,
                                 const std::vector<double>& m, const std::vector<double>& zeta) {
  auto out = open_out(path);
  out << "t,m,zeta\n";
  for (std::size_t i = 0; i < t.size(); ++i) out << num(t[i]) << ',' << num(m[i]) << ',' << num(zeta[i]) << '\n';
}

inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& tr) {
  write_trajectory_csv(path, tr.times, tr.m, tr.zeta);
}

inline void write_exit_csv(const std::filesystem::path& path, const std::vector<ExitSample>& samples) {
  auto out = open_out(path);
  out << "replica,sup_obs,hit,first_hit_time\n";
  for (const auto& s : samples) {
    out << s.replica << ',' << num(s.sup_obs) << ',' << (s.hit ? 1 : 0) << ',' << num(s.first_hit_time) << '\n';
  }
}

inline void write_phase_csv(const std::filesystem::path& path, const std::vector<PhaseCell>& cells) {
  auto out = open_out(path);
  out << "kappa,beta,label,beta_c,sigma_L\n";
  for (const auto& c : cells) {
    out << num(c.kappa) << ',' << num(c.beta) << ',' << to_string(c.label) << ',' << num(c.beta_c) << ','
        << num(c.sigma_L) << '\n';
  }
}

struct TableRow {
  double x = 0.0;
  double p_or_v = 0.0;
  double value = 0.0;
};

inline void write_table_csv(const std::filesystem::path& path, const std::vector<TableRow>& rows) {
  auto out = open_out(path);
  out << "x,p_or_v,value\n";
  for (const auto& r : rows) out << num(r.x) << ',' << num(r.p_or_v) << ',' << num(r.value) << '\n';
}

// ---------------------------------------------------------------------------
// JSON records

inline json cycle_json(const CycleResult& c, double beta, double kappa) {
  return {{"beta", beta},           {"kappa", kappa},          {"radius", jnum(c.radius)},
          {"period", jnum(c.period)}, {"slope", jnum(c.floquet_slope)}, {"stability", to_string(c.stability)}};
}

inline json cycles_json(const std::vector<CycleResult>& cycles, double beta, double kappa) {
  json arr = json::array();
  for (const auto& c : cycles) arr.push_back(cycle_json(c, beta, kappa));
  return arr;
}

inline json optional_json(const std::optional<double>& v) { return v ? jnum(*v) : json(nullptr); }

inline json curves_json(const std::vector<CriticalCurves>& curves) {
  json rows = json::array();
  for (const auto& c : curves) {
    rows.push_back({{"kappa", c.kappa},
                    {"beta_c", jnum(c.beta_c)},
                    {"kappa_tc", optional_json(c.kappa_tc)},
                    {"beta_delta", optional_json(c.beta_delta)},
                    {"beta_star", optional_json(c.beta_star)},
                    {"sigma_L", jnum(c.sigma_L)}});
  }
  return rows;
}

inline json config_json(const SimConfig& c) {
  return {{"n", c.n},           {"beta", c.beta}, {"kappa", c.kappa},
          {"t_max", c.t_max},   {"record_dt", c.record_dt}, {"seed", c.seed},
          {"replica_index", c.replica_index}};
}

/// {config, jumps, wall_time}; wall_time is omitted when include_wall_time is false.
inline json trajectory_summary(const Trajectory& tr, bool include_wall_time = true) {
  json j = {{"config", config_json(tr.meta)}, {"jumps", tr.jumps}};
  if (include_wall_time) j["wall_time"] = tr.wall_time;
  return j;
}

inline json action_report(Regime regime, const std::string& path_file, double value) {
  return {{"regime", to_string(regime)},
          {"path_file", path_file},
          {"action_value", jnum(value)},
          {"finite", std::isfinite(value)}};
}

/// FNV-1a, 64 bit.
inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct RunManifest {
  std::string command;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
  std::string versions;

  json to_json() const {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(config_hash));
    return {{"command", command}, {"config_hash", hex}, {"seed", seed}, {"outputs", outputs}, {"versions", versions}};
  }
};

}  // namespace cwdiss::io
