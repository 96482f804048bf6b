// Copyright 2026 The flp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "flp/errors.hpp"
#include "flp/exact_solver.hpp"
#include "flp/model.hpp"
#include "flp/version.hpp"

namespace flp {

// Shortest round-trip decimal form; identical inputs give identical bytes.
inline std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open output file: " + path.string());
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) throw IoError("short write: " + path.string());
}

// Provenance block attached to every JSON artifact: enough to rerun the
// command and to know which tolerances shaped the numbers.
inline nlohmann::ordered_json provenance_block(const std::string& command,
                                               const nlohmann::ordered_json& parameters,
                                               const nlohmann::ordered_json& tolerances) {
  nlohmann::ordered_json p;
  p["command"] = command;
  p["parameters"] = parameters;
  p["tolerances"] = tolerances;
  p["version"] = std::string(kVersion);
  return p;
}

inline nlohmann::ordered_json model_json(const ModelParams& m) {
  nlohmann::ordered_json j;
  j["t"] = m.t;
  j["delta_g"] = m.delta_g;
  j["delta_t"] = m.delta_t;
  j["delta"] = m.delta;
  j["g"] = m.pair_tunneling();
  j["t_ad"] = m.exchange_tunneling();
  return j;
}

inline nlohmann::ordered_json solution_json(const ExactSolution& sol) {
  nlohmann::ordered_json j;
  j["e_gs"] = sol.energy;
  j["n_d"] = sol.point.pair_density;
  j["l_h"] = sol.point.core_fraction;
  if (sol.low_density) j["n_l"] = *sol.low_density;
  else j["n_l"] = nullptr;
  if (sol.high_density) j["n_h"] = *sol.high_density;
  else j["n_h"] = nullptr;
  j["p_c"] = sol.critical_polarization;
  j["phase"] = std::string(label_name(sol.label));
  j["constraint_active"] = sol.constraint_active;
  return j;
}

// One CSV row per cell, delta-major, schema
//   delta,p,n_d,l_h,n_l,n_h,e_gs,p_c,phase
// Absent densities serialize as empty fields.
inline std::string phase_diagram_csv(const PhaseDiagramGrid& grid) {
  std::string out = "delta,p,n_d,l_h,n_l,n_h,e_gs,p_c,phase\n";
  for (std::size_t i = 0; i < grid.detuning_axis.size(); ++i)
    for (std::size_t j = 0; j < grid.imbalance_axis.size(); ++j) {
      const ExactSolution& c = grid.cell(i, j);
      out += format_double(grid.detuning_axis[i]);
      out += ',';
      out += format_double(grid.imbalance_axis[j]);
      out += ',';
      out += format_double(c.point.pair_density);
      out += ',';
      out += format_double(c.point.core_fraction);
      out += ',';
      if (c.low_density) out += format_double(*c.low_density);
      out += ',';
      if (c.high_density) out += format_double(*c.high_density);
      out += ',';
      out += format_double(c.energy);
      out += ',';
      out += format_double(c.critical_polarization);
      out += ',';
      out += label_name(c.label);
      out += '\n';
    }
  return out;
}

inline std::string curve_csv(const std::string& header,
                             const std::vector<std::pair<double, double>>& rows) {
  std::string out = header;
  out += '\n';
  for (const auto& [x, y] : rows) {
    out += format_double(x);
    out += ',';
    out += format_double(y);
    out += '\n';
  }
  return out;
}

}  // namespace flp
