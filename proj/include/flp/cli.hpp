// Copyright 2026 The flp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "flp/artifacts.hpp"
#include "flp/checkpoint.hpp"
#include "flp/dense.hpp"
#include "flp/errors.hpp"
#include "flp/exact_solver.hpp"
#include "flp/observables.hpp"
#include "flp/version.hpp"

namespace flp {

enum class Command {
  exact,
  scan,
  pc_curve,
  nd_curve,
  ed,
  structure_factor,
  gap,
};

// Fully resolved run description; every numeric option is range-checked
// during parsing, so execute() can assume a valid request.
struct RunSpec {
  Command command = Command::exact;

  ModelParams model;       // delta_g defaults to the integrable point
  double filling = 1.0;
  double imbalance = 0.0;

  // closed-form solver options
  SolverOptions solver;
  double delta_min = 0.0, delta_max = 0.0;
  int delta_steps = 2;
  double p_min = 0.0, p_max = 1.0;
  int p_steps = 101;
  double n_min = 0.1, n_max = 1.9;
  int n_steps = 2;
  int jobs = 1;

  // diagonalization options
  int sites = 12;
  LanczosOptions lanczos;
  std::uint64_t max_dimension = SectorBasis::default_max_dimension;
  int seed_count = 4;
  std::optional<int> anchor;
  std::string state_in, state_out;

  std::string out;  // artifact path; empty = stdout
};

namespace detail {

inline int default_jobs() {
  if (const char* env = std::getenv("FLP_JOBS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

inline void add_model_flags(CLI::App* cmd, RunSpec& spec) {
  cmd->add_option("--delta", spec.model.delta, "On-site energy of a doublon")
      ->capture_default_str();
  cmd->add_option("--delta-g", spec.model.delta_g,
                  "Offset of the singly-assisted hop amplitude g = delta_g + t")
      ->capture_default_str();
  cmd->add_option("--delta-t", spec.model.delta_t,
                  "Offset of the doubly-assisted hop amplitude t_ad = delta_t + 2g - t")
      ->capture_default_str();
}

inline void add_solver_flags(CLI::App* cmd, RunSpec& spec) {
  cmd->add_option("--grid", spec.solver.grid_points, "Coarse minimization grid points per axis")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();
}

inline void add_lanczos_flags(CLI::App* cmd, RunSpec& spec) {
  cmd->add_option("--tol", spec.lanczos.tolerance, "Residual tolerance |H v - e0 v|")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-iter", spec.lanczos.max_iterations, "Lanczos step budget")
      ->check(CLI::Range(1, 1000000))
      ->capture_default_str();
  cmd->add_option("--krylov", spec.lanczos.krylov_cap, "Stored basis cap before restart")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();
  cmd->add_option("--seed", spec.lanczos.seed, "Start-vector seed")->capture_default_str();
  cmd->add_option("--max-dim", spec.max_dimension,
                  "Sector dimension budget (raise explicitly for L = 16)")
      ->capture_default_str();
}

inline nlohmann::ordered_json sector_json(const Sector& s) {
  nlohmann::ordered_json j;
  j["L"] = s.sites;
  j["N_up"] = s.n_up;
  j["N_dn"] = s.n_dn;
  return j;
}

inline void emit(const RunSpec& spec, const std::string& content) {
  if (spec.out.empty())
    std::cout << content;
  else
    write_text_file(spec.out, content);
}

inline nlohmann::ordered_json lanczos_tolerances(const RunSpec& spec) {
  nlohmann::ordered_json t;
  t["tol"] = spec.lanczos.tolerance;
  t["max_iter"] = spec.lanczos.max_iterations;
  t["krylov"] = spec.lanczos.krylov_cap;
  return t;
}

inline nlohmann::ordered_json solver_tolerances(const RunSpec& spec) {
  nlohmann::ordered_json t;
  t["grid"] = spec.solver.grid_points;
  t["refine_step"] = spec.solver.refine_step;
  t["tie_tol"] = spec.solver.tie_tol;
  return t;
}

}  // namespace detail

// Builds the CLI11 application bound to a RunSpec. Kept separate from
// parsing so tests can drive it with argv arrays.
inline std::unique_ptr<CLI::App> make_app(RunSpec& spec) {
  auto app = std::make_unique<CLI::App>(
      "Ground-state phases of a 1D two-species lattice gas with "
      "occupation-dependent hopping");
  app->set_version_flag("--version", std::string(kVersion));
  app->require_subcommand(1);
  spec.jobs = detail::default_jobs();
  spec.model.delta_g = -1.0;  // integrable point unless overridden

  const auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", spec.out, "Artifact path (stdout when omitted)");
  };

  CLI::App* exact = app->add_subcommand(
      "exact", "Closed-form two-fluid ground state at one (n, p, delta)");
  exact->add_option("--n", spec.filling, "Total density")
      ->required()
      ->check(CLI::Range(1e-12, 2.0 - 1e-12));
  exact->add_option("--p", spec.imbalance, "Polarization")->check(CLI::Range(-1.0, 1.0));
  detail::add_model_flags(exact, spec);
  detail::add_solver_flags(exact, spec);
  add_out(exact);
  exact->callback([&spec] { spec.command = Command::exact; });

  CLI::App* scan =
      app->add_subcommand("scan", "Phase diagram over a delta x p rectangle, CSV");
  scan->add_option("--n", spec.filling, "Total density")
      ->required()
      ->check(CLI::Range(1e-12, 2.0 - 1e-12));
  scan->add_option("--delta-min", spec.delta_min)->required();
  scan->add_option("--delta-max", spec.delta_max)->required();
  scan->add_option("--delta-steps", spec.delta_steps)->required()->check(CLI::Range(2, 100000));
  scan->add_option("--p-min", spec.p_min)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  scan->add_option("--p-max", spec.p_max)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  scan->add_option("--p-steps", spec.p_steps)->check(CLI::Range(2, 100000))->capture_default_str();
  scan->add_option("--jobs", spec.jobs, "Worker threads (default: FLP_JOBS or 1)")
      ->check(CLI::Range(1, 1024));
  detail::add_model_flags(scan, spec);
  detail::add_solver_flags(scan, spec);
  add_out(scan);
  scan->callback([&spec] { spec.command = Command::scan; });

  CLI::App* pc = app->add_subcommand("pc-curve", "Critical polarization versus density, CSV");
  pc->add_option("--n-min", spec.n_min)->required()->check(CLI::Range(1e-12, 2.0 - 1e-12));
  pc->add_option("--n-max", spec.n_max)->required()->check(CLI::Range(1e-12, 2.0 - 1e-12));
  pc->add_option("--n-steps", spec.n_steps)->required()->check(CLI::Range(2, 100000));
  detail::add_model_flags(pc, spec);
  detail::add_solver_flags(pc, spec);
  add_out(pc);
  pc->callback([&spec] { spec.command = Command::pc_curve; });

  CLI::App* nd = app->add_subcommand("nd-curve", "Pair density versus polarization, CSV");
  nd->add_option("--n", spec.filling, "Total density")
      ->required()
      ->check(CLI::Range(1e-12, 2.0 - 1e-12));
  nd->add_option("--p-steps", spec.p_steps, "Points on the [0, 1] polarization axis")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();
  detail::add_model_flags(nd, spec);
  detail::add_solver_flags(nd, spec);
  add_out(nd);
  nd->callback([&spec] { spec.command = Command::nd_curve; });

  CLI::App* ed = app->add_subcommand(
      "ed", "Lanczos ground state of one finite sector, JSON report");
  ed->add_option("--L", spec.sites, "Chain length")->check(CLI::Range(2, 30))
      ->capture_default_str();
  ed->add_option("--n", spec.filling, "Total density")->check(CLI::Range(0.0, 2.0))
      ->capture_default_str();
  ed->add_option("--p", spec.imbalance, "Polarization")->check(CLI::Range(-1.0, 1.0))
      ->capture_default_str();
  detail::add_model_flags(ed, spec);
  detail::add_lanczos_flags(ed, spec);
  ed->add_option("--state-out", spec.state_out, "Write the converged vector checkpoint here");
  ed->add_option("--state-in", spec.state_in,
                 "Measure a previously saved checkpoint instead of solving");
  add_out(ed);
  ed->callback([&spec] { spec.command = Command::ed; });

  CLI::App* sf = app->add_subcommand(
      "structure-factor",
      "Charge structure factor N(q) averaged over a Lanczos seed ensemble, JSON");
  sf->add_option("--L", spec.sites, "Chain length")->check(CLI::Range(2, 30))
      ->capture_default_str();
  sf->add_option("--n", spec.filling, "Total density")->check(CLI::Range(0.0, 2.0))
      ->capture_default_str();
  sf->add_option("--p", spec.imbalance, "Polarization")->check(CLI::Range(-1.0, 1.0))
      ->capture_default_str();
  detail::add_model_flags(sf, spec);
  detail::add_lanczos_flags(sf, spec);
  sf->add_option("--seeds", spec.seed_count, "Ensemble size (seeds seed..seed+count-1)")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  sf->add_option("--site", spec.anchor, "Correlator anchor site (default L/2)")
      ->check(CLI::Range(0, 29));
  add_out(sf);
  sf->callback([&spec] { spec.command = Command::structure_factor; });

  CLI::App* gap = app->add_subcommand(
      "gap", "Charge gap E0(N+1) + E0(N-1) - 2 E0(N) at zero polarization, JSON");
  gap->add_option("--L", spec.sites, "Chain length")->check(CLI::Range(2, 30))
      ->capture_default_str();
  gap->add_option("--n", spec.filling, "Total density (n L must be an integer)")
      ->check(CLI::Range(0.0, 2.0))
      ->capture_default_str();
  detail::add_model_flags(gap, spec);
  detail::add_lanczos_flags(gap, spec);
  add_out(gap);
  gap->callback([&spec] { spec.command = Command::gap; });

  return app;
}

// Post-parse validation that CLI11 range checks cannot express.
inline void validate_spec(const RunSpec& spec) {
  switch (spec.command) {
    case Command::scan:
      if (spec.delta_min > spec.delta_max)
        throw UsageError("--delta-min must not exceed --delta-max");
      if (spec.p_min > spec.p_max) throw UsageError("--p-min must not exceed --p-max");
      break;
    case Command::pc_curve:
      if (spec.n_min > spec.n_max) throw UsageError("--n-min must not exceed --n-max");
      break;
    case Command::ed:
    case Command::structure_factor:
      try {
        const Sector s = sector_for(spec.sites, FillingSpec(spec.filling, spec.imbalance));
        if (spec.anchor && *spec.anchor >= spec.sites)
          throw UsageError("--site must be smaller than --L");
        (void)s;
      } catch (const NonIntegerSector& e) {
        throw UsageError(e.what());
      }
      break;
    case Command::gap: {
      const double atoms = spec.filling * spec.sites;
      if (std::abs(atoms - std::round(atoms)) > 1e-9)
        throw UsageError("gap: n L must be an integer atom number");
      const int n_atoms = static_cast<int>(std::round(atoms));
      if (n_atoms < 1 || n_atoms + 1 > 2 * spec.sites)
        throw UsageError("gap: need 1 <= N and N+1 <= 2L for the particle-number probe");
      break;
    }
    default:
      break;
  }
}

int execute(const RunSpec& spec);

// argv -> RunSpec; throws UsageError (and lets CLI::ParseError surface for
// help/version handling in run_cli).
inline RunSpec parse_cli(int argc, const char* const* argv) {
  RunSpec spec;
  auto app = make_app(spec);
  app->parse(argc, argv);
  validate_spec(spec);
  return spec;
}

inline int run_cli(int argc, const char* const* argv) {
  RunSpec spec;
  auto app = make_app(spec);
  try {
    app->parse(argc, argv);
    validate_spec(spec);
    return execute(spec);
  } catch (const CLI::CallForHelp& e) {
    return app->exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app->exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::usage);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::usage);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

namespace detail {

inline int run_exact(const RunSpec& spec) {
  const ExactSolution sol =
      minimize_ground_state(spec.filling, spec.imbalance, spec.model, spec.solver);
  nlohmann::ordered_json j;
  j["n"] = spec.filling;
  j["p"] = std::abs(spec.imbalance);
  j["model"] = model_json(spec.model);
  j["solution"] = solution_json(sol);
  nlohmann::ordered_json params;
  params["n"] = spec.filling;
  params["p"] = spec.imbalance;
  params["model"] = model_json(spec.model);
  j["provenance"] = provenance_block("exact", params, solver_tolerances(spec));
  emit(spec, j.dump(2) + "\n");
  return 0;
}

inline int run_scan(const RunSpec& spec) {
  const PhaseDiagramGrid grid = scan_phase_diagram(
      spec.filling, spec.model, spec.delta_min, spec.delta_max, spec.delta_steps, spec.p_min,
      spec.p_max, spec.p_steps, spec.solver, spec.jobs);
  emit(spec, phase_diagram_csv(grid));
  return 0;
}

inline int run_pc_curve(const RunSpec& spec) {
  std::vector<std::pair<double, double>> rows;
  rows.reserve(spec.n_steps);
  for (int i = 0; i < spec.n_steps; ++i) {
    const double n =
        (i == spec.n_steps - 1)
            ? spec.n_max
            : spec.n_min + (spec.n_max - spec.n_min) * static_cast<double>(i) / (spec.n_steps - 1);
    rows.emplace_back(n, critical_polarization(n, spec.model, spec.solver));
  }
  emit(spec, curve_csv("n,p_c", rows));
  return 0;
}

inline int run_nd_curve(const RunSpec& spec) {
  require_integrable(spec.model);
  std::vector<std::pair<double, double>> rows;
  rows.reserve(spec.p_steps);
  const auto unc = solve_unconstrained(spec.filling, spec.model, spec.solver);
  for (int j = 0; j < spec.p_steps; ++j) {
    const double p = (j == spec.p_steps - 1)
                         ? 1.0
                         : static_cast<double>(j) / (spec.p_steps - 1);
    rows.emplace_back(
        p, finish_solution(spec.filling, p, spec.model, spec.solver, unc).point.pair_density);
  }
  emit(spec, curve_csv("p,n_d", rows));
  return 0;
}

inline int run_ed(const RunSpec& spec) {
  const Sector sector = sector_for(spec.sites, FillingSpec(spec.filling, spec.imbalance));
  const SectorBasis basis(sector, spec.max_dimension);
  const HamiltonianOperator h(basis, spec.model);

  LanczosReport report;
  Eigen::VectorXd state;
  std::string source;
  if (!spec.state_in.empty()) {
    Checkpoint cp = load_state(spec.state_in);
    if (!(cp.sector == sector)) {
      std::ostringstream msg;
      msg << "checkpoint sector (L=" << cp.sector.sites << ", N_up=" << cp.sector.n_up
          << ", N_dn=" << cp.sector.n_dn << ") does not match the requested sector";
      throw BasisMismatch(msg.str());
    }
    state = std::move(cp.state);
    state.normalize();
    Eigen::VectorXd hv(state.size());
    h.apply(state, hv);
    report.ground_energy = state.dot(hv);
    report.iterations = 0;
    report.residual = (hv - report.ground_energy * state).norm();
    report.converged = report.residual <= spec.lanczos.tolerance;
    source = "checkpoint";
  } else {
    std::tie(report, state) = ground_state_lanczos(h, spec.lanczos);
    source = "lanczos";
  }
  if (!spec.state_out.empty()) save_state(spec.state_out, sector, state);

  nlohmann::ordered_json j;
  j["sector"] = sector_json(sector);
  j["dimension"] = basis.dimension();
  j["model"] = model_json(spec.model);
  j["source"] = source;
  nlohmann::ordered_json rep;
  rep["e0"] = report.ground_energy;
  rep["iterations"] = report.iterations;
  rep["residual"] = report.residual;
  rep["converged"] = report.converged;
  j["report"] = rep;
  j["n_d"] = pair_density(basis, state);
  nlohmann::ordered_json params;
  params["L"] = spec.sites;
  params["n"] = spec.filling;
  params["p"] = spec.imbalance;
  params["seed"] = spec.lanczos.seed;
  params["model"] = model_json(spec.model);
  j["provenance"] = provenance_block("ed", params, lanczos_tolerances(spec));
  emit(spec, j.dump(2) + "\n");
  return 0;
}

inline int run_structure_factor(const RunSpec& spec) {
  const Sector sector = sector_for(spec.sites, FillingSpec(spec.filling, spec.imbalance));
  const SectorBasis basis(sector, spec.max_dimension);
  const HamiltonianOperator h(basis, spec.model);
  const int L = spec.sites;

  std::vector<std::uint64_t> seeds(spec.seed_count);
  for (int i = 0; i < spec.seed_count; ++i) seeds[i] = spec.lanczos.seed + i;

  std::vector<double> nq_avg(L, 0.0), corr_avg(L, 0.0);
  std::vector<double> nq_min(L, std::numeric_limits<double>::infinity());
  std::vector<double> nq_max(L, -std::numeric_limits<double>::infinity());
  double nd_avg = 0.0, e0_first = 0.0;
  int anchor_site = spec.anchor.value_or(L / 2);
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    LanczosOptions o = spec.lanczos;
    o.seed = seeds[s];
    const auto [report, state] = ground_state_lanczos(h, o);
    if (s == 0) e0_first = report.ground_energy;
    const ObservableSet obs = measure_observables(basis, state, anchor_site);
    nd_avg += obs.pair_density;
    for (int k = 0; k < L; ++k) {
      nq_avg[k] += obs.structure_factor[k];
      corr_avg[k] += obs.correlations[k];
      nq_min[k] = std::min(nq_min[k], obs.structure_factor[k]);
      nq_max[k] = std::max(nq_max[k], obs.structure_factor[k]);
    }
  }
  const double count = static_cast<double>(seeds.size());
  nd_avg /= count;
  std::vector<double> q(L), spread(L);
  for (int k = 0; k < L; ++k) {
    nq_avg[k] /= count;
    corr_avg[k] /= count;
    q[k] = 2.0 * kPi * k / L;
    spread[k] = nq_max[k] - nq_min[k];
  }

  nlohmann::ordered_json j;
  j["sector"] = sector_json(sector);
  j["dimension"] = basis.dimension();
  j["model"] = model_json(spec.model);
  j["anchor"] = anchor_site;
  j["q"] = q;
  j["nq"] = nq_avg;
  j["spread"] = spread;
  j["peak_q"] = peak_momentum(nq_avg);
  j["seeds"] = seeds;
  j["corr"] = corr_avg;
  j["n_d"] = nd_avg;
  j["e0"] = e0_first;
  nlohmann::ordered_json params;
  params["L"] = spec.sites;
  params["n"] = spec.filling;
  params["p"] = spec.imbalance;
  params["site"] = anchor_site;
  params["model"] = model_json(spec.model);
  j["provenance"] = provenance_block("structure-factor", params, lanczos_tolerances(spec));
  emit(spec, j.dump(2) + "\n");
  return 0;
}

inline int run_gap(const RunSpec& spec) {
  const int atoms = static_cast<int>(std::round(spec.filling * spec.sites));
  const ChargeGap g =
      charge_gap(spec.model, spec.sites, atoms, spec.lanczos, spec.max_dimension);
  nlohmann::ordered_json j;
  j["L"] = spec.sites;
  j["N"] = atoms;
  j["model"] = model_json(spec.model);
  j["gap"] = g.gap;
  j["e_minus"] = g.energy_minus;
  j["e0"] = g.energy_0;
  j["e_plus"] = g.energy_plus;
  nlohmann::ordered_json params;
  params["L"] = spec.sites;
  params["n"] = spec.filling;
  params["N"] = atoms;
  params["seed"] = spec.lanczos.seed;
  params["model"] = model_json(spec.model);
  j["provenance"] = provenance_block("gap", params, lanczos_tolerances(spec));
  emit(spec, j.dump(2) + "\n");
  return 0;
}

}  // namespace detail

inline int execute(const RunSpec& spec) {
  switch (spec.command) {
    case Command::exact: return detail::run_exact(spec);
    case Command::scan: return detail::run_scan(spec);
    case Command::pc_curve: return detail::run_pc_curve(spec);
    case Command::nd_curve: return detail::run_nd_curve(spec);
    case Command::ed: return detail::run_ed(spec);
    case Command::structure_factor: return detail::run_structure_factor(spec);
    case Command::gap: return detail::run_gap(spec);
  }
  throw UsageError("no command selected");
}

}  // namespace flp
