// Copyright 2026 The flp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <Eigen/Core>

#include "flp/errors.hpp"
#include "flp/model.hpp"
#include "flp/variational.hpp"

namespace flp {

// Ground-state phases of the imbalanced chain at the integrable point.
//   SF0  unpolarized superfluid of pairs          NP   partially polarized normal liquid
//   SFP  polarized superfluid (pairs + unpaired)  NFP  fully polarized normal liquid
//   INS  incompressible state at unit filling
// Composite labels denote spatial coexistence of a dense core with a dilute shell.
enum class PhaseLabel {
  sf0,
  sf0_nfp,
  sf0_np,
  sfp_np,
  sfp_nfp,
  np,
  sfp_uniform,
  insulator,
};

inline constexpr std::string_view label_name(PhaseLabel l) {
  switch (l) {
    case PhaseLabel::sf0: return "SF0";
    case PhaseLabel::sf0_nfp: return "SF0+NFP";
    case PhaseLabel::sf0_np: return "SF0+NP";
    case PhaseLabel::sfp_np: return "SFP+NP";
    case PhaseLabel::sfp_nfp: return "SFP+NFP";
    case PhaseLabel::np: return "NP";
    case PhaseLabel::sfp_uniform: return "SFP";
    case PhaseLabel::insulator: return "INS";
  }
  return "?";
}

inline std::optional<PhaseLabel> parse_label(std::string_view s) {
  for (PhaseLabel l : {PhaseLabel::sf0, PhaseLabel::sf0_nfp, PhaseLabel::sf0_np,
                       PhaseLabel::sfp_np, PhaseLabel::sfp_nfp, PhaseLabel::np,
                       PhaseLabel::sfp_uniform, PhaseLabel::insulator})
    if (label_name(l) == s) return l;
  return std::nullopt;
}

struct ExactSolution {
  double energy = 0.0;  // ground-state energy per site, units of t
  VariationalPoint point;
  std::optional<double> low_density;   // n_l, absent when the shell vanishes
  std::optional<double> high_density;  // n_h, absent when the core vanishes
  double critical_polarization = 1.0;  // p_c of the same (n, delta), cached
  PhaseLabel label = PhaseLabel::np;
  bool constraint_active = false;  // pair number pinned at n (1 - p) / 2
};

struct SolverOptions {
  int grid_points = 512;       // exhaustive coarse grid, per axis
  double refine_step = 1e-10;  // pattern-search termination step
  double tie_tol = 1e-12;      // energies this close count as tied
};

PhaseLabel classify_phase(double filling, double imbalance, const ExactSolution& sol,
                          double tol = 1e-6);

namespace detail {

// Energy evaluation stripped of feasibility checks; callers guarantee the
// point lies inside the polytope (up to clamping dust).
struct EnergyEval {
  double n, t, tau, delta;

  EnergyEval(double filling, const ModelParams& p)
      : n(filling), t(p.t), tau(std::abs(p.exchange_tunneling())), delta(p.delta) {}

  double operator()(double nd, double lh) const {
    double e = delta * nd;
    if (lh < 1.0) {
      const double nl = std::clamp(1.0 - (1.0 - n + nd) / (1.0 - lh), 0.0, 1.0);
      e -= (2.0 / kPi) * (1.0 - lh) * t * std::sin(kPi * nl);
    }
    if (lh > 0.0) {
      const double m = std::clamp(1.0 - nd / lh, 0.0, 1.0);
      e -= (2.0 / kPi) * lh * tau * std::sin(kPi * m);
    }
    return e;
  }
};

struct GridBest {
  double energy = 0.0;
  double nd = 0.0;
  double lh = 0.0;
};

// Exhaustive scan of the feasible polytope with n_d restricted to
// [nd_lo, nd_hi]. Two passes: locate the minimum, then keep the last scan
// point (ascending n_d, then l_h — i.e. the lexicographically largest) whose
// energy ties the minimum within tie_tol. Rows are evaluated with Eigen's
// vectorized sine and buffered, so the tie pass rereads stored energies
// instead of recomputing them; the vector and scalar evaluation paths agree
// to within an ulp, far inside tie_tol.
inline GridBest coarse_grid_minimum(const EnergyEval& eval, double nd_lo, double nd_hi,
                                    int points, double tie_tol) {
  const int np = std::max(points, 2);
  const double nd_span = nd_hi - nd_lo;
  const int nd_steps = nd_span > 0.0 ? np : 1;

  Eigen::ArrayXd row(np);
  std::vector<double> energies;
  energies.reserve(static_cast<std::size_t>(nd_steps) * np);
  std::vector<int> row_len(nd_steps, 0);

  double emin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < nd_steps; ++i) {
    const double nd =
        (i == nd_steps - 1) ? nd_hi : nd_lo + nd_span * static_cast<double>(i) / (np - 1);
    const double lh_lo = nd;
    const double lh_hi = std::min(1.0, eval.n - nd);
    if (lh_hi < lh_lo) continue;
    const double lh_span = lh_hi - lh_lo;
    const int lh_steps = lh_span > 0.0 ? np : 1;
    row_len[i] = lh_steps;
    for (int j = 0; j < lh_steps; ++j)
      row[j] =
          (j == lh_steps - 1) ? lh_hi : lh_lo + lh_span * static_cast<double>(j) / (np - 1);
    auto lh = row.head(lh_steps);
    Eigen::ArrayXd e = Eigen::ArrayXd::Constant(lh_steps, eval.delta * nd);
    {
      const Eigen::ArrayXd nl =
          (1.0 - (1.0 - eval.n + nd) / (1.0 - lh)).max(0.0).min(1.0);
      e -= (lh < 1.0).select((2.0 / kPi) * (1.0 - lh) * eval.t * (kPi * nl).sin(), 0.0);
      const Eigen::ArrayXd m = (1.0 - nd / lh).max(0.0).min(1.0);
      e -= (lh > 0.0).select((2.0 / kPi) * lh * eval.tau * (kPi * m).sin(), 0.0);
    }
    for (int j = 0; j < lh_steps; ++j) {
      if (e[j] < emin) emin = e[j];
      energies.push_back(e[j]);
    }
  }

  GridBest best{std::numeric_limits<double>::infinity(), nd_lo, nd_lo};
  std::size_t cursor = 0;
  for (int i = 0; i < nd_steps; ++i) {
    if (row_len[i] == 0) continue;
    const double nd =
        (i == nd_steps - 1) ? nd_hi : nd_lo + nd_span * static_cast<double>(i) / (np - 1);
    const double lh_lo = nd;
    const double lh_hi = std::min(1.0, eval.n - nd);
    const double lh_span = lh_hi - lh_lo;
    const int lh_steps = row_len[i];
    for (int j = 0; j < lh_steps; ++j) {
      const double lh =
          (j == lh_steps - 1) ? lh_hi : lh_lo + lh_span * static_cast<double>(j) / (np - 1);
      const double e = energies[cursor++];
      if (e <= emin + tie_tol) best = {e, nd, lh};
    }
  }
  return best;
}

// Eight-direction pattern search with moves clamped into the polytope.
// Strict descent shrinks the step; within tie_tol the walk drifts toward
// larger n_d, then larger l_h, so plateau edges resolve deterministically.
// Drift moves carry a separate budget: each one may raise the energy by up
// to tie_tol, so an uncapped walk would ratchet sideways near any smooth
// minimum until the overall iteration budget ran out. The coarse grid
// already hands over the lexicographically largest tie point, so genuine
// plateau traversals need well under the allowance.
inline GridBest pattern_refine(const EnergyEval& eval, GridBest start, double nd_lo, double nd_hi,
                               const SolverOptions& opt) {
  static constexpr int dx[] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int dy[] = {0, 0, 1, -1, 1, -1, 1, -1};
  const auto lex_greater = [](const GridBest& a, const GridBest& b) {
    return a.nd > b.nd || (a.nd == b.nd && a.lh > b.lh);
  };
  GridBest cur = start;
  double h = 1.0 / std::max(opt.grid_points - 1, 1);
  long budget = 200000;
  long drift_budget = 3000;
  while (h >= opt.refine_step && budget-- > 0) {
    GridBest best = cur;
    bool via_tie = false;
    for (int d = 0; d < 8; ++d) {
      const double nd = std::clamp(cur.nd + dx[d] * h, nd_lo, nd_hi);
      const double lh = std::clamp(cur.lh + dy[d] * h, nd, std::min(1.0, eval.n - nd));
      if (nd == cur.nd && lh == cur.lh) continue;
      const GridBest cand{eval(nd, lh), nd, lh};
      if (cand.energy < best.energy - opt.tie_tol) {
        best = cand;
        via_tie = false;
      } else if (drift_budget > 0 && cand.energy <= best.energy + opt.tie_tol &&
                 lex_greater(cand, best)) {
        best = cand;
        via_tie = true;
      }
    }
    if (best.nd == cur.nd && best.lh == cur.lh) {
      h *= 0.5;
    } else {
      cur = best;
      if (via_tie) --drift_budget;
    }
  }
  return cur;
}

struct UnconstrainedOptimum {
  GridBest best;
  double nd_lo = 0.0;
  double nd_hi = 0.0;  // structural bound min(n/2, 1)
};

// The imbalance-free minimization; p enters the problem only through the
// pair-number cap, so this part is shared by every p at fixed (n, delta).
inline UnconstrainedOptimum solve_unconstrained(double filling, const ModelParams& params,
                                                const SolverOptions& opt) {
  const EnergyEval eval(filling, params);
  const double nd_lo = std::max(0.0, filling - 1.0);
  const double nd_hi = std::min(filling / 2.0, 1.0);
  GridBest best = coarse_grid_minimum(eval, nd_lo, nd_hi, opt.grid_points, opt.tie_tol);
  best = pattern_refine(eval, best, nd_lo, nd_hi, opt);
  return {best, nd_lo, nd_hi};
}

// Applies the pair-number cap to a shared unconstrained optimum and packages
// the result. Re-solves over the truncated polytope only when the cap binds.
inline ExactSolution finish_solution(double n, double p, const ModelParams& params,
                                     const SolverOptions& opt, const UnconstrainedOptimum& unc) {
  const double cap = n * (1.0 - p) / 2.0;
  if (cap < unc.nd_lo - 1e-12) {
    std::ostringstream msg;
    msg << "no feasible two-fluid state at n=" << n << ", p=" << p
        << ": too few minority atoms for the doublons forced by n > 1";
    throw InfeasiblePoint(msg.str());
  }
  const double nd_bar = unc.best.nd;
  const double p_c = n > 0.0 ? std::clamp(1.0 - 2.0 * nd_bar / n, 0.0, 1.0) : 1.0;

  GridBest best = unc.best;
  bool active = false;
  if (cap < nd_bar - opt.tie_tol) {
    const EnergyEval eval(n, params);
    const double hi = std::min(cap, unc.nd_hi);
    best = coarse_grid_minimum(eval, unc.nd_lo, hi, opt.grid_points, opt.tie_tol);
    best = pattern_refine(eval, best, unc.nd_lo, hi, opt);
    active = true;
  }

  ExactSolution sol;
  sol.point = {best.nd, best.lh};
  sol.energy = two_fluid_energy(n, params, sol.point);
  const PhaseDensities d = densities(n, sol.point);
  sol.low_density = d.low;
  sol.high_density = d.high;
  sol.critical_polarization = p_c;
  sol.constraint_active = active;
  sol.label = classify_phase(n, p, sol);
  return sol;
}

inline void require_integrable(const ModelParams& params) {
  params.validate();
  if (!params.integrable()) {
    std::ostringstream msg;
    msg << "closed-form solver needs the integrable point delta_g = -t (got delta_g="
        << params.delta_g << ", t=" << params.t << "); use the diagonalization engine instead";
    throw IntegrablePointRequired(msg.str());
  }
}

}  // namespace detail

// Global minimum of the two-fluid energy over the feasibility polytope,
// including the pair-number cap n_d <= n (1 - p) / 2. Grid-then-refine, fully
// deterministic; ties resolve toward larger n_d, then larger l_h.
inline ExactSolution minimize_ground_state(double filling, double imbalance,
                                           const ModelParams& params,
                                           const SolverOptions& opt = {}) {
  detail::require_integrable(params);
  const FillingSpec spec(filling, imbalance);
  const auto unc = detail::solve_unconstrained(spec.filling, params, opt);
  return detail::finish_solution(spec.filling, spec.imbalance, params, opt, unc);
}

// p_c = 1 - 2 nbar_d / n with nbar_d the imbalance-free optimal pair density.
inline double critical_polarization(double filling, const ModelParams& params,
                                    const SolverOptions& opt = {}) {
  return minimize_ground_state(filling, 0.0, params, opt).critical_polarization;
}

// Pair density along an imbalance sweep: constant at nbar_d up to p_c, then
// the depletion line n (1 - p) / 2.
inline double optimal_pair_density(double filling, double imbalance, const ModelParams& params,
                                   const SolverOptions& opt = {}) {
  return minimize_ground_state(filling, imbalance, params, opt).point.pair_density;
}

// Ordered rules, equalities tested at tol. The solution must come from
// minimize_ground_state for the same (n, p).
inline PhaseLabel classify_phase(double filling, double imbalance, const ExactSolution& sol,
                                 double tol) {
  const double n = filling, p = std::abs(imbalance);
  const double nd = sol.point.pair_density, lh = sol.point.core_fraction;
  const double cap = n * (1.0 - p) / 2.0;
  const bool unit_filling = std::abs(n - 1.0) <= tol;
  const bool low_fully_polarized = nd >= cap - tol;  // every minority atom is paired

  if (lh <= tol) {  // no dense core
    if (unit_filling) return PhaseLabel::insulator;
    if (n < 1.0) return PhaseLabel::np;
  } else if (!sol.low_density.has_value() || lh >= 1.0 - tol) {  // core fills the chain
    if (unit_filling) return PhaseLabel::insulator;
    if (n > 1.0) return PhaseLabel::sfp_uniform;
  } else if (std::abs(nd - lh) <= tol) {  // fully paired core
    if (*sol.low_density <= tol && p <= tol) return PhaseLabel::sf0;
    if (low_fully_polarized) return PhaseLabel::sf0_nfp;
    if (p < sol.critical_polarization) return PhaseLabel::sf0_np;
  } else {  // core carries unpaired majority atoms
    if (sol.constraint_active || low_fully_polarized) return PhaseLabel::sfp_nfp;
    return PhaseLabel::sfp_np;
  }
  std::ostringstream msg;
  msg << "no phase rule fires at n=" << n << ", p=" << p << " for (n_d=" << nd
      << ", l_h=" << lh << ")";
  throw UnclassifiablePoint(msg.str());
}

struct PhaseDiagramGrid {
  std::vector<double> detuning_axis;   // on-site energies, ascending
  std::vector<double> imbalance_axis;  // polarizations, ascending
  std::vector<ExactSolution> cells;    // detuning-major order

  const ExactSolution& cell(std::size_t id, std::size_t ip) const {
    return cells[id * imbalance_axis.size() + ip];
  }
};

// Maps the solver over a delta x p rectangle. Cells in a column share the
// imbalance-free optimum, and results are written by cell index, so the
// output does not depend on the number of worker threads.
inline PhaseDiagramGrid scan_phase_diagram(double filling, const ModelParams& base,
                                           double delta_min, double delta_max, int delta_steps,
                                           double p_min, double p_max, int p_steps,
                                           const SolverOptions& opt = {}, int jobs = 1) {
  detail::require_integrable(base);
  if (delta_steps < 2 || p_steps < 2)
    throw std::invalid_argument("scan_phase_diagram: need at least 2 steps per axis");
  if (!(delta_min <= delta_max) || !(p_min <= p_max))
    throw std::invalid_argument("scan_phase_diagram: ranges must be ordered");
  const FillingSpec spec(filling, 0.0);
  if (p_min < 0.0 || p_max > 1.0)
    throw std::invalid_argument("scan_phase_diagram: polarization axis must lie in [0, 1]");

  PhaseDiagramGrid grid;
  grid.detuning_axis.resize(delta_steps);
  for (int i = 0; i < delta_steps; ++i)
    grid.detuning_axis[i] =
        (i == delta_steps - 1)
            ? delta_max
            : delta_min + (delta_max - delta_min) * static_cast<double>(i) / (delta_steps - 1);
  grid.imbalance_axis.resize(p_steps);
  for (int j = 0; j < p_steps; ++j)
    grid.imbalance_axis[j] =
        (j == p_steps - 1) ? p_max
                           : p_min + (p_max - p_min) * static_cast<double>(j) / (p_steps - 1);
  grid.cells.resize(static_cast<std::size_t>(delta_steps) * p_steps);

  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::atomic<int> next_column{0};
  const auto record_error = [&](double delta, double p, const std::exception& e) {
    std::ostringstream msg;
    msg << "phase-diagram scan aborted at cell (delta=" << delta << ", p=" << p
        << "): " << e.what();
    std::scoped_lock lock(error_mutex);
    if (first_error) return;
    if (const auto* fe = dynamic_cast<const Error*>(&e))
      first_error = std::make_exception_ptr(Error(fe->code(), msg.str()));
    else
      first_error = std::make_exception_ptr(std::runtime_error(msg.str()));
  };
  auto worker = [&]() {
    for (;;) {
      const int i = next_column.fetch_add(1);
      if (i >= delta_steps) return;
      ModelParams params = base;
      params.delta = grid.detuning_axis[i];
      std::optional<detail::UnconstrainedOptimum> unc;  // shared down the column
      for (int j = 0; j < p_steps; ++j) {
        try {
          if (!unc) unc = detail::solve_unconstrained(spec.filling, params, opt);
          grid.cells[static_cast<std::size_t>(i) * p_steps + j] =
              detail::finish_solution(spec.filling, grid.imbalance_axis[j], params, opt, *unc);
        } catch (const std::exception& e) {
          record_error(grid.detuning_axis[i], grid.imbalance_axis[j], e);
          return;
        }
      }
    }
  };

  const int njobs = std::clamp(jobs, 1, delta_steps);
  if (njobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(njobs);
    for (int w = 0; w < njobs; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return grid;
}

}  // namespace flp
