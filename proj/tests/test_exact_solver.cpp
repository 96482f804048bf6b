// Copyright 2026 The flp Authors
// SPDX-License-Identifier: Apache-2.0

#include "flp/exact_solver.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"

using flp::ExactSolution;
using flp::minimize_ground_state;
using flp::ModelParams;
using flp::PhaseLabel;
using flp::SolverOptions;

namespace {
const ModelParams kTau06{1.0, -1.0, 0.4, 0.0};

ModelParams with_delta(double delta) {
  ModelParams m = kTau06;
  m.delta = delta;
  return m;
}
}  // namespace

TEST(PhaseLabelNames, PinnedStringsRoundTrip) {
  using flp::label_name;
  using flp::parse_label;
  EXPECT_EQ(label_name(PhaseLabel::sf0), "SF0");
  EXPECT_EQ(label_name(PhaseLabel::sf0_nfp), "SF0+NFP");
  EXPECT_EQ(label_name(PhaseLabel::sf0_np), "SF0+NP");
  EXPECT_EQ(label_name(PhaseLabel::sfp_np), "SFP+NP");
  EXPECT_EQ(label_name(PhaseLabel::sfp_nfp), "SFP+NFP");
  EXPECT_EQ(label_name(PhaseLabel::np), "NP");
  EXPECT_EQ(label_name(PhaseLabel::sfp_uniform), "SFP");
  EXPECT_EQ(label_name(PhaseLabel::insulator), "INS");
  for (PhaseLabel l : {PhaseLabel::sf0, PhaseLabel::sf0_nfp, PhaseLabel::sf0_np,
                       PhaseLabel::sfp_np, PhaseLabel::sfp_nfp, PhaseLabel::np,
                       PhaseLabel::sfp_uniform, PhaseLabel::insulator})
    EXPECT_EQ(parse_label(label_name(l)), l);
  EXPECT_FALSE(parse_label("bogus"));
}

TEST(MinimizeGroundState, DeepAttractionFullyPairs) {
  const auto sol = minimize_ground_state(1.0, 0.0, with_delta(-10.0));
  EXPECT_DOUBLE_EQ(sol.point.pair_density, 0.5);
  EXPECT_DOUBLE_EQ(sol.point.core_fraction, 0.5);
  EXPECT_DOUBLE_EQ(sol.energy, -5.0);
  EXPECT_EQ(sol.label, PhaseLabel::sf0);
  EXPECT_FALSE(sol.constraint_active);
}

TEST(MinimizeGroundState, FullPolarizationEmptiesPairs) {
  const auto sol = minimize_ground_state(0.5, 1.0, kTau06);
  EXPECT_DOUBLE_EQ(sol.point.pair_density, 0.0);
  EXPECT_DOUBLE_EQ(sol.point.core_fraction, 0.0);
  EXPECT_NEAR(sol.energy, -2.0 / flp::kPi, 1e-12);
  EXPECT_EQ(sol.label, PhaseLabel::np);
}

TEST(MinimizeGroundState, StrongRepulsionAtUnitFillingIsInsulating) {
  // The nd = 0 valley is flat; the tie-break drifts to the core-filled corner.
  const auto sol = minimize_ground_state(1.0, 0.0, with_delta(10.0));
  EXPECT_DOUBLE_EQ(sol.point.pair_density, 0.0);
  EXPECT_DOUBLE_EQ(sol.point.core_fraction, 1.0);
  EXPECT_NEAR(sol.energy, 0.0, 1e-12);
  EXPECT_EQ(sol.label, PhaseLabel::insulator);
}

TEST(MinimizeGroundState, SolutionsPlateauBelowCriticalPolarization) {
  const auto base = minimize_ground_state(0.9, 0.0, kTau06);
  const double pc = base.critical_polarization;
  ASSERT_GT(pc, 0.0);
  ASSERT_LT(pc, 1.0);
  for (double frac : {0.25, 0.6, 0.95}) {
    const auto sol = minimize_ground_state(0.9, frac * pc, kTau06);
    EXPECT_EQ(sol.energy, base.energy);  // bitwise: the shared optimum is reused
    EXPECT_EQ(sol.point.pair_density, base.point.pair_density);
    EXPECT_EQ(sol.point.core_fraction, base.point.core_fraction);
    EXPECT_FALSE(sol.constraint_active);
  }
}

TEST(MinimizeGroundState, CapPinsPairDensityAboveCriticalPolarization) {
  const auto base = minimize_ground_state(0.9, 0.0, kTau06);
  const double pc = base.critical_polarization;
  const double p = std::min(1.0, 1.2 * pc + 0.05);
  const auto sol = minimize_ground_state(0.9, p, kTau06);
  EXPECT_TRUE(sol.constraint_active);
  EXPECT_DOUBLE_EQ(sol.point.pair_density, 0.9 * (1.0 - p) / 2.0);
  EXPECT_LT(sol.point.pair_density, base.point.pair_density);
  EXPECT_GT(sol.energy, base.energy);
  EXPECT_TRUE(sol.label == PhaseLabel::sfp_nfp || sol.label == PhaseLabel::sf0_nfp);
}

TEST(MinimizeGroundState, CriticalPolarizationTracksPairDensity) {
  const auto sol = minimize_ground_state(1.0, 0.0, kTau06);
  EXPECT_NEAR(sol.critical_polarization, 1.0 - 2.0 * sol.point.pair_density, 1e-12);
  const auto coarse = oracles::grid_minimum(1.0, 0.0, kTau06, 1500);
  EXPECT_NEAR(sol.critical_polarization, 1.0 - 2.0 * coarse.nd, 2e-3);
}

TEST(MinimizeGroundState, CriticalPolarizationGrowsWithDetuning) {
  SolverOptions opt;
  opt.grid_points = 256;
  double prev = -1.0;
  for (double delta : {-3.0, -1.0, 0.0, 1.0, 2.0, 3.0}) {
    const double pc = flp::critical_polarization(0.9, with_delta(delta), opt);
    EXPECT_GE(pc, prev - 1e-9) << "p_c dropped at delta=" << delta;
    prev = pc;
  }
}

TEST(MinimizeGroundState, NeverWorseThanIndependentGridScan) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const double n = 0.2 + 1.6 * u(rng);
    const double p = u(rng);
    ModelParams m{1.0, -1.0, -1.0 + 2.0 * u(rng), -6.0 + 9.0 * u(rng)};
    const auto coarse = oracles::grid_minimum(n, p, m, 600);
    if (coarse.energy > 1e200) {  // polytope empty at this polarization
      EXPECT_THROW(minimize_ground_state(n, p, m), flp::InfeasiblePoint);
      continue;
    }
    const auto sol = minimize_ground_state(n, p, m);
    EXPECT_LE(sol.energy, coarse.energy + 1e-9);
    const long double replay = oracles::energy_extended(n, m, sol.point.pair_density,
                                                        sol.point.core_fraction);
    EXPECT_NEAR(sol.energy, static_cast<double>(replay), 1e-12);
    ++checked;
  }
  EXPECT_GE(checked, 5);
}

TEST(MinimizeGroundState, RejectsNonIntegrableCouplings) {
  ModelParams m{1.0, -0.8, 0.4, 0.0};
  EXPECT_THROW(minimize_ground_state(1.0, 0.0, m), flp::IntegrablePointRequired);
}

TEST(MinimizeGroundState, ThrowsWhenPolarizationStarvesRequiredPairs) {
  // n > 1 forces n_d >= n - 1, but strong polarization caps n_d below that.
  EXPECT_THROW(minimize_ground_state(1.5, 0.9, kTau06), flp::InfeasiblePoint);
}

TEST(ClassifyPhase, OrderedRulesOnHandBuiltSolutions) {
  ExactSolution sol;
  sol.point = {0.2, 0.2};
  sol.low_density = 0.1;
  sol.high_density = 2.0;
  sol.critical_polarization = 0.6;
  EXPECT_EQ(flp::classify_phase(0.9, 0.0, sol), PhaseLabel::sf0_np);

  sol.point = {0.1, 0.3};
  sol.constraint_active = true;
  EXPECT_EQ(flp::classify_phase(0.9, 0.7, sol), PhaseLabel::sfp_nfp);
  sol.constraint_active = false;
  EXPECT_EQ(flp::classify_phase(0.9, 0.2, sol), PhaseLabel::sfp_np);

  sol.point = {0.0, 0.0};
  sol.low_density = 0.9;
  EXPECT_EQ(flp::classify_phase(0.9, 0.0, sol), PhaseLabel::np);
  EXPECT_EQ(flp::classify_phase(1.0, 0.0, sol), PhaseLabel::insulator);

  sol.point = {0.2, 1.0};
  sol.low_density.reset();
  sol.high_density = 1.2;
  EXPECT_EQ(flp::classify_phase(1.2, 0.0, sol), PhaseLabel::sfp_uniform);
}

TEST(ClassifyPhase, ReportsPointsNoRuleCovers) {
  ExactSolution sol;
  sol.point = {0.2, 0.2};
  sol.low_density = 0.5;
  sol.high_density = 2.0;
  sol.critical_polarization = 0.1;
  EXPECT_THROW(flp::classify_phase(0.9, 0.5, sol), flp::UnclassifiablePoint);
}

TEST(ScanPhaseDiagram, AxesHitRequestedEndpoints) {
  SolverOptions opt;
  opt.grid_points = 96;
  const auto grid = flp::scan_phase_diagram(0.9, kTau06, -2.0, 3.0, 7, 0.0, 1.0, 5, opt);
  ASSERT_EQ(grid.detuning_axis.size(), 7u);
  ASSERT_EQ(grid.imbalance_axis.size(), 5u);
  EXPECT_DOUBLE_EQ(grid.detuning_axis.front(), -2.0);
  EXPECT_DOUBLE_EQ(grid.detuning_axis.back(), 3.0);
  EXPECT_DOUBLE_EQ(grid.imbalance_axis.front(), 0.0);
  EXPECT_DOUBLE_EQ(grid.imbalance_axis.back(), 1.0);
  ASSERT_EQ(grid.cells.size(), 35u);
  for (std::size_t id = 0; id < 7; ++id) {
    const double pc = grid.cell(id, 0).critical_polarization;
    for (std::size_t ip = 1; ip < 5; ++ip)
      EXPECT_DOUBLE_EQ(grid.cell(id, ip).critical_polarization, pc)
          << "p_c must not depend on the polarization row";
  }
}

TEST(ScanPhaseDiagram, ResultIndependentOfWorkerCount) {
  SolverOptions opt;
  opt.grid_points = 96;
  const auto serial = flp::scan_phase_diagram(0.9, kTau06, -2.0, 3.0, 7, 0.0, 1.0, 5, opt, 1);
  const auto pooled = flp::scan_phase_diagram(0.9, kTau06, -2.0, 3.0, 7, 0.0, 1.0, 5, opt, 3);
  ASSERT_EQ(serial.cells.size(), pooled.cells.size());
  for (std::size_t k = 0; k < serial.cells.size(); ++k) {
    EXPECT_EQ(serial.cells[k].energy, pooled.cells[k].energy);
    EXPECT_EQ(serial.cells[k].point.pair_density, pooled.cells[k].point.pair_density);
    EXPECT_EQ(serial.cells[k].point.core_fraction, pooled.cells[k].point.core_fraction);
    EXPECT_EQ(serial.cells[k].label, pooled.cells[k].label);
  }
}

TEST(ScanPhaseDiagram, ValidatesAxesAndCouplings) {
  EXPECT_THROW(flp::scan_phase_diagram(0.9, kTau06, -2.0, 3.0, 1, 0.0, 1.0, 5),
               std::invalid_argument);
  EXPECT_THROW(flp::scan_phase_diagram(0.9, kTau06, 3.0, -2.0, 7, 0.0, 1.0, 5),
               std::invalid_argument);
  EXPECT_THROW(flp::scan_phase_diagram(0.9, kTau06, -2.0, 3.0, 7, -0.2, 1.0, 5),
               std::invalid_argument);
  ModelParams m{1.0, -0.8, 0.4, 0.0};
  EXPECT_THROW(flp::scan_phase_diagram(0.9, m, -2.0, 3.0, 7, 0.0, 1.0, 5),
               flp::IntegrablePointRequired);
}
