// Copyright 2026 The flp Authors
// SPDX-License-Identifier: Apache-2.0

#include "flp/variational.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using flp::densities;
using flp::feasible;
using flp::ModelParams;
using flp::stationary_pair_density;
using flp::two_fluid_energy;
using flp::VariationalPoint;

namespace {
const ModelParams kTau06{1.0, -1.0, 0.4, 0.0};  // |t_ad| = 0.6, delta = 0
}

TEST(Feasibility, PolytopeEdges) {
  EXPECT_TRUE(feasible(0.9, {0.2, 0.4}));
  EXPECT_TRUE(feasible(0.9, {0.45, 0.45}));     // fully paired corner
  EXPECT_TRUE(feasible(1.0, {0.0, 1.0}));       // uniform unit-density core
  EXPECT_FALSE(feasible(0.9, {0.5, 0.4}));      // n_d > l_h
  EXPECT_FALSE(feasible(0.9, {0.3, 0.7}));      // l_h > n - n_d
  EXPECT_FALSE(feasible(1.2, {0.1, 0.5}));      // n_d < n - 1
  EXPECT_FALSE(feasible(0.9, {-0.01, 0.1}));
  EXPECT_TRUE(feasible(1.0, 0.5, {0.25, 0.5}));   // at the pair cap
  EXPECT_FALSE(feasible(1.0, 0.5, {0.30, 0.5}));  // beyond it
}

TEST(Densities, KnownPoints) {
  {
    const auto d = densities(0.9, {0.45, 0.45});
    ASSERT_TRUE(d.low && d.high);
    EXPECT_NEAR(*d.low, 0.0, 1e-15);
    EXPECT_NEAR(*d.high, 2.0, 1e-15);
  }
  {
    const auto d = densities(1.0, {0.0, 0.0});
    ASSERT_TRUE(d.low);
    EXPECT_FALSE(d.high);
    EXPECT_DOUBLE_EQ(*d.low, 1.0);
  }
  {
    const auto d = densities(1.5, {0.5, 1.0});
    EXPECT_FALSE(d.low);
    ASSERT_TRUE(d.high);
    EXPECT_DOUBLE_EQ(*d.high, 1.5);
  }
}

TEST(Densities, RejectsInfeasiblePoints) {
  EXPECT_THROW(densities(0.9, {0.5, 0.4}), flp::InfeasiblePoint);
  EXPECT_THROW(two_fluid_energy(0.9, kTau06, {0.3, 0.7}), flp::InfeasiblePoint);
}

// Atom counting: (1 - l_h) n_l + l_h n_h = n identically.
TEST(Densities, ConservesAtoms) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double n = 0.05 + 1.9 * u(rng);
    const double nd_lo = std::max(0.0, n - 1.0);
    const double nd = nd_lo + (std::min(n / 2.0, 1.0) - nd_lo) * u(rng);
    const double lh = nd + (std::min(1.0, n - nd) - nd) * u(rng);
    const auto d = densities(n, {nd, lh});
    if (!d.low || !d.high) continue;
    EXPECT_NEAR((1.0 - lh) * *d.low + lh * *d.high, n, 1e-12);
    EXPECT_GE(*d.low, 0.0);
    EXPECT_LE(*d.low, 1.0);
    EXPECT_GE(*d.high, 1.0);
    EXPECT_LE(*d.high, 2.0);
  }
}

TEST(TwoFluidEnergy, PureLowBand) {
  // No pairs, no core: a single free band at density n.
  ModelParams m = kTau06;
  m.delta = 3.7;  // must not matter at n_d = 0
  EXPECT_NEAR(two_fluid_energy(0.5, m, {0.0, 0.0}), -2.0 / flp::kPi, 1e-15);
}

TEST(TwoFluidEnergy, FullyPairedCorner) {
  // Both regions at band edges: only the doublon cost survives.
  ModelParams m = kTau06;
  m.delta = -3.0;
  EXPECT_NEAR(two_fluid_energy(1.0, m, {0.5, 0.5}), -1.5, 1e-15);
}

TEST(TwoFluidEnergy, MatchesExtendedPrecision) {
  const double e = two_fluid_energy(0.9, kTau06, {0.2, 0.4});
  const long double ref = oracles::energy_extended(0.9L, kTau06, 0.2L, 0.4L);
  EXPECT_NEAR(e, static_cast<double>(ref), 1e-14);
  EXPECT_NEAR(e, -0.53476060878876832818, 1e-14);
}

TEST(TwoFluidEnergy, ContinuousAtDegenerateLimits) {
  const double at_zero = two_fluid_energy(0.8, kTau06, {0.0, 0.0});
  const double near_zero = two_fluid_energy(0.8, kTau06, {0.0, 1e-9});
  EXPECT_NEAR(at_zero, near_zero, 1e-8);
  const double at_one = two_fluid_energy(1.2, kTau06, {0.2, 1.0});
  const double near_one = two_fluid_energy(1.2, kTau06, {0.2, 1.0 - 1e-9});
  EXPECT_NEAR(at_one, near_one, 1e-8);
}

TEST(StationaryPairDensity, ClosedFormAtZeroDetuning) {
  // x = 0 at n_l = 1/2, delta = 0: n_d = l_h / 2 exactly.
  const auto nd = stationary_pair_density(0.5, 0.4, kTau06);
  ASSERT_TRUE(nd);
  EXPECT_NEAR(*nd, 0.2, 1e-15);
}

TEST(StationaryPairDensity, NoInteriorSolutionWhenArgumentLeavesDomain) {
  ModelParams m = kTau06;
  m.delta = -10.0;
  EXPECT_FALSE(stationary_pair_density(0.5, 0.4, m));
}

TEST(StationaryPairDensity, ArccosEdgeGivesZero) {
  ModelParams m = kTau06;
  m.delta = -2.0 * std::cos(flp::kPi * 0.25) + 2.0 * 0.6;
  const auto nd = stationary_pair_density(0.25, 0.5, m);
  ASSERT_TRUE(nd);
  EXPECT_NEAR(*nd, 0.0, 1e-7);
}

TEST(StationaryPairDensity, DegenerateCoreBandAbsent) {
  const ModelParams no_exchange{1.0, -1.0, 1.0, 0.0};  // t_ad = 0
  EXPECT_FALSE(stationary_pair_density(0.5, 0.4, no_exchange));
}

TEST(StationaryPairDensity, RequiresInteriorCoreFraction) {
  EXPECT_THROW(stationary_pair_density(0.5, 0.0, kTau06), std::invalid_argument);
  EXPECT_THROW(stationary_pair_density(0.5, 1.0, kTau06), std::invalid_argument);
}
