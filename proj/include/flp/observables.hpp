// Copyright 2026 The flp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <vector>

#include "flp/basis.hpp"
#include "flp/lanczos.hpp"
#include "flp/variational.hpp"  // kPi

namespace flp {

// Doubly occupied sites per site: (1/L) sum_i <n_i_up n_i_dn>.
inline double pair_density(const SectorBasis& basis, const Eigen::VectorXd& state) {
  if (static_cast<std::uint64_t>(state.size()) != basis.dimension())
    throw BasisMismatch("pair_density: state length does not match sector dimension");
  const auto& up = basis.up_masks();
  const auto& dn = basis.dn_masks();
  double acc = 0.0;
  std::size_t idx = 0;
  for (const std::uint32_t u : up)
    for (const std::uint32_t d : dn) {
      const double w = state[static_cast<Eigen::Index>(idx++)];
      acc += w * w * std::popcount(u & d);
    }
  return acc / (basis.sector().sites * state.squaredNorm());
}

// Connected density-density correlator C(r) = <n_j n_{j+r}> - <n_j><n_{j+r}>
// measured from a fixed anchor site (default: mid-chain, j = L/2), with
// n_i = n_i_up + n_i_dn and r = 0..L-1 around the ring.
inline std::vector<double> density_correlations(const SectorBasis& basis,
                                                const Eigen::VectorXd& state,
                                                std::optional<int> anchor = {}) {
  if (static_cast<std::uint64_t>(state.size()) != basis.dimension())
    throw BasisMismatch("density_correlations: state length does not match sector dimension");
  const int L = basis.sector().sites;
  const int j0 = anchor.value_or(L / 2);
  if (j0 < 0 || j0 >= L)
    throw std::invalid_argument("density_correlations: anchor site outside the chain");

  const auto& up = basis.up_masks();
  const auto& dn = basis.dn_masks();
  const double norm2 = state.squaredNorm();
  std::vector<double> mean(L, 0.0), pair_mean(L, 0.0);
  std::size_t idx = 0;
  for (const std::uint32_t u : up)
    for (const std::uint32_t d : dn) {
      const double w = state[static_cast<Eigen::Index>(idx++)];
      const double w2 = w * w;
      const std::uint32_t both = u | d, dbl = u & d;
      const double occ_anchor = ((both >> j0) & 1u) + ((dbl >> j0) & 1u);
      if (w2 == 0.0) continue;
      for (int i = 0; i < L; ++i) {
        const double occ = ((both >> i) & 1u) + ((dbl >> i) & 1u);
        mean[i] += w2 * occ;
        pair_mean[i] += w2 * occ_anchor * occ;
      }
    }
  std::vector<double> c(L);
  for (int r = 0; r < L; ++r) {
    const int i = (j0 + r) % L;
    c[r] = pair_mean[i] / norm2 - (mean[j0] / norm2) * (mean[i] / norm2);
  }
  return c;
}

// N(q_k) = sum_r e^{i q_k r} C(r) at q_k = 2 pi k / L, k = 0..L-1. The input
// correlator must be real-symmetric around the ring; a surviving imaginary
// part above 1e-10 is rejected rather than silently dropped.
inline std::vector<double> structure_factor(const std::vector<double>& correlations) {
  const int L = static_cast<int>(correlations.size());
  if (L < 2) throw std::invalid_argument("structure_factor: need at least two sites");
  std::vector<double> nq(L);
  double worst = 0.0;
  for (int k = 0; k < L; ++k) {
    double re = 0.0, im = 0.0;
    for (int r = 0; r < L; ++r) {
      const double q = 2.0 * kPi * k * r / L;
      re += std::cos(q) * correlations[r];
      im += std::sin(q) * correlations[r];
    }
    nq[k] = re;
    worst = std::max(worst, std::abs(im));
  }
  if (worst > 1e-10) {
    std::ostringstream msg;
    msg << "structure factor kept an imaginary part of " << worst
        << "; the correlator is not reflection symmetric";
    throw ImaginaryResidue(msg.str());
  }
  return nq;
}

// Position of the dominant peak over the physical half of the Brillouin
// zone, k = 1..L/2; ties resolve to the smaller momentum.
inline double peak_momentum(const std::vector<double>& nq) {
  const int L = static_cast<int>(nq.size());
  if (L < 2) throw std::invalid_argument("peak_momentum: need at least two momenta");
  int kbest = 1;
  for (int k = 2; k <= L / 2; ++k)
    if (nq[k] > nq[kbest]) kbest = k;
  return 2.0 * kPi * kbest / L;
}

struct ObservableSet {
  double pair_density = 0.0;
  int anchor = 0;
  std::vector<double> correlations;
  std::vector<double> structure_factor;
  double peak_q = 0.0;
};

inline ObservableSet measure_observables(const SectorBasis& basis, const Eigen::VectorXd& state,
                                         std::optional<int> anchor = {}) {
  ObservableSet set;
  set.pair_density = flp::pair_density(basis, state);
  set.anchor = anchor.value_or(basis.sector().sites / 2);
  set.correlations = density_correlations(basis, state, set.anchor);
  set.structure_factor = flp::structure_factor(set.correlations);
  set.peak_q = peak_momentum(set.structure_factor);
  return set;
}

struct ChargeGap {
  double gap = 0.0;
  double energy_minus = 0.0;  // ground energy with N-1 atoms
  double energy_0 = 0.0;      // with N atoms
  double energy_plus = 0.0;   // with N+1 atoms
};

// Particle addition/removal gap E0(N+1) + E0(N-1) - 2 E0(N) at zero
// polarization; odd atom numbers split with the extra atom spin-up.
inline ChargeGap charge_gap(const ModelParams& params, int sites, int atoms,
                            const LanczosOptions& opt = {},
                            std::uint64_t max_dimension = SectorBasis::default_max_dimension) {
  if (atoms < 1 || atoms + 1 > 2 * sites)
    throw std::invalid_argument("charge_gap: need 1 <= N and N+1 <= 2L");
  const auto ground = [&](int n_atoms) {
    const Sector s{sites, (n_atoms + 1) / 2, n_atoms / 2};
    const SectorBasis b(s, max_dimension);
    const HamiltonianOperator h(b, params);
    return ground_state_lanczos(h, opt).first.ground_energy;
  };
  ChargeGap g;
  g.energy_minus = ground(atoms - 1);
  g.energy_0 = ground(atoms);
  g.energy_plus = ground(atoms + 1);
  g.gap = g.energy_plus + g.energy_minus - 2.0 * g.energy_0;
  return g;
}

}  // namespace flp
