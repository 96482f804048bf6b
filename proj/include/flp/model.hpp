// Copyright 2026 The flp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>

#include "flp/errors.hpp"

namespace flp {

// Couplings of a chain of two-species fermions whose hop amplitude depends on
// how many opposite-species atoms sit on the two sites of the bond:
//   neither site occupied  -> t        (bare tunneling)
//   exactly one            -> g        (atom moves next to / away from a partner)
//   both                   -> t_ad     (atom-molecule exchange)
// plus an on-site energy delta per doubly occupied site. t sets the unit of
// energy; the deltas parameterize the assisted amplitudes as offsets:
//   g = delta_g + t,  t_ad = delta_t + 2 g - t.
struct ModelParams {
  double t = 1.0;
  double delta_g = 0.0;
  double delta_t = 0.0;
  double delta = 0.0;

  double pair_tunneling() const { return delta_g + t; }
  double exchange_tunneling() const { return delta_t + 2.0 * (delta_g + t) - t; }

  // At g = 0 the number of doubly occupied sites commutes with H and the
  // ground state is known in closed form.
  bool integrable(double tol = 1e-12) const { return std::abs(pair_tunneling()) <= tol; }

  void validate() const {
    if (!(t > 0.0)) throw std::invalid_argument("ModelParams: t must be positive");
    if (!std::isfinite(delta_g) || !std::isfinite(delta_t) || !std::isfinite(delta))
      throw std::invalid_argument("ModelParams: couplings must be finite");
  }
};

struct DerivedCouplings {
  double pair_tunneling;      // g
  double exchange_tunneling;  // t_ad
};

inline DerivedCouplings derive_couplings(const ModelParams& p) {
  return {p.pair_tunneling(), p.exchange_tunneling()};
}

// Target thermodynamic state: total atom density n in [0, 2] and population
// imbalance p = (n_up - n_dn) / n. Only |p| matters (species relabeling), so
// a negative input is folded onto [0, 1].
struct FillingSpec {
  double filling = 1.0;
  double imbalance = 0.0;

  FillingSpec(double n, double p) : filling(n), imbalance(std::abs(p)) {
    if (!(n >= 0.0 && n <= 2.0)) throw std::invalid_argument("filling must lie in [0, 2]");
    if (!(imbalance <= 1.0)) throw std::invalid_argument("|imbalance| must lie in [0, 1]");
  }
};

// A finite chain realization: L sites with fixed particle numbers per species.
struct Sector {
  int sites = 0;
  int n_up = 0;
  int n_dn = 0;

  void validate() const {
    if (sites < 2) throw std::invalid_argument("Sector: need at least two sites");
    if (n_up < 0 || n_dn < 0 || n_up > sites || n_dn > sites)
      throw std::invalid_argument("Sector: particle numbers must lie in [0, L]");
  }

  int atoms() const { return n_up + n_dn; }
  double filling() const { return static_cast<double>(atoms()) / sites; }
  double imbalance() const {
    return atoms() == 0 ? 0.0 : static_cast<double>(std::abs(n_up - n_dn)) / atoms();
  }

  friend bool operator==(const Sector&, const Sector&) = default;
};

// Maps (L, n, p) to integer particle numbers, majority species first.
// Throws NonIntegerSector unless n L and n L (1 + |p|) / 2 are integers to
// within 1e-9.
inline Sector sector_for(int sites, const FillingSpec& target) {
  if (sites < 2) throw std::invalid_argument("sector_for: need at least two sites");
  const double atoms_real = target.filling * sites;
  const double atoms_rounded = std::round(atoms_real);
  const double up_real = atoms_real * (1.0 + target.imbalance) / 2.0;
  const double up_rounded = std::round(up_real);
  if (std::abs(atoms_real - atoms_rounded) > 1e-9 || std::abs(up_real - up_rounded) > 1e-9) {
    std::ostringstream msg;
    msg << "no integer particle numbers for L=" << sites << ", n=" << target.filling
        << ", p=" << target.imbalance << " (need integer n*L and n*L*(1+p)/2)";
    throw NonIntegerSector(msg.str());
  }
  Sector s{sites, static_cast<int>(up_rounded),
           static_cast<int>(atoms_rounded) - static_cast<int>(up_rounded)};
  s.validate();
  return s;
}

inline FillingSpec filling_of(const Sector& s) {
  return FillingSpec(s.filling(), s.imbalance());
}

}  // namespace flp
