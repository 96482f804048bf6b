// Copyright 2026 The flp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "flp/errors.hpp"
#include "flp/model.hpp"

namespace flp {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Two-fluid trial state at the integrable point: a fraction l_h of the chain
// holds a high-density mixture of molecules and unpaired majority atoms, the
// rest holds a low-density fully polarized gas. n_d molecules per site total.
struct VariationalPoint {
  double pair_density = 0.0;   // n_d, dressed molecules per site
  double core_fraction = 0.0;  // l_h, chain fraction taken by the dense phase

  friend bool operator==(const VariationalPoint&, const VariationalPoint&) = default;
};

// Structural feasibility at total density n:
//   0 <= n_d <= l_h <= 1,   l_h <= n - n_d,   n_d >= n - 1.
inline bool feasible(double filling, const VariationalPoint& pt, double tol = 1e-12) {
  const double nd = pt.pair_density, lh = pt.core_fraction;
  return nd >= -tol && nd <= lh + tol && lh <= 1.0 + tol && lh <= filling - nd + tol &&
         nd >= filling - 1.0 - tol;
}

// Adds the imbalance cap: the minority atoms available for pairing limit
// n_d <= n (1 - p) / 2.
inline bool feasible(double filling, double imbalance, const VariationalPoint& pt,
                     double tol = 1e-12) {
  return feasible(filling, pt, tol) &&
         pt.pair_density <= filling * (1.0 - imbalance) / 2.0 + tol;
}

struct PhaseDensities {
  std::optional<double> low;   // n_l, total density in the polarized region
  std::optional<double> high;  // n_h, total density in the core
};

namespace detail {

inline void require_feasible(double filling, const VariationalPoint& pt) {
  if (!feasible(filling, pt)) {
    std::ostringstream msg;
    msg << "trial point (n_d=" << pt.pair_density << ", l_h=" << pt.core_fraction
        << ") lies outside the feasibility polytope at n=" << filling;
    throw InfeasiblePoint(msg.str());
  }
}

}  // namespace detail

// Region densities of the trial state. Atom counting gives
//   n_l = 1 - (1 - n + n_d) / (1 - l_h),   n_h = 1 + n_d / l_h;
// each is absent in the limit where its region disappears.
inline PhaseDensities densities(double filling, const VariationalPoint& pt) {
  detail::require_feasible(filling, pt);
  PhaseDensities out;
  if (pt.core_fraction < 1.0) {
    const double nl = 1.0 - (1.0 - filling + pt.pair_density) / (1.0 - pt.core_fraction);
    out.low = std::clamp(nl, 0.0, 1.0);
  }
  if (pt.core_fraction > 0.0) {
    const double nh = 1.0 + pt.pair_density / pt.core_fraction;
    out.high = std::clamp(nh, 1.0, 2.0);
  }
  return out;
}

// Ground-state energy per site of the trial state. Each region contributes a
// half-filled-band-like kinetic term; the polarized gas hops with t, the core
// excitations with |t_ad|, and each molecule costs delta:
//   e = -(2/pi) [ (1 - l_h) t sin(pi n_l) + l_h |t_ad| sin(pi (2 - n_h)) ] + delta n_d.
inline double two_fluid_energy(double filling, const ModelParams& params,
                               const VariationalPoint& pt) {
  detail::require_feasible(filling, pt);
  const double nd = pt.pair_density, lh = pt.core_fraction;
  const double tau = std::abs(params.exchange_tunneling());
  double e = params.delta * nd;
  if (lh < 1.0) {
    const double nl = std::clamp(1.0 - (1.0 - filling + nd) / (1.0 - lh), 0.0, 1.0);
    e -= (2.0 / kPi) * (1.0 - lh) * params.t * std::sin(kPi * nl);
  }
  if (lh > 0.0) {
    const double m = std::clamp(1.0 - nd / lh, 0.0, 1.0);  // 2 - n_h
    e -= (2.0 / kPi) * lh * tau * std::sin(kPi * m);
  }
  return e;
}

// Interior stationarity of the energy in n_d at fixed region geometry:
// d e / d n_d = 0 solves to n_d = (l_h / pi) arccos(x) with
//   x = (delta + 2 t cos(pi n_l)) / (2 |t_ad|).
// Absent when |x| > 1 (no interior solution) or the core carries no kinetic
// scale. Requires 0 < l_h < 1.
inline std::optional<double> stationary_pair_density(double low_density, double core_fraction,
                                                     const ModelParams& params) {
  if (!(core_fraction > 0.0 && core_fraction < 1.0))
    throw std::invalid_argument("stationary_pair_density: need 0 < l_h < 1");
  if (!(low_density >= 0.0 && low_density <= 1.0))
    throw std::invalid_argument("stationary_pair_density: need 0 <= n_l <= 1");
  const double tau = std::abs(params.exchange_tunneling());
  if (tau < 1e-300) return std::nullopt;
  const double x = (params.delta + 2.0 * params.t * std::cos(kPi * low_density)) / (2.0 * tau);
  if (std::abs(x) > 1.0) return std::nullopt;
  return core_fraction / kPi * std::acos(x);
}

}  // namespace flp
