// Copyright 2026 The flp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cassert>
#include <cstdint>
#include <sstream>
#include <vector>

#include "flp/basis.hpp"
#include "flp/model.hpp"

namespace flp {

// Hop amplitudes keyed by how many opposite-species atoms occupy the bond,
// plus the diagonal cost per doubly occupied site.
struct HopAmplitudes {
  double vacant;   // no opposite-species atom on either bond site: t
  double single;   // one of the two sites holds one: g
  double paired;   // both do: t_ad
  double doublon_energy;

  static HopAmplitudes from(const ModelParams& p) {
    return {p.t, p.pair_tunneling(), p.exchange_tunneling(), p.delta};
  }
};

// Matrix-free Hamiltonian on a periodic chain (L = 2 uses the single open
// bond to avoid a doubled link). Fermionic signs are species-internal: modes
// are ordered up sites 0..L-1 then down sites, so a hop's sign is the parity
// of same-species occupation strictly between the bond sites, and the wrap
// bond picks up (-1)^(N_sigma - 1).
class HamiltonianOperator {
 public:
  HamiltonianOperator(const SectorBasis& basis, const ModelParams& params)
      : HamiltonianOperator(basis, HopAmplitudes::from(params)) {}

  HamiltonianOperator(const SectorBasis& basis, const HopAmplitudes& amps)
      : basis_(&basis), amps_(amps) {
    const int L = basis.sector().sites;
    std::vector<std::pair<int, int>> bonds;
    for (int i = 0; i + 1 < L; ++i) bonds.emplace_back(i, i + 1);
    if (L >= 3) bonds.emplace_back(L - 1, 0);
    up_hops_ = build_hops(basis.up_masks(), bonds);
    dn_hops_ = build_hops(basis.dn_masks(), bonds);
  }

  const SectorBasis& basis() const { return *basis_; }

  // out = H in; raw pointers must address basis().dimension() doubles.
  void apply(const double* in, double* out) const {
    const auto& up = basis_->up_masks();
    const auto& dn = basis_->dn_masks();
    const std::size_t nup = up.size(), ndn = dn.size();

    std::size_t idx = 0;
    for (std::size_t iu = 0; iu < nup; ++iu) {
      const std::uint32_t u = up[iu];
      for (std::size_t id = 0; id < ndn; ++id, ++idx)
        out[idx] = amps_.doublon_energy * std::popcount(u & dn[id]) * in[idx];
    }

    // coeff[code]: code counts opposite-species atoms on the bond (0, 1, 2)
    const double cpos[4] = {-amps_.vacant, -amps_.single, -amps_.single, -amps_.paired};
    const double cneg[4] = {amps_.vacant, amps_.single, amps_.single, amps_.paired};

    for (const Hop& h : up_hops_) {
      const double* c = h.negative ? cneg : cpos;
      const double* src = in + static_cast<std::size_t>(h.src) * ndn;
      double* dst = out + static_cast<std::size_t>(h.dst) * ndn;
      const int si = h.site_i, sj = h.site_j;
      for (std::size_t id = 0; id < ndn; ++id) {
        const std::uint32_t m = dn[id];
        dst[id] += c[((m >> si) & 1u) | (((m >> sj) & 1u) << 1)] * src[id];
      }
    }
    for (const Hop& h : dn_hops_) {
      const double* c = h.negative ? cneg : cpos;
      const int si = h.site_i, sj = h.site_j;
      for (std::size_t iu = 0; iu < nup; ++iu) {
        const std::uint32_t m = up[iu];
        out[iu * ndn + h.dst] +=
            c[((m >> si) & 1u) | (((m >> sj) & 1u) << 1)] * in[iu * ndn + h.src];
      }
    }
  }

  void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
    check_size(in.size());
    out.resize(static_cast<Eigen::Index>(basis_->dimension()));
    apply(in.data(), out.data());
  }

  Eigen::VectorXd operator()(const Eigen::VectorXd& in) const {
    Eigen::VectorXd out;
    apply(in, out);
    return out;
  }

  // Full matrix, one apply per column. Guarded: dense work is for oracles.
  Eigen::MatrixXd dense(std::uint64_t max_dim = 4000) const {
    const std::uint64_t dim = basis_->dimension();
    if (dim > max_dim) {
      std::ostringstream msg;
      msg << "dense form of a dimension-" << dim << " sector exceeds the budget " << max_dim;
      throw DimensionTooLarge(msg.str());
    }
    const auto n = static_cast<Eigen::Index>(dim);
    Eigen::MatrixXd h(n, n);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n), col(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      e[j] = 1.0;
      apply(e.data(), col.data());
      h.col(j) = col;
      e[j] = 0.0;
    }
    return h;
  }

 private:
  struct Hop {
    std::uint32_t src, dst;  // same-species mask ranks
    std::uint8_t site_i, site_j;  // bond sites, for the amplitude lookup
    bool negative;           // fermionic string parity
  };

  static std::vector<Hop> build_hops(const std::vector<std::uint32_t>& masks,
                                     const std::vector<std::pair<int, int>>& bonds) {
    std::vector<Hop> hops;
    for (std::uint32_t r = 0; r < masks.size(); ++r) {
      const std::uint32_t m = masks[r];
      for (const auto& [a, b] : bonds) {
        for (const auto& [from, to] : {std::pair{a, b}, std::pair{b, a}}) {
          if (!((m >> from) & 1u) || ((m >> to) & 1u)) continue;
          const std::uint32_t m2 = m ^ (1u << from) ^ (1u << to);
          assert(std::popcount(m2) == std::popcount(m));
          const int lo = std::min(from, to), hi = std::max(from, to);
          const std::uint32_t between =
              ((1u << hi) - 1u) & ~((1u << (lo + 1)) - 1u);
          const auto dst = static_cast<std::uint32_t>(
              std::lower_bound(masks.begin(), masks.end(), m2) - masks.begin());
          hops.push_back({r, dst, static_cast<std::uint8_t>(a),
                          static_cast<std::uint8_t>(b),
                          (std::popcount(m & between) & 1) != 0});
        }
      }
    }
    return hops;
  }

  void check_size(Eigen::Index n) const {
    if (static_cast<std::uint64_t>(n) != basis_->dimension()) {
      std::ostringstream msg;
      msg << "state vector of length " << n << " does not match sector dimension "
          << basis_->dimension();
      throw BasisMismatch(msg.str());
    }
  }

  const SectorBasis* basis_;
  HopAmplitudes amps_;
  std::vector<Hop> up_hops_;
  std::vector<Hop> dn_hops_;
};

inline Eigen::VectorXd apply_hamiltonian(const ModelParams& params, const SectorBasis& basis,
                                         const Eigen::VectorXd& in) {
  return HamiltonianOperator(basis, params)(in);
}

}  // namespace flp
