// Copyright 2026 The flp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <sstream>
#include <vector>

#include "flp/errors.hpp"
#include "flp/model.hpp"

namespace flp {

namespace detail {

// Enumerates all L-bit masks with k bits set, ascending. Gosper's hack.
inline std::vector<std::uint32_t> masks_with_popcount(int sites, int k) {
  std::vector<std::uint32_t> out;
  if (k == 0) return {0u};
  std::uint32_t m = (1u << k) - 1u;
  const std::uint32_t limit = 1u << sites;
  while (m < limit) {
    out.push_back(m);
    const std::uint32_t c = m & -m;
    const std::uint32_t r = m + c;
    m = (((r ^ m) >> 2) / c) | r;
  }
  return out;
}

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

// Occupation-number basis of a fixed (N_up, N_dn) sector. Each species is a
// bitmask over sites 0..L-1 (bit i = site i occupied), each list sorted
// ascending as integers; the sector state index is
//   index = iu * (number of down masks) + id,
// i.e. the down configuration varies fastest.
class SectorBasis {
 public:
  static constexpr std::uint64_t default_max_dimension = 1ull << 22;

  explicit SectorBasis(const Sector& sector,
                       std::uint64_t max_dimension = default_max_dimension)
      : sector_(sector) {
    sector_.validate();
    if (sector_.sites > 30)
      throw std::invalid_argument("SectorBasis: site masks are 32-bit; L must be <= 30");
    const std::uint64_t dim = detail::binomial(sector_.sites, sector_.n_up) *
                              detail::binomial(sector_.sites, sector_.n_dn);
    if (dim > max_dimension) {
      std::ostringstream msg;
      msg << "sector (L=" << sector_.sites << ", N_up=" << sector_.n_up
          << ", N_dn=" << sector_.n_dn << ") has dimension " << dim
          << " exceeding the budget " << max_dimension;
      throw DimensionTooLarge(msg.str());
    }
    up_ = detail::masks_with_popcount(sector_.sites, sector_.n_up);
    dn_ = detail::masks_with_popcount(sector_.sites, sector_.n_dn);
  }

  const Sector& sector() const { return sector_; }
  std::uint64_t dimension() const {
    return static_cast<std::uint64_t>(up_.size()) * dn_.size();
  }
  const std::vector<std::uint32_t>& up_masks() const { return up_; }
  const std::vector<std::uint32_t>& dn_masks() const { return dn_; }

  std::uint64_t index_of(std::uint32_t up, std::uint32_t dn) const {
    return rank(up_, up) * dn_.size() + rank(dn_, dn);
  }
  std::pair<std::uint32_t, std::uint32_t> masks_at(std::uint64_t index) const {
    return {up_[index / dn_.size()], dn_[index % dn_.size()]};
  }
  std::size_t up_rank(std::uint32_t m) const { return rank(up_, m); }
  std::size_t dn_rank(std::uint32_t m) const { return rank(dn_, m); }

 private:
  static std::size_t rank(const std::vector<std::uint32_t>& v, std::uint32_t m) {
    const auto it = std::lower_bound(v.begin(), v.end(), m);
    if (it == v.end() || *it != m)
      throw BasisMismatch("configuration mask does not belong to this sector");
    return static_cast<std::size_t>(it - v.begin());
  }

  Sector sector_;
  std::vector<std::uint32_t> up_;
  std::vector<std::uint32_t> dn_;
};

}  // namespace flp
