// Copyright 2026 The flp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <array>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "flp/basis.hpp"
#include "flp/errors.hpp"
#include "flp/model.hpp"

namespace flp {

// Ground-state vector checkpoint. Layout, all integers and doubles
// little-endian:
//   "FLP1" | L u64 | N_up u64 | N_dn u64 | dim u64 | dim doubles
inline constexpr std::array<char, 4> kCheckpointMagic = {'F', 'L', 'P', '1'};

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t x) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((x >> (8 * i)) & 0xff);
  os.write(b, 8);
}

inline std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t x = 0;
  for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return x;
}

}  // namespace detail

struct Checkpoint {
  Sector sector;
  Eigen::VectorXd state;
};

inline void save_state(const std::filesystem::path& path, const Sector& sector,
                       const Eigen::VectorXd& state) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open checkpoint for writing: " + path.string());
  os.write(kCheckpointMagic.data(), kCheckpointMagic.size());
  detail::put_u64(os, static_cast<std::uint64_t>(sector.sites));
  detail::put_u64(os, static_cast<std::uint64_t>(sector.n_up));
  detail::put_u64(os, static_cast<std::uint64_t>(sector.n_dn));
  detail::put_u64(os, static_cast<std::uint64_t>(state.size()));
  for (Eigen::Index i = 0; i < state.size(); ++i)
    detail::put_u64(os, std::bit_cast<std::uint64_t>(state[i]));
  if (!os) throw IoError("short write while saving checkpoint: " + path.string());
}

inline Checkpoint load_state(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint: " + path.string());
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kCheckpointMagic)
    throw IoError("not a state checkpoint (bad magic): " + path.string());

  Checkpoint cp;
  const std::uint64_t sites = detail::get_u64(is);
  const std::uint64_t n_up = detail::get_u64(is);
  const std::uint64_t n_dn = detail::get_u64(is);
  const std::uint64_t dim = detail::get_u64(is);
  if (!is || sites > 30 || n_up > sites || n_dn > sites)
    throw IoError("corrupt checkpoint header: " + path.string());
  cp.sector = Sector{static_cast<int>(sites), static_cast<int>(n_up), static_cast<int>(n_dn)};
  const std::uint64_t expect = detail::binomial(cp.sector.sites, cp.sector.n_up) *
                               detail::binomial(cp.sector.sites, cp.sector.n_dn);
  if (dim != expect) {
    std::ostringstream msg;
    msg << "checkpoint claims dimension " << dim << " but sector (L=" << sites
        << ", N_up=" << n_up << ", N_dn=" << n_dn << ") has " << expect;
    throw IoError(msg.str());
  }
  cp.state.resize(static_cast<Eigen::Index>(dim));
  for (std::uint64_t i = 0; i < dim; ++i)
    cp.state[static_cast<Eigen::Index>(i)] = std::bit_cast<double>(detail::get_u64(is));
  if (!is) throw IoError("checkpoint truncated: " + path.string());
  return cp;
}

}  // namespace flp
