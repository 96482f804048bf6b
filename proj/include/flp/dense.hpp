// Copyright 2026 The flp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <lapacke.h>

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "flp/hamiltonian.hpp"

namespace flp {

// Full spectrum by dense symmetric diagonalization, ascending. Small-system
// ground truth for the iterative solver; the budget guard keeps it off the
// large sectors it was never meant for.
inline std::vector<double> dense_spectrum(const HamiltonianOperator& h,
                                          std::uint64_t max_dim = 4000) {
  Eigen::MatrixXd a = h.dense(max_dim);
  const auto n = static_cast<lapack_int>(a.rows());
  std::vector<double> w(static_cast<std::size_t>(n));
  const lapack_int info =
      LAPACKE_dsyev(LAPACK_COL_MAJOR, 'N', 'U', n, a.data(), n, w.data());
  if (info != 0) throw std::runtime_error("dsyev failed to converge");
  return w;
}

inline std::pair<double, Eigen::VectorXd> dense_ground_state(const HamiltonianOperator& h,
                                                             std::uint64_t max_dim = 4000) {
  Eigen::MatrixXd a = h.dense(max_dim);
  const auto n = static_cast<lapack_int>(a.rows());
  std::vector<double> w(static_cast<std::size_t>(n));
  const lapack_int info =
      LAPACKE_dsyev(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, w.data());
  if (info != 0) throw std::runtime_error("dsyev failed to converge");
  return {w[0], a.col(0)};
}

inline std::vector<double> dense_spectrum(const ModelParams& params, const SectorBasis& basis,
                                          std::uint64_t max_dim = 4000) {
  return dense_spectrum(HamiltonianOperator(basis, params), max_dim);
}

}  // namespace flp
