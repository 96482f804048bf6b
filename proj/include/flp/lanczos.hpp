// Copyright 2026 The flp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <utility>
#include <vector>

#include "flp/errors.hpp"
#include "flp/hamiltonian.hpp"

namespace flp {

struct LanczosOptions {
  double tolerance = 1e-10;  // on the true residual |H y - e0 y|
  int max_iterations = 2000;  // Lanczos steps, cumulative across restarts
  int krylov_cap = 400;       // stored basis vectors per restart cycle
  std::uint64_t seed = 0;
  std::optional<Eigen::VectorXd> start;  // replaces the seeded random start
};

struct LanczosReport {
  double ground_energy = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

struct NotConverged : Error {
  LanczosReport report;
  NotConverged(const LanczosReport& r, const std::string& w)
      : Error(ExitCode::not_converged, w), report(r) {}
};

namespace detail {

// Seed-keyed start vector, generated without std::uniform_real_distribution
// so the bytes do not depend on the standard library build.
inline Eigen::VectorXd random_start(std::uint64_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v[i] = static_cast<double>(rng() >> 11) * (1.0 / 4503599627370496.0) - 1.0;
  v.normalize();
  return v;
}

}  // namespace detail

// Restarted Lanczos with full (twice-applied classical Gram-Schmidt)
// reorthogonalization. Convergence is declared only on the explicitly
// recomputed residual, never on the subspace estimate. Deterministic for a
// fixed seed; with a degenerate ground level the returned vector is the
// seed-dependent member the iteration settles into.
inline std::pair<LanczosReport, Eigen::VectorXd> ground_state_lanczos(
    const HamiltonianOperator& h, const LanczosOptions& opt = {}) {
  const std::uint64_t dim = h.basis().dimension();
  if (opt.tolerance <= 0.0) throw std::invalid_argument("lanczos: tolerance must be positive");
  if (opt.krylov_cap < 2) throw std::invalid_argument("lanczos: krylov_cap must be >= 2");

  Eigen::VectorXd v;
  if (opt.start) {
    if (static_cast<std::uint64_t>(opt.start->size()) != dim)
      throw BasisMismatch("lanczos: start vector length does not match sector dimension");
    v = opt.start->normalized();
  } else {
    v = detail::random_start(dim, opt.seed);
  }

  constexpr double kBreakdown = 1e-14;
  const auto cap = static_cast<int>(std::min<std::uint64_t>(opt.krylov_cap, dim));

  std::vector<Eigen::VectorXd> basis;
  std::vector<double> alpha, beta;
  Eigen::VectorXd w(v.size()), ritz(v.size()), hy(v.size());
  int total_steps = 0;
  LanczosReport report;

  const auto reorthogonalize = [&](Eigen::VectorXd& x) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) x -= (b.dot(x)) * b;
  };
  // Smallest Ritz pair of the current tridiagonal factorization.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  const auto solve_tridiagonal = [&]() -> std::pair<double, Eigen::VectorXd> {
    const auto k = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(alpha.data(), k);
    Eigen::VectorXd e =
        beta.empty() ? Eigen::VectorXd() : Eigen::Map<const Eigen::VectorXd>(beta.data(), k - 1);
    tri.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
    return {tri.eigenvalues()[0], tri.eigenvectors().col(0)};
  };
  const auto form_ritz = [&](const Eigen::VectorXd& s) {
    ritz.setZero();
    for (std::size_t j = 0; j < basis.size(); ++j) ritz += s[static_cast<Eigen::Index>(j)] * basis[j];
    ritz.normalize();
  };
  const auto true_residual = [&](double theta) {
    h.apply(ritz, hy);
    return (hy - theta * ritz).norm();
  };

  while (true) {
    basis.clear();
    alpha.clear();
    beta.clear();
    basis.push_back(v);
    h.apply(v, w);
    alpha.push_back(v.dot(w));
    w -= alpha.back() * v;
    reorthogonalize(w);

    bool restart = false;
    while (!restart) {
      const double b = w.norm();
      const auto [theta, s] = solve_tridiagonal();
      // Residual bound of the Ritz pair: |H y - theta y| <= b |s_k|.
      const double estimate = b * std::abs(s[s.size() - 1]);
      if (estimate <= opt.tolerance || b < kBreakdown ||
          static_cast<std::uint64_t>(basis.size()) == dim) {
        form_ritz(s);
        const double res = true_residual(theta);
        report = {theta, total_steps, res, res <= opt.tolerance};
        if (report.converged || b < kBreakdown ||
            static_cast<std::uint64_t>(basis.size()) == dim)
          return {report, ritz};
      }
      if (total_steps >= opt.max_iterations) {
        form_ritz(s);
        const double res = true_residual(theta);
        report = {theta, total_steps, res, res <= opt.tolerance};
        if (report.converged) return {report, ritz};
        std::ostringstream msg;
        msg << "Lanczos stalled at residual " << res << " (tolerance " << opt.tolerance
            << ") after " << total_steps << " steps";
        throw NotConverged(report, msg.str());
      }
      if (static_cast<int>(basis.size()) == cap) {
        // Restart from the current Ritz vector.
        form_ritz(s);
        v = ritz;
        restart = true;
        break;
      }
      basis.push_back(w / b);
      beta.push_back(b);
      const Eigen::VectorXd& vk = basis.back();
      h.apply(vk, w);
      alpha.push_back(vk.dot(w));
      w -= alpha.back() * vk + beta.back() * basis[basis.size() - 2];
      reorthogonalize(w);
      ++total_steps;
    }
  }
}

}  // namespace flp
