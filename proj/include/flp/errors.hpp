// Copyright 2026 The flp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace flp {

// Process exit codes of the command line tool. Library exceptions carry one
// of these so scripted callers can tell failure modes apart.
enum class ExitCode : int {
  ok = 0,
  usage = 2,
  non_integer_sector = 3,
  infeasible_point = 4,
  integrable_point_required = 5,
  dimension_too_large = 6,
  basis_mismatch = 7,
  not_converged = 8,
  imaginary_residue = 9,
  unclassifiable_point = 10,
  io_error = 11,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

// (L, n, p) does not map onto integer particle numbers.
struct NonIntegerSector : Error {
  explicit NonIntegerSector(const std::string& w) : Error(ExitCode::non_integer_sector, w) {}
};

// A trial point violates the two-fluid feasibility polytope.
struct InfeasiblePoint : Error {
  explicit InfeasiblePoint(const std::string& w) : Error(ExitCode::infeasible_point, w) {}
};

// The closed-form ground state only exists at delta_g = -t.
struct IntegrablePointRequired : Error {
  explicit IntegrablePointRequired(const std::string& w)
      : Error(ExitCode::integrable_point_required, w) {}
};

struct DimensionTooLarge : Error {
  explicit DimensionTooLarge(const std::string& w) : Error(ExitCode::dimension_too_large, w) {}
};

struct BasisMismatch : Error {
  explicit BasisMismatch(const std::string& w) : Error(ExitCode::basis_mismatch, w) {}
};

// The Fourier transform of the density correlator kept a non-negligible
// imaginary part; the correlator upstream is not reflection symmetric.
struct ImaginaryResidue : Error {
  explicit ImaginaryResidue(const std::string& w) : Error(ExitCode::imaginary_residue, w) {}
};

struct UnclassifiablePoint : Error {
  explicit UnclassifiablePoint(const std::string& w) : Error(ExitCode::unclassifiable_point, w) {}
};

struct UsageError : Error {
  explicit UsageError(const std::string& w) : Error(ExitCode::usage, w) {}
};

struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ExitCode::io_error, w) {}
};

}  // namespace flp
