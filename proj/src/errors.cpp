// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
#include "rkky/errors.hpp"

namespace rkky {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::box_too_small: return "BoxTooSmall";
    case ErrorCode::convergence_failure: return "ConvergenceFailure";
    case ErrorCode::cutoff_too_small: return "CutoffTooSmall";
    case ErrorCode::insufficient_basis: return "InsufficientBasis";
    case ErrorCode::insufficient_virtual_states: return "InsufficientVirtualStates";
    case ErrorCode::degenerate_denominator: return "DegenerateDenominator";
    case ErrorCode::domain_error: return "DomainError";
    case ErrorCode::fit_failure: return "FitFailure";
    case ErrorCode::resolution_error: return "ResolutionError";
    case ErrorCode::range_error: return "RangeError";
    case ErrorCode::size_error: return "SizeError";
    case ErrorCode::degeneracy_error: return "DegeneracyError";
    case ErrorCode::config_error: return "ConfigError";
  }
  return "Error";
}

}  // namespace rkky
