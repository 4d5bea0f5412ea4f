// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rkky {

enum class ErrorCode {
  box_too_small,
  convergence_failure,
  cutoff_too_small,
  insufficient_basis,
  insufficient_virtual_states,
  degenerate_denominator,
  domain_error,
  fit_failure,
  resolution_error,
  range_error,
  size_error,
  degeneracy_error,
  config_error,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rkky
