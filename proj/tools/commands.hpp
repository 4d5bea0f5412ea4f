// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "rkky/config.hpp"

namespace rkky::cli {

struct Context {
  std::string command;
  Config config;
  std::filesystem::path out;
  int threads = 1;
};

// Each returns the process exit code; errors propagate as rkky::Error.
int cmd_spectrum(Context& ctx);
int cmd_kernel(Context& ctx);
int cmd_couplings(Context& ctx);
int cmd_scan_ratios(Context& ctx);
int cmd_chain(Context& ctx);
int cmd_scan_phase(Context& ctx);
int cmd_crossover(Context& ctx);
int cmd_kagome(Context& ctx);

}  // namespace rkky::cli
