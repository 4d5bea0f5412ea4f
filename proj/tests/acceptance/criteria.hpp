// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "rkky/kernel.hpp"

namespace acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Shared between checks so the expensive kernels are built once.
struct Workspace {
  int threads = 1;
  std::map<std::string, rkky::RadialKernel> kernels;

  const rkky::RadialKernel& kernel(const std::string& key,
                                   const std::function<rkky::RadialKernel()>& build);
};

struct Check {
  int id;
  const char* title;
  double time_limit;  // seconds, 0 for none
  Outcome (*run)(Workspace&);
};

const std::vector<Check>& all_checks();

}  // namespace acceptance
