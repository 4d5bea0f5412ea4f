// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
//
// Elements of (T - z)^-1 for a symmetric tridiagonal T, from the forward and
// backward pivot sequences of T - z. O(n) per energy, no matrix storage.
#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "rkky/spectra.hpp"

namespace rkky {

using IndexPair = std::pair<std::size_t, std::size_t>;

// Pairs (c - m/2, c + (m+1)/2) for m = 0..count-1: separations 0, 1, 2, ...
// grid steps, centered on c to within half a step.
std::vector<IndexPair> centered_pairs(std::size_t center, std::size_t count);

class TridiagonalResolvent {
 public:
  explicit TridiagonalResolvent(const Tridiagonal& op) : op_(&op) {}

  // Fills out[k] = G(z)(pairs[k]). Consecutive centered pairs are handled
  // in O(1) each; arbitrary pairs cost O(|i - j|).
  void evaluate(double z, std::span<const IndexPair> pairs,
                std::span<double> out) const;

 private:
  const Tridiagonal* op_;
};

}  // namespace rkky
