// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
#include "rkky/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rkky {

std::vector<IndexPair> centered_pairs(std::size_t center, std::size_t count) {
  std::vector<IndexPair> pairs(count);
  for (std::size_t m = 0; m < count; ++m) pairs[m] = {center - m / 2, center + (m + 1) / 2};
  return pairs;
}

namespace {

// Keeps a vanishing pivot finite; the product formulas stay well defined
// because a tiny pivot is always followed by a compensating large one.
double guard(double pivot, double scale) {
  const double floor = std::numeric_limits<double>::epsilon() * scale;
  if (std::abs(pivot) >= floor) return pivot;
  return pivot < 0.0 ? -floor : floor;
}

bool is_centered_chain(std::span<const IndexPair> pairs) {
  if (pairs.empty()) return false;
  const std::size_t c = pairs[0].first;
  if (pairs[0].second != c) return false;
  for (std::size_t m = 1; m < pairs.size(); ++m)
    if (pairs[m].first != c - m / 2 || pairs[m].second != c + (m + 1) / 2) return false;
  return true;
}

}  // namespace

void TridiagonalResolvent::evaluate(double z, std::span<const IndexPair> pairs,
                                    std::span<double> out) const {
  const auto& d = op_->diag;
  const auto& e = op_->off;
  const std::size_t n = d.size();
  if (pairs.empty()) return;

  std::size_t lo = n;
  std::size_t hi = 0;
  for (auto [i, j] : pairs) {
    lo = std::min(lo, std::min(i, j));
    hi = std::max(hi, std::max(i, j));
  }
  auto coupling = [&](std::size_t i) {
    return (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(e[i]) : 0.0);
  };

  // forward[i] for i <= hi, backward[i] for i >= lo.
  std::vector<double> forward(hi + 1);
  forward[0] = guard(d[0] - z, std::abs(d[0] - z) + coupling(0));
  for (std::size_t i = 1; i <= hi; ++i) {
    const double a = d[i] - z;
    forward[i] = guard(a - e[i - 1] * e[i - 1] / forward[i - 1], std::abs(a) + coupling(i));
  }
  std::vector<double> backward(n - lo);
  auto back = [&](std::size_t i) -> double& { return backward[i - lo]; };
  back(n - 1) = guard(d[n - 1] - z, std::abs(d[n - 1] - z) + coupling(n - 1));
  for (std::size_t i = n - 1; i-- > lo;) {
    const double a = d[i] - z;
    back(i) = guard(a - e[i] * e[i] / back(i + 1), std::abs(a) + coupling(i));
  }
  auto diagonal = [&](std::size_t i) {
    return 1.0 / (forward[i] + back(i) - (d[i] - z));
  };

  if (is_centered_chain(pairs)) {
    std::size_t i = pairs[0].first;
    std::size_t j = i;
    double g = diagonal(i);
    out[0] = g;
    for (std::size_t m = 1; m < pairs.size(); ++m) {
      if (m % 2 == 1) {
        g *= -e[j] / back(j + 1);
        ++j;
      } else {
        g *= -e[i - 1] / forward[i - 1];
        --i;
      }
      out[m] = g;
    }
    return;
  }

  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto [i, j] = pairs[k];
    if (i > j) std::swap(i, j);
    double g = diagonal(i);
    for (std::size_t l = i; l < j; ++l) g *= -e[l] / back(l + 1);
    out[k] = g;
  }
}

}  // namespace rkky
