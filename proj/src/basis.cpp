// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
#include <bit>

#include "rkky/errors.hpp"
#include "rkky/manybody.hpp"

namespace rkky {

OccupationBasis::OccupationBasis(int length, int n_particles)
    : length_(length), particles_(n_particles) {
  if (length < 1 || length > kMaxLength)
    throw Error(ErrorCode::size_error, "chain length must be in [1, 24]");
  if (n_particles < 0 || n_particles > length)
    throw Error(ErrorCode::size_error, "particle number must be in [0, L]");
  const int w = length + 1;
  table_.assign(static_cast<std::size_t>(w * w), 0);
  for (int n = 0; n <= length; ++n) {
    table_[n * w] = 1;
    for (int k = 1; k <= n; ++k)
      table_[n * w + k] = table_[(n - 1) * w + k - 1] + (k <= n - 1 ? table_[(n - 1) * w + k] : 0);
  }
  const std::uint64_t dim = binomial(length, n_particles);
  states_.resize(dim);
  // Gosper's hack walks same-popcount words in increasing order.
  std::uint32_t s = n_particles == 0 ? 0u : (n_particles == 32 ? ~0u : (1u << n_particles) - 1u);
  for (std::uint64_t i = 0; i < dim; ++i) {
    states_[i] = s;
    if (s == 0) break;
    const std::uint32_t c = s & (0u - s);
    const std::uint32_t r = s + c;
    s = (((r ^ s) >> 2) / c) | r;
  }
}

std::uint64_t OccupationBasis::binomial(int n, int k) const {
  if (k < 0 || k > n) return 0;
  return table_[n * (length_ + 1) + k];
}

std::size_t OccupationBasis::rank(std::uint32_t state) const {
  // Combinatorial number system: sum over set bits of C(position, ordinal).
  std::size_t r = 0;
  int ordinal = 1;
  while (state != 0) {
    const int pos = std::countr_zero(state);
    r += binomial(pos, ordinal);
    ++ordinal;
    state &= state - 1;
  }
  return r;
}

std::uint32_t OccupationBasis::unrank(std::size_t index) const {
  std::uint32_t s = 0;
  std::uint64_t rest = index;
  for (int k = particles_; k >= 1; --k) {
    int pos = k - 1;
    while (binomial(pos + 1, k) <= rest) ++pos;
    rest -= binomial(pos, k);
    s |= 1u << pos;
  }
  return s;
}

OccupationBasis build_basis(int length, int n_particles) {
  return OccupationBasis(length, n_particles);
}

}  // namespace rkky
