// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
#include <bit>
#include <cmath>

#include "rkky/errors.hpp"
#include "rkky/manybody.hpp"

namespace rkky {

namespace {

double conjugate(double v) { return v; }
Complex conjugate(Complex v) { return std::conj(v); }

}  // namespace

bool ChainModel::is_real() const {
  return boundary == Boundary::open || std::sin(twist) == 0.0;
}

void ChainModel::validate() const {
  if (length < 1 || length > OccupationBasis::kMaxLength)
    throw Error(ErrorCode::size_error, "chain length must be in [1, 24]");
  if (n_bosons < 0 || n_bosons > length)
    throw Error(ErrorCode::domain_error, "n_bosons must be in [0, L]");
  if (!(hopping > 0.0)) throw Error(ErrorCode::domain_error, "hopping must be > 0");
  if (boundary == Boundary::periodic) {
    if (length < 3) throw Error(ErrorCode::domain_error, "periodic chains need L >= 3");
    if (2 * range() >= length)
      throw Error(ErrorCode::domain_error, "periodic chains need R < L/2");
  } else if (range() >= length) {
    throw Error(ErrorCode::domain_error, "coupling range must be < L");
  }
  for (double v : couplings)
    if (!std::isfinite(v)) throw Error(ErrorCode::domain_error, "couplings must be finite");
}

double interaction_energy(const ChainModel& model, std::uint32_t state) {
  const int L = model.length;
  const bool wrap = model.boundary == Boundary::periodic;
  double e = 0.0;
  for (int s = 1; s <= model.range(); ++s) {
    const double v = model.couplings[s - 1];
    if (v == 0.0) continue;
    std::uint32_t shifted;
    if (wrap) {
      const std::uint32_t mask = L == 32 ? ~0u : (1u << L) - 1u;
      shifted = ((state >> s) | (state << (L - s))) & mask;
    } else {
      shifted = state >> s;
    }
    e += v * std::popcount(state & shifted);
  }
  return e;
}

template <class Scalar>
SparseOperator<Scalar> build_hamiltonian(const ChainModel& model, const OccupationBasis& basis) {
  model.validate();
  if (basis.length() != model.length || basis.particles() != model.n_bosons)
    throw Error(ErrorCode::domain_error, "basis does not match the model");
  Scalar wrap_phase{1.0};
  if constexpr (std::is_same_v<Scalar, Complex>) {
    wrap_phase = std::polar(1.0, model.twist);
  } else {
    if (!model.is_real())
      throw Error(ErrorCode::domain_error, "twisted chain needs a complex operator");
    wrap_phase = std::cos(model.twist);
  }

  const int L = model.length;
  const auto dim = static_cast<Eigen::Index>(basis.size());
  SparseOperator<Scalar> h(dim, dim);
  const int bonds = model.boundary == Boundary::periodic ? L : L - 1;
  h.reserve(Eigen::VectorXi::Constant(dim, 2 * bonds + 1));
  const double t = model.hopping;
  for (std::size_t row = 0; row < basis.size(); ++row) {
    const std::uint32_t s = basis.state(row);
    const auto r = static_cast<Eigen::Index>(row);
    h.insert(r, r) = Scalar{interaction_energy(model, s)};
    for (int j = 0; j < bonds; ++j) {
      const int k = (j + 1) % L;
      const bool nj = (s >> j) & 1u;
      const bool nk = (s >> k) & 1u;
      if (nj == nk) continue;
      const std::uint32_t target = s ^ (1u << j) ^ (1u << k);
      // <target|H|s>: the wrap bond carries e^{i theta} for a hop onto site
      // L-1 and its conjugate for the reverse hop. Rows hold <s|H|target>.
      Scalar amp{-t};
      if (j == L - 1) amp *= nk ? wrap_phase : conjugate(wrap_phase);
      h.insert(r, static_cast<Eigen::Index>(basis.rank(target))) = conjugate(amp);
    }
  }
  h.makeCompressed();
  return h;
}

template SparseOperator<double> build_hamiltonian<double>(const ChainModel&,
                                                          const OccupationBasis&);
template SparseOperator<Complex> build_hamiltonian<Complex>(const ChainModel&,
                                                            const OccupationBasis&);

}  // namespace rkky
