// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rkky/errors.hpp"
#include "rkky/manybody.hpp"

namespace rkky {

namespace {

void check_state(const StateVector& state, const OccupationBasis& basis) {
  if (static_cast<std::size_t>(state.size()) != basis.size())
    throw Error(ErrorCode::domain_error, "state does not match the basis");
}

int bond_count(const ChainModel& model) {
  return model.boundary == Boundary::periodic ? model.length : model.length - 1;
}

// phi = B_j psi with B_j = b+_j b_{j+1} + h.c.; the wrap bond keeps the twist.
StateVector apply_bond(const StateVector& psi, int j, const ChainModel& model,
                       const OccupationBasis& basis) {
  const int L = model.length;
  const int k = (j + 1) % L;
  const Complex phase = std::polar(1.0, model.twist);
  StateVector phi = StateVector::Zero(psi.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const std::uint32_t s = basis.state(i);
    const bool nj = (s >> j) & 1u;
    const bool nk = (s >> k) & 1u;
    if (nj == nk) continue;
    Complex amp{1.0};
    if (j == L - 1) amp = nk ? phase : std::conj(phase);
    const std::uint32_t target = s ^ (1u << j) ^ (1u << k);
    phi[static_cast<Eigen::Index>(basis.rank(target))] += amp * psi[static_cast<Eigen::Index>(i)];
  }
  return phi;
}

}  // namespace

std::vector<double> site_densities(const StateVector& state, const OccupationBasis& basis) {
  check_state(state, basis);
  std::vector<double> n(static_cast<std::size_t>(basis.length()), 0.0);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double w = std::norm(state[static_cast<Eigen::Index>(i)]);
    std::uint32_t s = basis.state(i);
    for (int j = 0; s != 0; ++j, s >>= 1)
      if (s & 1u) n[static_cast<std::size_t>(j)] += w;
  }
  return n;
}

StructureFactor structure_factor(const StateVector& state, const OccupationBasis& basis) {
  check_state(state, basis);
  const int L = basis.length();
  const double rho = static_cast<double>(basis.particles()) / L;
  // <dn_i dn_j> is diagonal in the occupation basis.
  Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(L, L);
  Eigen::VectorXd dn(L);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double w = std::norm(state[static_cast<Eigen::Index>(i)]);
    if (w == 0.0) continue;
    const std::uint32_t s = basis.state(i);
    for (int j = 0; j < L; ++j) dn[j] = static_cast<double>((s >> j) & 1u) - rho;
    corr.noalias() += w * dn * dn.transpose();
  }
  StructureFactor out;
  const double inv = 1.0 / (static_cast<double>(L) * L);
  for (int m = 0; m < L; ++m) {
    const double q = 2.0 * std::numbers::pi * m / L;
    double s = 0.0;
    for (int a = 0; a < L; ++a)
      for (int b = 0; b < L; ++b) s += corr(a, b) * std::cos(q * (a - b));
    out.q.push_back(q);
    out.s.push_back(s * inv);
  }
  // Peak over q != 0; the first of (near-)equal maxima wins.
  out.s_max = -std::numeric_limits<double>::infinity();
  for (int m = 1; m < L; ++m)
    if (out.s[m] > out.s_max + 1e-12) {
      out.s_max = out.s[m];
      out.q0 = out.q[m];
    }
  if (L == 1) out.s_max = 0.0;
  return out;
}

BondObservables bond_observables(const StateVector& state, const ChainModel& model,
                                 const OccupationBasis& basis) {
  check_state(state, basis);
  const int L = model.length;
  const int bonds = bond_count(model);
  BondObservables out;
  if (bonds < 1) return out;
  std::vector<double> mean(static_cast<std::size_t>(bonds));
  for (int j = 0; j < bonds; ++j)
    mean[j] = std::real(state.dot(apply_bond(state, j, model, basis)));
  for (int j = 0; j < bonds; ++j) out.order += (j % 2 == 0 ? 1.0 : -1.0) * mean[j];
  out.order /= L;

  const int ref = std::min(L / 2, bonds - 1);
  const StateVector phi = apply_bond(state, ref, model, basis);
  for (int j = 0; j < bonds; ++j) {
    const double joint = std::real(apply_bond(state, j, model, basis).dot(phi));
    out.correlator += (j % 2 == 0 ? 1.0 : -1.0) * (joint - mean[j] * mean[ref]);
  }
  out.correlator /= L;
  return out;
}

std::vector<double> edge_profile(const StateVector& state, const ChainModel& model,
                                 const OccupationBasis& basis) {
  if (model.boundary != Boundary::open)
    throw Error(ErrorCode::domain_error, "edge profile needs an open chain");
  return site_densities(state, basis);
}

double berry_phase(const TwistStates& loop) {
  const std::size_t n = loop.size();
  if (n < 2) throw Error(ErrorCode::domain_error, "Berry loop needs at least 2 points");
  const auto k = static_cast<Eigen::Index>(loop[0].size());
  if (k < 1) throw Error(ErrorCode::domain_error, "empty multiplet");
  // Accumulate the argument rather than the product, which can underflow.
  double arg = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = loop[i];
    const auto& b = loop[(i + 1) % n];
    if (static_cast<Eigen::Index>(a.size()) != k || static_cast<Eigen::Index>(b.size()) != k)
      throw Error(ErrorCode::domain_error, "multiplet size changes along the loop");
    Eigen::MatrixXcd overlap(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index c = 0; c < k; ++c) overlap(r, c) = a[r].dot(b[c]);
    const Complex det = overlap.determinant();
    if (std::abs(det) < 1e-12)
      throw Error(ErrorCode::degeneracy_error, "vanishing overlap between twist points");
    arg += std::arg(det);
  }
  const double two_pi = 2.0 * std::numbers::pi;
  double gamma = std::fmod(-arg, two_pi);
  if (gamma < 0.0) gamma += two_pi;
  if (gamma >= two_pi) gamma -= two_pi;
  return gamma;
}

BerryResult berry_phase(const ChainModel& model, const BerryOptions& options) {
  if (model.boundary != Boundary::periodic)
    throw Error(ErrorCode::domain_error, "Berry phase needs a periodic chain");
  if (options.steps < 8) throw Error(ErrorCode::domain_error, "need at least 8 twist steps");
  if (options.multiplet < 1) throw Error(ErrorCode::domain_error, "multiplet must be >= 1");
  model.validate();
  const OccupationBasis basis(model.length, model.n_bosons);
  if (static_cast<std::size_t>(options.multiplet) > basis.size())
    throw Error(ErrorCode::domain_error, "multiplet exceeds the sector dimension");
  const bool gap_above = static_cast<std::size_t>(options.multiplet) < basis.size();
  LanczosOptions lanczos = options.lanczos;
  lanczos.n_states = options.multiplet + (gap_above ? 1 : 0);

  BerryResult result;
  result.min_gap = std::numeric_limits<double>::infinity();
  TwistStates loop;
  for (int i = 0; i < options.steps; ++i) {
    ChainModel twisted = model;
    twisted.twist = 2.0 * std::numbers::pi * i / options.steps;
    EigenStates states = lowest_states(twisted, basis, lanczos);
    if (gap_above) {
      const double gap = states.values[options.multiplet] - states.values[options.multiplet - 1];
      result.min_gap = std::min(result.min_gap, gap);
      if (gap < options.min_gap)
        throw Error(ErrorCode::degeneracy_error,
                    "lowest multiplet is not separated at twist step " + std::to_string(i));
    }
    states.vectors.resize(static_cast<std::size_t>(options.multiplet));
    loop.push_back(std::move(states.vectors));
  }
  result.gamma = berry_phase(loop);
  return result;
}

}  // namespace rkky
