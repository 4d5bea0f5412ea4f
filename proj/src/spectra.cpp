// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
#include "rkky/spectra.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "rkky/errors.hpp"

namespace rkky {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

double TrapSpec1D::lattice_wavenumber() const {
  return kp_xzp ? *kp_xzp : std::sqrt(static_cast<double>(n_fermions));
}

void TrapSpec1D::validate() const {
  if (n_fermions < 1)
    throw Error(ErrorCode::domain_error, "n_fermions must be >= 1");
  if (!(vp_ratio >= 0.0))
    throw Error(ErrorCode::domain_error, "vp_ratio must be >= 0");
  if (kp_xzp && !(*kp_xzp > 0.0))
    throw Error(ErrorCode::domain_error, "kp_xzp must be > 0");
}

void TrapSpec2D::validate() const {
  if (n_fermions < 1)
    throw Error(ErrorCode::domain_error, "n_fermions must be >= 1");
  if (!(anisotropy > 0.0))
    throw Error(ErrorCode::domain_error, "anisotropy must be > 0");
}

void GridSpec::validate() const {
  if (n_points < 2) throw Error(ErrorCode::domain_error, "grid needs >= 2 points");
  if (!(half_width > 0.0))
    throw Error(ErrorCode::domain_error, "grid half_width must be > 0");
}

double trap_potential(const TrapSpec1D& trap, double xi) {
  const double s = std::sin(trap.lattice_wavenumber() * xi);
  return 0.25 * xi * xi + 0.25 * trap.vp_ratio * s * s;
}

GridSpec default_grid(const TrapSpec1D& trap, std::size_t n_states,
                      const GridOptions& options) {
  trap.validate();
  // Upper bounds: the lattice adds at most vp/4 to any level, and the box
  // is sized from n_states rather than n_states - 1/2 to clear the check in
  // solve_eigenbasis strictly.
  const double lift = 0.25 * trap.vp_ratio;
  const double e_max = static_cast<double>(n_states) + lift;
  const double e_fermi = static_cast<double>(trap.n_fermions) - 0.5 + lift;
  const double half_width = options.box_factor * 2.0 * std::sqrt(e_max);

  const double ppw = options.points_per_wavelength;
  double step = 2.0 * kPi / std::sqrt(e_max) / ppw;
  if (trap.vp_ratio > 0.0)
    step = std::min(step, kPi / trap.lattice_wavenumber() / ppw);
  step = std::min(step, options.radial_step / std::sqrt(e_fermi));

  const auto half = static_cast<std::size_t>(std::ceil(half_width / step));
  return GridSpec{half_width, 2 * half + 1};
}

Tridiagonal build_1d_hamiltonian(const TrapSpec1D& trap, const GridSpec& grid) {
  grid.validate();
  const double h = grid.step();
  const double hop = 1.0 / (h * h);
  Tridiagonal op{grid, std::vector<double>(grid.n_points),
                 std::vector<double>(grid.n_points - 1, -hop)};
  for (std::size_t i = 0; i < grid.n_points; ++i)
    op.diag[i] = 2.0 * hop + trap_potential(trap, grid.position(i));
  return op;
}

SpectralBasis solve_eigenbasis(const Tridiagonal& op, std::size_t n_states) {
  const GridSpec& grid = op.grid;
  grid.validate();
  const auto n = static_cast<lapack_int>(grid.n_points);
  if (n_states == 0 || n_states > grid.n_points)
    throw Error(ErrorCode::insufficient_basis,
                "n_states must be in [1, n_points]");
  const double turning = 2.0 * std::sqrt(static_cast<double>(n_states) - 0.5);
  if (!(grid.half_width > 1.5 * turning))
    throw Error(ErrorCode::box_too_small,
                "half_width " + fmt_double(grid.half_width) +
                    " must exceed 1.5 x turning point " + fmt_double(turning));

  std::vector<double> d = op.diag;
  std::vector<double> e(op.off);
  e.resize(grid.n_points, 0.0);
  const auto k = static_cast<lapack_int>(n_states);
  std::vector<double> w(grid.n_points);
  std::vector<double> z(grid.n_points * n_states);
  std::vector<lapack_int> support(2 * n_states);
  lapack_int found = 0;
  lapack_logical tryrac = 1;
  const lapack_int info = LAPACKE_dstemr(
      LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0, 1, k, &found,
      w.data(), z.data(), n, k, support.data(), &tryrac);
  if (info != 0 || found != k)
    throw Error(ErrorCode::convergence_failure,
                "tridiagonal eigensolver failed (info=" + std::to_string(info) + ")");

  SpectralBasis basis;
  basis.grid = grid;
  basis.energies.assign(w.begin(), w.begin() + k);
  basis.labels.resize(n_states);
  const double scale = 1.0 / std::sqrt(grid.step());
  for (std::size_t s = 0; s < n_states; ++s) {
    basis.labels[s] = {static_cast<int>(s), 0};
    auto col = std::span(z).subspan(s * grid.n_points, grid.n_points);
    double peak = 0.0;
    for (double v : col) peak = std::max(peak, std::abs(v));
    // Leftmost significant sample positive; tail samples are roundoff.
    double sign = 1.0;
    for (double v : col) {
      if (std::abs(v) > 1e-8 * peak) {
        sign = v > 0.0 ? 1.0 : -1.0;
        break;
      }
    }
    for (double& v : col) v *= sign * scale;
  }
  basis.samples = std::move(z);
  return basis;
}

std::vector<double> harmonic_eigenfunctions(int n_max, double xi) {
  if (n_max < 0) throw Error(ErrorCode::domain_error, "n must be >= 0");
  // Recurrence on rescaled values; each entry remembers the log scale that
  // was current when it was produced.
  std::vector<double> value(n_max + 1);
  std::vector<double> log_scale(n_max + 1);
  double log_s = -0.25 * xi * xi - 0.25 * std::log(2.0 * kPi);
  double prev = 0.0;
  double cur = 1.0;
  value[0] = cur;
  log_scale[0] = log_s;
  for (int n = 0; n < n_max; ++n) {
    const double next = (xi * cur - std::sqrt(static_cast<double>(n)) * prev) /
                        std::sqrt(static_cast<double>(n + 1));
    prev = cur;
    cur = next;
    if (std::abs(cur) > 1e150) {
      prev /= 1e150;
      cur /= 1e150;
      log_s += std::log(1e150);
    }
    value[n + 1] = cur;
    log_scale[n + 1] = log_s;
  }
  std::vector<double> out(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    if (value[n] == 0.0) continue;
    const double mag = std::log(std::abs(value[n])) + log_scale[n];
    out[n] = std::copysign(std::exp(mag), value[n]);
  }
  return out;
}

double harmonic_eigenfunction(int n, double xi) {
  return harmonic_eigenfunctions(n, xi).back();
}

double ModeBasis2D::amplitude(std::size_t k, double xi_x, double xi_z) const {
  const StateLabel& l = labels.at(k);
  return harmonic_eigenfunction(l.nx, xi_x) * std::pow(anisotropy, 0.25) *
         harmonic_eigenfunction(l.nz, std::sqrt(anisotropy) * xi_z);
}

ModeBasis2D build_2d_basis(const TrapSpec2D& trap, double e_max) {
  trap.validate();
  const double a = trap.anisotropy;
  struct Entry {
    double energy;
    StateLabel label;
  };
  std::vector<Entry> entries;
  for (int nz = 0; a * (nz + 0.5) + 0.5 <= e_max; ++nz)
    for (int nx = 0; (nx + 0.5) + a * (nz + 0.5) <= e_max; ++nx)
      entries.push_back({(nx + 0.5) + a * (nz + 0.5), {nx, nz}});
  if (entries.size() < static_cast<std::size_t>(trap.n_fermions))
    throw Error(ErrorCode::cutoff_too_small,
                "only " + std::to_string(entries.size()) + " states below e_max");

  // Snap energies equal up to roundoff onto one value so the lexicographic
  // tie-break sees them as degenerate.
  std::sort(entries.begin(), entries.end(),
            [](const Entry& x, const Entry& y) { return x.energy < y.energy; });
  double anchor = entries.front().energy;
  for (auto& en : entries) {
    if (std::abs(en.energy - anchor) <= 1e-9 * std::max(1.0, std::abs(anchor)))
      en.energy = anchor;
    else
      anchor = en.energy;
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    if (x.energy != y.energy) return x.energy < y.energy;
    if (x.label.nx != y.label.nx) return x.label.nx < y.label.nx;
    return x.label.nz < y.label.nz;
  });

  ModeBasis2D basis;
  basis.anisotropy = a;
  for (const auto& en : entries) {
    basis.energies.push_back(en.energy);
    basis.labels.push_back(en.label);
  }
  const auto n = static_cast<std::size_t>(trap.n_fermions);
  if (n < basis.size() && basis.energies[n] == basis.energies[n - 1]) {
    basis.warnings.push_back("open shell at the Fermi level: energy " +
                             fmt_double(basis.energies[n - 1]));
  }
  return basis;
}

FermiLevel fermi_level(std::span<const double> energies, int n_fermions) {
  if (n_fermions <= 0) return {};
  if (energies.size() < static_cast<std::size_t>(n_fermions))
    throw Error(ErrorCode::insufficient_basis, "basis holds fewer states than fermions");
  const double e = energies[n_fermions - 1];
  return {e, std::sqrt(std::max(e, 0.0))};
}

FermiLevel fermi_level(const ModeBasis2D& basis, int n_fermions) {
  FermiLevel level = fermi_level(basis.energies, n_fermions);
  if (n_fermions > 0)
    level.k_f = std::sqrt(std::max(level.energy - 0.5 * basis.anisotropy, 0.0));
  return level;
}

CentralGap central_gap(const SpectralBasis& basis, int n_fermions,
                       double fraction, double min_weight) {
  const auto n = static_cast<std::size_t>(n_fermions);
  if (n_fermions < 1 || basis.size() <= n)
    throw Error(ErrorCode::insufficient_basis, "central gap needs N+1 states");
  const double radius = fraction * 2.0 * std::sqrt(basis.energies[n - 1]);
  const GridSpec& g = basis.grid;
  auto weight = [&](std::size_t k) {
    const auto psi = basis.wavefunction(k);
    double sum = 0.0;
    for (std::size_t i = 0; i < g.n_points; ++i)
      if (std::abs(g.position(i)) < radius) sum += psi[i] * psi[i];
    return sum * g.step();
  };
  CentralGap gap;
  gap.global_gap = basis.energies[n] - basis.energies[n - 1];
  gap.lower = basis.energies.front();
  for (std::size_t k = n; k-- > 0;) {
    if (weight(k) >= min_weight) {
      gap.lower = basis.energies[k];
      break;
    }
  }
  gap.upper = basis.energies.back();
  for (std::size_t k = n; k < basis.size(); ++k) {
    if (weight(k) >= min_weight) {
      gap.upper = basis.energies[k];
      break;
    }
  }
  gap.central_gap = gap.upper - gap.lower;
  return gap;
}

}  // namespace rkky
