// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
//
// Kernel of the anisotropic 2D gas along the weak axis. The sum over empty
// states factorizes into transverse modes n_z: each mode is an x-only
// problem shifted by a * n_z, closed exactly in x with the resolvent of the
// x operator. Only even modes are nonzero on the z = 0 line.
#include <algorithm>
#include <cmath>

#include "rkky/errors.hpp"
#include "rkky/kernel.hpp"

namespace rkky {

ModeBasis2D kernel_basis_2d(const TrapSpec2D& trap, double cutoff_factor) {
  trap.validate();
  // Smallest cutoff holding N states, then the working cutoff from e_F.
  double e_probe = std::max(1.0, 0.5 + 0.5 * trap.anisotropy);
  for (;;) {
    try {
      const ModeBasis2D probe = build_2d_basis(trap, e_probe);
      const double e_f = probe.energies[static_cast<std::size_t>(trap.n_fermions) - 1];
      return build_2d_basis(trap, std::max(cutoff_factor * e_f, e_probe));
    } catch (const Error& err) {
      if (err.code() != ErrorCode::cutoff_too_small) throw;
      e_probe *= 1.5;
    }
  }
}

RadialKernel mediated_kernel_2d(const ModeBasis2D& basis, int n_fermions,
                                const Kernel2DOptions& options) {
  const double a = basis.anisotropy;
  RadialKernel out;
  if (n_fermions <= 0) {
    out.kr = {0.0};
    out.f = {0.0};
    return out;
  }
  const auto n = static_cast<std::size_t>(n_fermions);
  const FermiLevel fermi = fermi_level(basis, n_fermions);
  out.k_f = fermi.k_f;
  if (!(fermi.k_f > 0.0)) throw Error(ErrorCode::domain_error, "vanishing Fermi momentum");

  // Equal filling of the Fermi shell.
  const double e_f = fermi.energy;
  const double tol = 1e-9 * std::max(1.0, e_f);
  std::size_t below = 0;
  std::size_t shell = 0;
  for (double e : basis.energies) {
    if (e < e_f - tol) ++below;
    else if (e <= e_f + tol) ++shell;
  }
  const double shell_filling =
      static_cast<double>(n - below) / static_cast<double>(shell);
  auto filling_of = [&](double e) {
    if (e < e_f - tol) return 1.0;
    if (e <= e_f + tol) return shell_filling;
    return 0.0;
  };

  // Transverse modes with a nonzero amplitude at z = 0, up to the cutoff.
  const double e_max = basis.energies.back();
  std::vector<int> modes;
  int max_nx_occ = 0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (filling_of(basis.energies[k]) > 0.0)
      max_nx_occ = std::max(max_nx_occ, basis.labels[k].nx);
  }
  for (int nz = 0; a * (nz + 0.5) + 0.5 <= e_max; nz += 2) modes.push_back(nz);

  // x orbitals: every occupied one plus virtual_factor * N above.
  const auto n_orb = static_cast<std::size_t>(max_nx_occ + 1) +
                     static_cast<std::size_t>(std::ceil(options.virtual_factor * n));
  TrapSpec1D xtrap;
  xtrap.n_fermions = max_nx_occ + 1;
  const GridSpec grid = default_grid(xtrap, n_orb, options.grid);
  const Tridiagonal op = build_1d_hamiltonian(xtrap, grid);
  const SpectralBasis orbitals = solve_eigenbasis(op, n_orb);

  std::vector<Channel> channels;
  Occupations occ;
  occ.tolerance = tol;
  occ.abort_on_degenerate = false;
  const double zero_point_scale = std::sqrt(a);
  for (int nz : modes) {
    const double amp = harmonic_eigenfunction(nz, 0.0);
    channels.push_back({a * (nz + 0.5), zero_point_scale * amp * amp});
    std::vector<double> fill(n_orb);
    std::vector<double> energy(n_orb);
    for (std::size_t kx = 0; kx < n_orb; ++kx) {
      energy[kx] = (static_cast<double>(kx) + 0.5) + a * (nz + 0.5);
      fill[kx] = filling_of(energy[kx]);
    }
    occ.filling.push_back(std::move(fill));
    occ.energy.push_back(std::move(energy));
  }
  std::vector<Hole> holes;
  for (std::size_t t = 0; t < modes.size(); ++t)
    for (std::size_t kx = 0; kx < n_orb; ++kx) {
      const double f = occ.filling[t][kx];
      if (f > 0.0) holes.push_back({kx, t, f * channels[t].weight});
    }

  const ParticleHoleSum sum(op, orbitals, channels, std::move(holes), std::move(occ),
                            options.mode);
  const double dkr = grid.step() * fermi.k_f;
  const std::size_t c = grid.center();
  std::size_t count = static_cast<std::size_t>(std::floor(options.kr_max / dkr)) + 1;
  count = std::min(count, 2 * std::min(c, grid.n_points - 1 - c));
  out.f = sum.evaluate(centered_pairs(c, count), options.threads);
  out.kr.resize(count);
  for (std::size_t m = 0; m < count; ++m) out.kr[m] = static_cast<double>(m) * dkr;
  return out;
}

}  // namespace rkky
