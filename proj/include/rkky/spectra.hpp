// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
//
// Single-particle spectra of the fermionic mediator in trap units
// (hbar = omega_x = 1, lengths in units of the oscillator length x_zp).
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rkky {

struct TrapSpec1D {
  int n_fermions = 1;
  double vp_ratio = 0.0;           // lattice depth over the harmonic scale
  std::optional<double> kp_xzp;    // lattice wavenumber; sqrt(N) when unset

  double lattice_wavenumber() const;
  void validate() const;
};

struct TrapSpec2D {
  int n_fermions = 1;
  double anisotropy = 1.0;  // omega_z / omega_x

  void validate() const;
};

// Uniform grid x_i = -half_width + i * step, symmetric about 0.
struct GridSpec {
  double half_width = 0.0;
  std::size_t n_points = 0;

  double step() const { return 2.0 * half_width / static_cast<double>(n_points - 1); }
  double position(std::size_t i) const {
    return -half_width + static_cast<double>(i) * step();
  }
  std::size_t center() const { return n_points / 2; }
  void validate() const;
};

// Symmetric tridiagonal operator; off[i] couples sites i and i+1.
struct Tridiagonal {
  GridSpec grid;
  std::vector<double> diag;
  std::vector<double> off;
};

struct StateLabel {
  int nx = 0;
  int nz = 0;
  friend bool operator==(const StateLabel&, const StateLabel&) = default;
};

// Lowest eigenpairs of a 1D operator, wavefunctions stored state-major and
// normalized so that step * sum psi^2 = 1.
struct SpectralBasis {
  GridSpec grid;
  std::vector<double> energies;
  std::vector<double> samples;
  std::vector<StateLabel> labels;

  std::size_t size() const { return energies.size(); }
  std::span<const double> wavefunction(std::size_t k) const {
    return {samples.data() + k * grid.n_points, grid.n_points};
  }
};

// Analytic tensor-product basis of the anisotropic 2D oscillator.
struct ModeBasis2D {
  double anisotropy = 1.0;
  std::vector<double> energies;
  std::vector<StateLabel> labels;
  std::vector<std::string> warnings;

  std::size_t size() const { return energies.size(); }
  double amplitude(std::size_t k, double xi_x, double xi_z) const;
};

struct FermiLevel {
  double energy = 0.0;
  double k_f = 0.0;  // k_F * x_zp
};

struct GridOptions {
  double box_factor = 1.5;        // half_width over the turning point
  int points_per_wavelength = 12;
  double radial_step = 0.08;      // k_F * step, the radial kernel resolution
};

// Potential of the 1D trap at xi.
double trap_potential(const TrapSpec1D& trap, double xi);

// Default grid for resolving the lowest n_states of the trap.
GridSpec default_grid(const TrapSpec1D& trap, std::size_t n_states,
                      const GridOptions& options = {});

Tridiagonal build_1d_hamiltonian(const TrapSpec1D& trap, const GridSpec& grid);

SpectralBasis solve_eigenbasis(const Tridiagonal& op, std::size_t n_states);

double harmonic_eigenfunction(int n, double xi);

// All eigenfunctions 0..n_max at xi, from one pass of the recurrence.
std::vector<double> harmonic_eigenfunctions(int n_max, double xi);

ModeBasis2D build_2d_basis(const TrapSpec2D& trap, double e_max);

FermiLevel fermi_level(std::span<const double> energies, int n_fermions);

// Fermi level of the 2D gas, with k_F taken from the lowest transverse
// subband so that the 1D limit is continuous.
FermiLevel fermi_level(const ModeBasis2D& basis, int n_fermions);

// Level spacing at the Fermi energy among states that carry weight in the
// central region |xi| < fraction * (Fermi radius). States bound to the cloud
// edge are ignored, so a band gap at the center shows up even when in-gap
// edge states close the global gap.
struct CentralGap {
  double global_gap = 0.0;
  double central_gap = 0.0;
  double lower = 0.0;  // highest central occupied level
  double upper = 0.0;  // lowest central empty level
};
CentralGap central_gap(const SpectralBasis& basis, int n_fermions,
                       double fraction = 0.25, double min_weight = 1e-3);

}  // namespace rkky
