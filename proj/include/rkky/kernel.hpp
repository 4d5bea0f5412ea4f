// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
//
// Fermion-mediated interaction kernel from the second-order particle-hole
// sum F(x, x') = -sum_{n occ, m empty} psi_n psi_m psi_n' psi_m' / (e_m - e_n).
// The coupling prefactor is set to one; physical kernels are G * F.
#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rkky/resolvent.hpp"
#include "rkky/spectra.hpp"

namespace rkky {

// How the sum over empty states is closed beyond the explicit virtual states.
enum class VirtualSum {
  complete,   // explicit states plus a resolvent for all the rest
  truncated,  // explicit states only
};

struct KernelOptions {
  double virtual_factor = 4.0;  // M = virtual_factor * N explicit empty states
  VirtualSum mode = VirtualSum::complete;
  int threads = 1;
};

// F sampled on a uniform distance grid, r in units of 1/k_F.
struct RadialKernel {
  std::vector<double> kr;
  std::vector<double> f;
  double k_f = 0.0;
  double residual = 0.0;  // translation-invariance residual, relative
  std::string origin;

  std::size_t size() const { return kr.size(); }
  double step() const { return kr.size() > 1 ? kr[1] - kr[0] : 0.0; }
};

// One excitation channel of the generic particle-hole sum: the orbitals of a
// tridiagonal operator shifted by a constant energy, with a weight applied
// at the evaluation points. 1D kernels use a single channel; the 2D kernel
// has one per transverse mode.
struct Channel {
  double shift = 0.0;
  double weight = 1.0;
};

// Occupied orbital `orbital` of channel `channel`, entering with `weight`
// (occupation times channel weight).
struct Hole {
  std::size_t orbital = 0;
  std::size_t channel = 0;
  double weight = 1.0;
};

// Fractional occupation of (orbital, channel) and whether the pair
// (hole, target) is excluded as degenerate.
struct Occupations {
  std::vector<std::vector<double>> filling;  // [channel][orbital]
  std::vector<std::vector<double>> energy;   // exact level energies for degeneracy tests
  double tolerance = 1e-9;
  bool abort_on_degenerate = true;  // throw instead of skipping a degenerate pair
};

// Particle-hole sum over an orbital set of one tridiagonal operator.
class ParticleHoleSum {
 public:
  ParticleHoleSum(const Tridiagonal& op, const SpectralBasis& orbitals,
                  std::vector<Channel> channels, std::vector<Hole> holes,
                  Occupations occupations, VirtualSum mode);

  // F at each index pair.
  std::vector<double> evaluate(std::span<const IndexPair> pairs, int threads) const;

 private:
  std::vector<double> hole_term(const Hole& hole, std::span<const IndexPair> pairs,
                                std::span<const double> products) const;

  const Tridiagonal* op_;
  const SpectralBasis* orbitals_;
  std::vector<Channel> channels_;
  std::vector<Hole> holes_;
  Occupations occupations_;
  VirtualSum mode_;
};

// Mediated kernel of a 1D trap, evaluable at any pair of grid points.
class MediatedKernel1D {
 public:
  MediatedKernel1D(Tridiagonal op, SpectralBasis basis, int n_fermions,
                   const KernelOptions& options);

  double operator()(std::size_t i, std::size_t j) const;
  std::vector<double> evaluate(std::span<const IndexPair> pairs) const;

  const GridSpec& grid() const { return op_->grid; }
  const SpectralBasis& basis() const { return *basis_; }
  int n_fermions() const { return n_fermions_; }
  double k_f() const { return fermi_.k_f; }
  double fermi_energy() const { return fermi_.energy; }

 private:
  std::shared_ptr<const Tridiagonal> op_;
  std::shared_ptr<const SpectralBasis> basis_;
  int n_fermions_;
  FermiLevel fermi_;
  KernelOptions options_;
  std::unique_ptr<ParticleHoleSum> sum_;
};

MediatedKernel1D mediated_kernel_1d(Tridiagonal op, SpectralBasis basis, int n_fermions,
                                    const KernelOptions& options = {});

// Solves the trap and builds its kernel with the default grid for the
// requested number of explicit states.
MediatedKernel1D mediated_kernel_1d(const TrapSpec1D& trap, const KernelOptions& options = {},
                                    const GridOptions& grid = {});

struct ProfileOptions {
  double kr_max = 40.0;
  double residual_kr_max = 10.0;
  std::vector<double> residual_offsets = {1.25, 2.5, 3.75, 5.0};  // x_zp units
};

// F(-r/2, r/2) along the centered pair chain, plus the largest change of F
// when the pair is shifted by the residual offsets.
RadialKernel radial_profile(const MediatedKernel1D& kernel, const ProfileOptions& options = {});

double asymptotic_f1d(double kfr);
double asymptotic_f2d(double kfr);

struct Extremum {
  double kr = 0.0;
  double f = 0.0;
};

std::vector<Extremum> extract_maxima(const RadialKernel& radial);

// Maxima with kr inside (lo, hi].
std::vector<Extremum> window(std::span<const Extremum> maxima, double lo, double hi);

struct DecayFit {
  double ell = 0.0;        // +inf when the envelope does not decay faster than 1/r
  double amplitude = 0.0;
  double residual = 0.0;   // RMS of the log-envelope residuals
};

DecayFit fit_yukawa(std::span<const Extremum> maxima);

// Linear interpolation on the sampled range.
double interpolate(const RadialKernel& radial, double kr);

struct ShapeComparison {
  double scale = 1.0;      // least-squares factor applied to `test`
  double deviation = 0.0;  // largest relative miss at the extrema
};

// Compares kernel shapes: `test` is scaled by the least-squares factor onto
// `reference` over (lo, hi], then the largest |scaled - reference| / |reference|
// is taken over the maxima and minima of `reference` in that window.
ShapeComparison compare_shapes(const RadialKernel& test, const RadialKernel& reference,
                               double lo, double hi);

// Envelope check against the asymptotic form of dimension 1 or 2: each
// extremum of F in (lo, hi] is paired with the nearest same-sign extremum of
// the asymptotic form, one global scale is fitted to the heights, and the
// largest relative departure is reported.
struct EnvelopeFit {
  double scale = 0.0;
  double error = 0.0;
  std::size_t extrema = 0;
};
EnvelopeFit envelope_error(const RadialKernel& radial, int dimension, double lo, double hi);

struct Kernel2DOptions {
  double cutoff_factor = 3.0;   // transverse modes up to cutoff_factor * e_F
  double virtual_factor = 4.0;  // explicit x orbitals beyond the occupied ones, per fermion
  VirtualSum mode = VirtualSum::complete;
  double kr_max = 40.0;
  GridOptions grid;
  int threads = 1;
};

// Basis for the 2D kernel: all modes below cutoff_factor * e_F.
ModeBasis2D kernel_basis_2d(const TrapSpec2D& trap, double cutoff_factor = 3.0);

// F between (-r/2, 0) and (r/2, 0). Degenerate Fermi shells are filled
// evenly; pairs inside one shell carry no excitation energy and are skipped.
RadialKernel mediated_kernel_2d(const ModeBasis2D& basis, int n_fermions,
                                const Kernel2DOptions& options = {});

struct SpectrumSamples {
  std::vector<double> k;  // units of k_F
  std::vector<double> amplitude;
};

SpectrumSamples cosine_transform(const RadialKernel& radial, double kr_min, double kr_max,
                                 std::size_t n_k = 301, double k_max = 3.0);

// Local maxima of |amplitude|, largest first.
std::vector<Extremum> spectrum_peaks(const SpectrumSamples& spectrum);

std::vector<double> predicted_beat_frequencies(double k_f, double anisotropy, int n_fermions,
                                               int n_max);

}  // namespace rkky
