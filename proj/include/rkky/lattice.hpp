// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
//
// Lattice couplings from a radial kernel: both sites carry Gaussian Wannier
// densities of width sigma, so the pair interaction is the kernel smoothed
// by one Gaussian of variance 2 sigma^2.
#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rkky/kernel.hpp"

namespace rkky {

struct WannierSpec {
  double width_ratio = 0.17;  // x_width / d
  double spacing_kf = 1.0;    // k_F * d

  double sigma_kf() const { return width_ratio * spacing_kf; }
  void validate() const;
};

struct CouplingTable {
  std::vector<double> couplings;  // v_1 .. v_R
  double spacing_kf = 0.0;

  int max_range() const { return static_cast<int>(couplings.size()); }
};

struct KagomeCouplings {
  double v1 = 0.0;
  double v2 = 0.0;
  double v3 = 0.0;
};

// Smoothed kernel at one distance (units 1/k_F), 1D Gaussian, even extension
// of F about r = 0.
double smeared_value(const RadialKernel& radial, double sigma_kf, double kr);

// Smoothed kernel on every grid point whose Gaussian window lies inside the
// sampled range.
RadialKernel smear_kernel(const RadialKernel& radial, const WannierSpec& wannier);

CouplingTable coupling_table(const RadialKernel& radial, const WannierSpec& wannier,
                             int max_range);

struct RatioCell {
  double vp_ratio = 0.0;
  double spacing_kf = 0.0;
  double v2_over_v1 = 0.0;
  double v3_over_v1 = 0.0;
  bool undefined = false;  // |v1| negligible, ratios not formed
};

struct RatioScan {
  std::vector<RatioCell> cells;          // vp-major, then spacing
  std::optional<std::size_t> bow_target; // index into cells
};

// One kernel per vp_ratio, reused for every spacing.
struct VpKernel {
  double vp_ratio = 0.0;
  RadialKernel radial;
};

RatioScan ratio_scan(std::span<const VpKernel> kernels, std::span<const double> spacings,
                     double width_ratio);

// Computes the kernels first (one per trap), in parallel over traps.
RatioScan ratio_scan(std::span<const TrapSpec1D> traps, std::span<const double> spacings,
                     double width_ratio, const KernelOptions& options = {},
                     const ProfileOptions& profile = {}, const GridOptions& grid = {});

std::array<double, 3> kagome_distances(double d);

// Smoothed 2D kernel with an isotropic Gaussian of variance 2 sigma^2 per
// axis, reduced to a radial integral with the modified Bessel function I0.
double smeared_value_2d(const RadialKernel& radial, double sigma_kf, double kr);

KagomeCouplings kagome_couplings(const RadialKernel& radial2d, const WannierSpec& wannier);

struct KagomeCell {
  double anis_over_n = 0.0;
  double spacing_kf = 0.0;
  KagomeCouplings v;
};

struct FrustrationCandidate {
  std::size_t cell = 0;
  double score = 0.0;
};

std::vector<FrustrationCandidate> frustration_search(std::span<const KagomeCell> cells,
                                                     double tol_v1, double tol_23);

// Cells of a rows x cols scan (row-major) with a grid neighbour of opposite
// v1 sign, i.e. cells touching the v1 = 0 contour.
std::vector<std::size_t> sign_change_cells(std::span<const KagomeCell> cells,
                                           std::size_t rows, std::size_t cols);

}  // namespace rkky
