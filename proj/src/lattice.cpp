// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
#include "rkky/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rkky/errors.hpp"
#include "rkky/parallel.hpp"

namespace rkky {

namespace {

constexpr double kReach = 8.0;  // window half-width in standard deviations

// Shared window checks; returns the smoothing standard deviation.
double check_window(const RadialKernel& radial, double sigma_kf, double kr) {
  if (radial.size() < 2) throw Error(ErrorCode::resolution_error, "kernel has < 2 samples");
  const double s = std::numbers::sqrt2 * sigma_kf;
  if (!(s > 0.0)) throw Error(ErrorCode::domain_error, "Wannier width must be > 0");
  if (4.0 * s / radial.step() < 6.0)
    throw Error(ErrorCode::resolution_error,
                "Gaussian spans fewer than 6 kernel samples; refine the kernel grid");
  if (kr + kReach * s > radial.kr.back() * (1.0 + 1e-12))
    throw Error(ErrorCode::range_error, "distance plus smoothing window exceeds kernel range");
  return s;
}

// exp(-x) I0(x) for x >= 0.
double bessel_i0_scaled(double x) {
  if (x < 500.0) return std::cyl_bessel_i(0.0, x) * std::exp(-x);
  const double t = 1.0 / (8.0 * x);
  return (1.0 + t * (1.0 + 4.5 * t * (1.0 + 25.0 / 3.0 * t))) /
         std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace

void WannierSpec::validate() const {
  if (!(width_ratio > 0.0 && width_ratio < 0.5))
    throw Error(ErrorCode::domain_error, "width_ratio must be in (0, 0.5)");
  if (!(spacing_kf > 0.0)) throw Error(ErrorCode::domain_error, "spacing_kf must be > 0");
}

double smeared_value(const RadialKernel& radial, double sigma_kf, double kr) {
  const double s = check_window(radial, sigma_kf, kr);
  const double dx = radial.step();
  const double lo = kr - kReach * s;
  const double hi = kr + kReach * s;
  const auto first = static_cast<std::ptrdiff_t>(std::ceil(lo / dx));
  const auto last = static_cast<std::ptrdiff_t>(std::floor(hi / dx));
  double num = 0.0;
  double den = 0.0;
  for (std::ptrdiff_t i = first; i <= last; ++i) {
    const auto idx = static_cast<std::size_t>(std::abs(i));
    const double y = static_cast<double>(i) * dx;
    const double u = (kr - y) / s;
    const double w = std::exp(-0.5 * u * u);
    num += w * radial.f[idx];
    den += w;
  }
  return num / den;
}

RadialKernel smear_kernel(const RadialKernel& radial, const WannierSpec& wannier) {
  wannier.validate();
  const double s = std::numbers::sqrt2 * wannier.sigma_kf();
  RadialKernel out;
  out.k_f = radial.k_f;
  out.origin = radial.origin;
  for (std::size_t i = 0; i < radial.size(); ++i) {
    if (radial.kr[i] + kReach * s > radial.kr.back()) break;
    out.kr.push_back(radial.kr[i]);
    out.f.push_back(smeared_value(radial, wannier.sigma_kf(), radial.kr[i]));
  }
  if (out.kr.empty()) throw Error(ErrorCode::range_error, "smoothing window exceeds kernel range");
  return out;
}

CouplingTable coupling_table(const RadialKernel& radial, const WannierSpec& wannier,
                             int max_range) {
  wannier.validate();
  if (max_range < 1) throw Error(ErrorCode::domain_error, "max_range must be >= 1");
  CouplingTable table;
  table.spacing_kf = wannier.spacing_kf;
  for (int s = 1; s <= max_range; ++s)
    table.couplings.push_back(
        smeared_value(radial, wannier.sigma_kf(), s * wannier.spacing_kf));
  return table;
}

RatioScan ratio_scan(std::span<const VpKernel> kernels, std::span<const double> spacings,
                     double width_ratio) {
  if (kernels.empty() || spacings.empty())
    throw Error(ErrorCode::domain_error, "ratio scan grids must be nonempty");
  RatioScan scan;
  std::optional<double> best;
  for (const auto& k : kernels) {
    double peak = 0.0;
    for (double v : k.radial.f) peak = std::max(peak, std::abs(v));
    for (double d : spacings) {
      const CouplingTable t = coupling_table(k.radial, {width_ratio, d}, 3);
      RatioCell cell{k.vp_ratio, d, 0.0, 0.0, false};
      const double v1 = t.couplings[0];
      if (std::abs(v1) < 1e-12 * peak) {
        cell.undefined = true;
      } else {
        cell.v2_over_v1 = t.couplings[1] / v1;
        cell.v3_over_v1 = t.couplings[2] / v1;
        const double miss = std::abs(cell.v2_over_v1 - 0.5);
        if (std::abs(cell.v3_over_v1) < 0.1 && (!best || miss < *best)) {
          best = miss;
          scan.bow_target = scan.cells.size();
        }
      }
      scan.cells.push_back(cell);
    }
  }
  return scan;
}

RatioScan ratio_scan(std::span<const TrapSpec1D> traps, std::span<const double> spacings,
                     double width_ratio, const KernelOptions& options,
                     const ProfileOptions& profile, const GridOptions& grid) {
  std::vector<VpKernel> kernels(traps.size());
  KernelOptions inner = options;
  inner.threads = 1;
  parallel_for(traps.size(), options.threads, [&](std::size_t i) {
    const MediatedKernel1D k = mediated_kernel_1d(traps[i], inner, grid);
    kernels[i] = {traps[i].vp_ratio, radial_profile(k, profile)};
  });
  return ratio_scan(kernels, spacings, width_ratio);
}

std::array<double, 3> kagome_distances(double d) {
  if (!(d > 0.0)) throw Error(ErrorCode::domain_error, "spacing must be > 0");
  return {d, std::sqrt(3.0) * d, 2.0 * d};
}

double smeared_value_2d(const RadialKernel& radial, double sigma_kf, double kr) {
  const double s = check_window(radial, sigma_kf, kr);
  const double s2 = s * s;
  const double dx = radial.step();
  const double lo = std::max(0.0, kr - kReach * s);
  const double hi = kr + kReach * s;
  const auto first = static_cast<std::size_t>(std::ceil(lo / dx));
  const auto last = static_cast<std::size_t>(std::floor(hi / dx));
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = first; i <= last; ++i) {
    const double rho = radial.kr[i];
    const double u = (rho - kr) / s;
    // rho exp(-(rho^2 + R^2) / 2s^2) I0(rho R / s^2), written with the
    // scaled Bessel function to stay finite.
    const double w = rho * std::exp(-0.5 * u * u) * bessel_i0_scaled(rho * kr / s2);
    num += w * radial.f[i];
    den += w;
  }
  if (den <= 0.0) throw Error(ErrorCode::resolution_error, "empty smoothing window");
  return num / den;
}

KagomeCouplings kagome_couplings(const RadialKernel& radial2d, const WannierSpec& wannier) {
  wannier.validate();
  const auto r = kagome_distances(wannier.spacing_kf);
  const double sigma = wannier.sigma_kf();
  return {smeared_value_2d(radial2d, sigma, r[0]), smeared_value_2d(radial2d, sigma, r[1]),
          smeared_value_2d(radial2d, sigma, r[2])};
}

std::vector<FrustrationCandidate> frustration_search(std::span<const KagomeCell> cells,
                                                     double tol_v1, double tol_23) {
  std::vector<FrustrationCandidate> out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& v = cells[i].v;
    const double scale = std::max(std::abs(v.v2), std::abs(v.v3));
    if (scale == 0.0) continue;
    const double a = std::abs(v.v1) / scale;
    const double b = std::abs(v.v2 - v.v3) / scale;
    if (a <= tol_v1 && b <= tol_23) out.push_back({i, a + b});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& x, const auto& y) { return x.score < y.score; });
  return out;
}

std::vector<std::size_t> sign_change_cells(std::span<const KagomeCell> cells,
                                           std::size_t rows, std::size_t cols) {
  if (cells.size() != rows * cols)
    throw Error(ErrorCode::domain_error, "scan shape does not match the cell count");
  auto sign = [&](std::size_t r, std::size_t c) {
    const double v = cells[r * cols + c].v.v1;
    return (v > 0.0) - (v < 0.0);
  };
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const int s = sign(r, c);
      bool edge = s == 0;
      if (r > 0) edge = edge || sign(r - 1, c) != s;
      if (r + 1 < rows) edge = edge || sign(r + 1, c) != s;
      if (c > 0) edge = edge || sign(r, c - 1) != s;
      if (c + 1 < cols) edge = edge || sign(r, c + 1) != s;
      if (edge) out.push_back(r * cols + c);
    }
  return out;
}

}  // namespace rkky
