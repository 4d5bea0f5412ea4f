// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
#include "rkky/kernel.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rkky/errors.hpp"
#include "rkky/parallel.hpp"

namespace rkky {

namespace {

constexpr double kPi = std::numbers::pi;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

ParticleHoleSum::ParticleHoleSum(const Tridiagonal& op, const SpectralBasis& orbitals,
                                 std::vector<Channel> channels, std::vector<Hole> holes,
                                 Occupations occupations, VirtualSum mode)
    : op_(&op),
      orbitals_(&orbitals),
      channels_(std::move(channels)),
      holes_(std::move(holes)),
      occupations_(std::move(occupations)),
      mode_(mode) {
  if (occupations_.filling.size() != channels_.size() ||
      occupations_.energy.size() != channels_.size())
    throw Error(ErrorCode::domain_error, "occupation tables must match the channels");
  for (std::size_t t = 0; t < channels_.size(); ++t)
    if (occupations_.filling[t].size() != orbitals.size() ||
        occupations_.energy[t].size() != orbitals.size())
      throw Error(ErrorCode::domain_error, "occupation tables must match the orbitals");
  if (occupations_.abort_on_degenerate) {
    for (const Hole& h : holes_) {
      const double e_hole = occupations_.energy[h.channel][h.orbital];
      for (std::size_t t = 0; t < channels_.size(); ++t)
        for (std::size_t k = 0; k < orbitals.size(); ++k) {
          if (t == h.channel && k == h.orbital) continue;
          if (occupations_.filling[t][k] >= 1.0) continue;
          if (std::abs(occupations_.energy[t][k] - e_hole) < occupations_.tolerance)
            throw Error(ErrorCode::degenerate_denominator,
                        "empty level degenerate with an occupied one (open shell)");
        }
    }
  }
}

std::vector<double> ParticleHoleSum::hole_term(const Hole& hole,
                                               std::span<const IndexPair> pairs,
                                               std::span<const double> products) const {
  const std::size_t count = pairs.size();
  const std::size_t nk = orbitals_->size();
  const auto& levels = orbitals_->energies;
  const double inv_h = 1.0 / orbitals_->grid.step();
  const double e_hole = occupations_.energy[hole.channel][hole.orbital];
  Eigen::Map<const RowMatrix> product(products.data(), static_cast<Eigen::Index>(count),
                                      static_cast<Eigen::Index>(nk));
  TridiagonalResolvent resolvent(*op_);

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(count));
  Eigen::VectorXd coef(static_cast<Eigen::Index>(nk));
  Eigen::VectorXd g_up(static_cast<Eigen::Index>(count));
  Eigen::VectorXd g_down(static_cast<Eigen::Index>(count));

  for (std::size_t t = 0; t < channels_.size(); ++t) {
    // Energy the target channel's orbitals are measured against.
    const double level =
        levels[hole.orbital] + channels_[hole.channel].shift - channels_[t].shift;
    const auto& filling = occupations_.filling[t];
    const auto& exact = occupations_.energy[t];

    // The pole of the hole itself is removed by averaging G(level +- eta);
    // the remaining eta^2 bias is cancelled by extrapolating from eta and 2 eta.
    double eta = 0.0;
    if (mode_ == VirtualSum::complete) {
      double dist = 1.0;
      for (std::size_t k = 0; k < nk; ++k) {
        if (t == hole.channel && k == hole.orbital) continue;
        const double gap = std::abs(levels[k] - level);
        if (gap > 1e-10) dist = std::min(dist, gap);
      }
      eta = 0.05 * dist;
    }
    auto averaged = [](double delta, double step) { return delta / (delta * delta - step * step); };
    auto in_resolvent = [&](double delta) {
      return (4.0 * averaged(delta, eta) - averaged(delta, 2.0 * eta)) / 3.0;
    };

    bool any = false;
    for (std::size_t k = 0; k < nk; ++k) {
      double c = 0.0;
      if (!(t == hole.channel && k == hole.orbital)) {
        const double delta = levels[k] - level;
        const double empty = 1.0 - filling[k];
        const bool degenerate =
            std::abs(exact[k] - e_hole) < occupations_.tolerance;
        if (mode_ == VirtualSum::complete) {
          // The resolvent part holds in_resolvent(delta) for every orbital;
          // swap that for the exact weight of the explicit ones.
          const double held = in_resolvent(delta);
          c = (!degenerate && empty > 0.0) ? empty / delta - held : -held;
        } else if (!degenerate && empty > 0.0) {
          c = empty / delta;
        }
      }
      coef[static_cast<Eigen::Index>(k)] = c;
      any = any || c != 0.0;
    }

    Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(count));
    if (any) u.noalias() = product * coef;
    if (mode_ == VirtualSum::complete) {
      auto average = [&](double step) {
        resolvent.evaluate(level + step, pairs, {g_up.data(), count});
        resolvent.evaluate(level - step, pairs, {g_down.data(), count});
        return Eigen::VectorXd(0.5 * (g_up + g_down));
      };
      const Eigen::VectorXd near = average(eta);
      const Eigen::VectorXd far = average(2.0 * eta);
      u += (inv_h / 3.0) * (4.0 * near - far);
    }
    acc += channels_[t].weight * u;
  }

  std::vector<double> term(count);
  for (std::size_t m = 0; m < count; ++m)
    term[m] = -hole.weight * products[m * nk + hole.orbital] * acc[static_cast<Eigen::Index>(m)];
  return term;
}

std::vector<double> ParticleHoleSum::evaluate(std::span<const IndexPair> pairs,
                                              int threads) const {
  const std::size_t count = pairs.size();
  const std::size_t nk = orbitals_->size();
  std::vector<double> products(count * nk);
  for (std::size_t k = 0; k < nk; ++k) {
    const auto psi = orbitals_->wavefunction(k);
    for (std::size_t m = 0; m < count; ++m)
      products[m * nk + k] = psi[pairs[m].first] * psi[pairs[m].second];
  }
  std::vector<std::vector<double>> terms(holes_.size());
  parallel_for(holes_.size(), threads,
               [&](std::size_t h) { terms[h] = hole_term(holes_[h], pairs, products); });

  // Fixed-order reduction, independent of the thread count.
  std::vector<double> f(count, 0.0);
  for (const auto& term : terms)
    for (std::size_t m = 0; m < count; ++m) f[m] += term[m];
  return f;
}

MediatedKernel1D::MediatedKernel1D(Tridiagonal op, SpectralBasis basis, int n_fermions,
                                   const KernelOptions& options)
    : n_fermions_(n_fermions), options_(options) {
  if (n_fermions < 0) throw Error(ErrorCode::domain_error, "n_fermions must be >= 0");
  const auto n = static_cast<std::size_t>(n_fermions);
  if (n_fermions > 0) {
    if (options.virtual_factor < 1.0)
      throw Error(ErrorCode::insufficient_virtual_states,
                  "need at least N explicit virtual states (virtual_factor >= 1)");
    const auto m = static_cast<std::size_t>(std::ceil(options.virtual_factor * n));
    if (basis.size() < n + m)
      throw Error(ErrorCode::insufficient_virtual_states,
                  "basis holds " + std::to_string(basis.size()) + " states, need " +
                      std::to_string(n + m));
    basis.energies.resize(n + m);
    basis.labels.resize(n + m);
    basis.samples.resize((n + m) * basis.grid.n_points);
    basis.samples.shrink_to_fit();
    fermi_ = fermi_level(basis.energies, n_fermions);
  }
  op_ = std::make_shared<const Tridiagonal>(std::move(op));
  basis_ = std::make_shared<const SpectralBasis>(std::move(basis));
  if (n_fermions == 0) return;

  Occupations occ;
  occ.filling.assign(1, std::vector<double>(basis_->size(), 0.0));
  std::fill_n(occ.filling[0].begin(), n, 1.0);
  occ.energy.assign(1, basis_->energies);
  occ.tolerance = 1e-12;
  occ.abort_on_degenerate = true;
  std::vector<Hole> holes(n);
  for (std::size_t k = 0; k < n; ++k) holes[k] = {k, 0, 1.0};
  sum_ = std::make_unique<ParticleHoleSum>(*op_, *basis_, std::vector<Channel>{{0.0, 1.0}},
                                           std::move(holes), std::move(occ), options.mode);
}

std::vector<double> MediatedKernel1D::evaluate(std::span<const IndexPair> pairs) const {
  if (!sum_) return std::vector<double>(pairs.size(), 0.0);
  // Order each pair so F(i, j) and F(j, i) run the identical arithmetic.
  std::vector<IndexPair> ordered(pairs.begin(), pairs.end());
  for (auto& p : ordered)
    if (p.first > p.second) std::swap(p.first, p.second);
  return sum_->evaluate(ordered, options_.threads);
}

double MediatedKernel1D::operator()(std::size_t i, std::size_t j) const {
  const IndexPair p{i, j};
  return evaluate({&p, 1})[0];
}

MediatedKernel1D mediated_kernel_1d(Tridiagonal op, SpectralBasis basis, int n_fermions,
                                    const KernelOptions& options) {
  return MediatedKernel1D(std::move(op), std::move(basis), n_fermions, options);
}

MediatedKernel1D mediated_kernel_1d(const TrapSpec1D& trap, const KernelOptions& options,
                                    const GridOptions& grid_options) {
  trap.validate();
  const auto n = static_cast<std::size_t>(trap.n_fermions);
  const auto states = n + static_cast<std::size_t>(std::ceil(options.virtual_factor * n));
  const GridSpec grid = default_grid(trap, states, grid_options);
  Tridiagonal op = build_1d_hamiltonian(trap, grid);
  SpectralBasis basis = solve_eigenbasis(op, states);
  return MediatedKernel1D(std::move(op), std::move(basis), trap.n_fermions, options);
}

RadialKernel radial_profile(const MediatedKernel1D& kernel, const ProfileOptions& options) {
  const GridSpec& grid = kernel.grid();
  const double h = grid.step();
  const double k_f = kernel.k_f();
  const std::size_t c = grid.center();
  RadialKernel out;
  out.k_f = k_f;
  if (kernel.n_fermions() == 0 || k_f <= 0.0) {
    out.kr = {0.0};
    out.f = {0.0};
    return out;
  }
  const double dkr = h * k_f;
  std::size_t count = static_cast<std::size_t>(std::floor(options.kr_max / dkr)) + 1;
  count = std::min(count, 2 * std::min(c, grid.n_points - 1 - c));
  const auto pairs = centered_pairs(c, count);
  out.f = kernel.evaluate(pairs);
  out.kr.resize(count);
  for (std::size_t m = 0; m < count; ++m) out.kr[m] = static_cast<double>(m) * dkr;

  double peak = 0.0;
  for (double v : out.f) peak = std::max(peak, std::abs(v));
  const std::size_t short_count =
      std::min(count, static_cast<std::size_t>(std::floor(options.residual_kr_max / dkr)) + 1);
  double residual = 0.0;
  for (double offset : options.residual_offsets) {
    const auto shift = static_cast<std::size_t>(std::llround(offset / h));
    const std::size_t cs = c + shift;
    if (cs + (short_count + 1) / 2 >= grid.n_points) continue;
    const auto shifted = kernel.evaluate(centered_pairs(cs, short_count));
    for (std::size_t m = 0; m < short_count; ++m)
      residual = std::max(residual, std::abs(shifted[m] - out.f[m]));
  }
  out.residual = peak > 0.0 ? residual / peak : 0.0;
  return out;
}

double asymptotic_f1d(double kfr) {
  if (!(kfr > 0.0)) throw Error(ErrorCode::domain_error, "k_F r must be > 0");
  return -(std::cos(2.0 * kfr) + std::sin(2.0 * kfr) / (2.0 * kfr)) / kfr;
}

double asymptotic_f2d(double kfr) {
  if (!(kfr > 0.0)) throw Error(ErrorCode::domain_error, "k_F r must be > 0");
  return -(std::sin(2.0 * kfr) - std::cos(2.0 * kfr) / (4.0 * kfr)) / (kfr * kfr);
}

namespace {

// Maxima and minima (sign kept) of a sampled kernel inside (lo, hi].
std::vector<Extremum> extrema_in(const RadialKernel& radial, double lo, double hi) {
  RadialKernel flipped = radial;
  for (double& v : flipped.f) v = -v;
  std::vector<Extremum> ext = window(extract_maxima(radial), lo, hi);
  for (const auto& e : window(extract_maxima(flipped), lo, hi)) ext.push_back({e.kr, -e.f});
  return ext;
}

}  // namespace

EnvelopeFit envelope_error(const RadialKernel& radial, int dimension, double lo, double hi) {
  if (dimension != 1 && dimension != 2)
    throw Error(ErrorCode::domain_error, "dimension must be 1 or 2");
  if (!(lo > 0.0 && hi > lo)) throw Error(ErrorCode::domain_error, "bad envelope window");
  const std::vector<Extremum> ext = extrema_in(radial, lo, hi);
  if (ext.size() < 2) throw Error(ErrorCode::fit_failure, "fewer than 2 extrema in the window");

  // Extrema of the asymptotic form itself, on a fine grid with margin.
  RadialKernel model;
  const double from = std::max(0.5 * lo, lo - 2.0);
  for (double x = from; x <= hi + 2.0; x += 1e-3) {
    model.kr.push_back(x);
    model.f.push_back(dimension == 1 ? asymptotic_f1d(x) : asymptotic_f2d(x));
  }
  const std::vector<Extremum> ref = extrema_in(model, from, hi + 2.0);

  std::vector<double> target(ext.size());
  for (std::size_t i = 0; i < ext.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : ref) {
      if ((r.f > 0.0) != (ext[i].f > 0.0)) continue;
      if (std::abs(r.kr - ext[i].kr) < best) {
        best = std::abs(r.kr - ext[i].kr);
        target[i] = std::abs(r.f);
      }
    }
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < ext.size(); ++i) {
    num += std::abs(ext[i].f) * target[i];
    den += target[i] * target[i];
  }
  EnvelopeFit fit;
  fit.scale = num / den;
  fit.extrema = ext.size();
  for (std::size_t i = 0; i < ext.size(); ++i) {
    const double expect = fit.scale * target[i];
    fit.error = std::max(fit.error, std::abs(std::abs(ext[i].f) - expect) / expect);
  }
  return fit;
}

std::vector<Extremum> extract_maxima(const RadialKernel& radial) {
  std::vector<Extremum> out;
  const auto& x = radial.kr;
  const auto& y = radial.f;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (!(y[i] > y[i - 1] && y[i] > y[i + 1])) continue;
    // Vertex of the parabola through the three samples (uniform spacing).
    const double curv = y[i - 1] - 2.0 * y[i] + y[i + 1];
    const double h = x[i + 1] - x[i];
    const double shift = 0.5 * (y[i - 1] - y[i + 1]) / curv;
    out.push_back({x[i] + shift * h, y[i] - 0.25 * (y[i - 1] - y[i + 1]) * shift});
  }
  return out;
}

std::vector<Extremum> window(std::span<const Extremum> maxima, double lo, double hi) {
  std::vector<Extremum> out;
  for (const auto& e : maxima)
    if (e.kr > lo && e.kr <= hi) out.push_back(e);
  return out;
}

double interpolate(const RadialKernel& radial, double kr) {
  if (radial.size() < 2 || kr < radial.kr.front() || kr > radial.kr.back())
    throw Error(ErrorCode::range_error, "interpolation point outside the kernel range");
  const double u = (kr - radial.kr.front()) / radial.step();
  const auto i = std::min(static_cast<std::size_t>(u), radial.size() - 2);
  const double t = u - static_cast<double>(i);
  return (1.0 - t) * radial.f[i] + t * radial.f[i + 1];
}

ShapeComparison compare_shapes(const RadialKernel& test, const RadialKernel& reference,
                               double lo, double hi) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double x = reference.kr[i];
    if (x <= lo || x > hi) continue;
    const double t = interpolate(test, x);
    num += t * reference.f[i];
    den += t * t;
  }
  if (!(den > 0.0)) throw Error(ErrorCode::domain_error, "empty comparison window");
  ShapeComparison out;
  out.scale = num / den;

  const std::vector<Extremum> ext = extrema_in(reference, lo, hi);
  if (ext.empty()) throw Error(ErrorCode::domain_error, "no extrema in the comparison window");
  for (const auto& e : ext)
    out.deviation =
        std::max(out.deviation, std::abs(out.scale * interpolate(test, e.kr) - e.f) / std::abs(e.f));
  return out;
}

DecayFit fit_yukawa(std::span<const Extremum> maxima) {
  if (maxima.size() < 3) throw Error(ErrorCode::fit_failure, "need >= 3 maxima");
  if (maxima.back().kr - maxima.front().kr < 2.0 * kPi)
    throw Error(ErrorCode::fit_failure, "maxima span fewer than 2 oscillations");
  // log|F| + log x = log A - x / (pi ell)
  const auto n = static_cast<double>(maxima.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> ys;
  for (const auto& e : maxima) {
    if (e.f == 0.0) throw Error(ErrorCode::fit_failure, "zero maximum");
    const double y = std::log(std::abs(e.f)) + std::log(e.kr);
    ys.push_back(y);
    sx += e.kr;
    sy += y;
    sxx += e.kr * e.kr;
    sxy += e.kr * y;
  }
  const double den = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / den;
  const double intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < maxima.size(); ++i) {
    const double r = ys[i] - (intercept + slope * maxima[i].kr);
    ss += r * r;
  }
  DecayFit fit;
  fit.amplitude = std::exp(intercept);
  fit.ell = slope < 0.0 ? -1.0 / (kPi * slope) : std::numeric_limits<double>::infinity();
  fit.residual = std::sqrt(ss / n);
  return fit;
}

SpectrumSamples cosine_transform(const RadialKernel& radial, double kr_min, double kr_max,
                                 std::size_t n_k, double k_max) {
  if (radial.size() < 2 || !(kr_min < kr_max))
    throw Error(ErrorCode::domain_error, "empty transform window");
  const double slack = 1e-9 * radial.step();
  if (kr_min < radial.kr.front() - slack || kr_max > radial.kr.back() + slack)
    throw Error(ErrorCode::domain_error, "transform window outside the sampled range");
  if (n_k < 2) throw Error(ErrorCode::domain_error, "need >= 2 k points");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < radial.size(); ++i)
    if (radial.kr[i] >= kr_min - slack && radial.kr[i] <= kr_max + slack) idx.push_back(i);
  if (idx.size() < 2) throw Error(ErrorCode::domain_error, "window holds < 2 samples");

  SpectrumSamples out;
  out.k.resize(n_k);
  out.amplitude.resize(n_k);
  for (std::size_t q = 0; q < n_k; ++q) {
    const double k = k_max * static_cast<double>(q) / static_cast<double>(n_k - 1);
    double sum = 0.0;
    for (std::size_t a = 0; a + 1 < idx.size(); ++a) {
      const std::size_t i = idx[a];
      const std::size_t j = idx[a + 1];
      const double fi = radial.f[i] * std::cos(k * radial.kr[i]);
      const double fj = radial.f[j] * std::cos(k * radial.kr[j]);
      sum += 0.5 * (fi + fj) * (radial.kr[j] - radial.kr[i]);
    }
    out.k[q] = k;
    out.amplitude[q] = sum;
  }
  return out;
}

std::vector<Extremum> spectrum_peaks(const SpectrumSamples& spectrum) {
  std::vector<Extremum> peaks;
  const auto& a = spectrum.amplitude;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double v = std::abs(a[i]);
    const bool left = i == 0 || v > std::abs(a[i - 1]);
    const bool right = i + 1 == a.size() || v >= std::abs(a[i + 1]);
    if (left && right && i > 0) peaks.push_back({spectrum.k[i], a[i]});
  }
  std::stable_sort(peaks.begin(), peaks.end(), [](const Extremum& x, const Extremum& y) {
    return std::abs(x.f) > std::abs(y.f);
  });
  return peaks;
}

std::vector<double> predicted_beat_frequencies(double k_f, double anisotropy, int n_fermions,
                                               int n_max) {
  if (n_max < 0 || n_fermions < 1)
    throw Error(ErrorCode::domain_error, "need n_max >= 0 and n_fermions >= 1");
  std::vector<double> out;
  for (int n = 0; n <= n_max; ++n) {
    const double k = 2.0 * k_f * (1.0 - n * anisotropy / n_fermions);
    if (k > 0.0) out.push_back(k);
  }
  return out;
}

}  // namespace rkky
