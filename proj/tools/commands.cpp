// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>

#include "rkky/csv.hpp"
#include "rkky/errors.hpp"
#include "rkky/kernel.hpp"
#include "rkky/lattice.hpp"
#include "rkky/manybody.hpp"
#include "rkky/parallel.hpp"
#include "rkky/spectra.hpp"

namespace rkky::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Parameter validation failures are configuration errors, not numerical ones.
template <class T>
void validated(const T& spec) {
  try {
    spec.validate();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::domain_error) throw;
    throw Error(ErrorCode::config_error, e.what());
  }
}

std::string fmt(double v) { return format_number(v); }

std::string clean(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

CsvTable head(const Context& ctx, CsvRow columns) {
  CsvTable t;
  t.comments.push_back("rkky " RKKY_VERSION " " + ctx.command);
  for (auto& line : ctx.config.dump()) t.comments.push_back(line);
  t.columns = std::move(columns);
  return t;
}

void write_json(const Context& ctx, const std::string& name, json body) {
  json doc{{"version", RKKY_VERSION}, {"command", ctx.command}, {"config", json::object()}};
  for (const auto& line : ctx.config.dump()) {
    const auto eq = line.find(" = ");
    doc["config"][line.substr(0, eq)] = line.substr(eq + 3);
  }
  doc["result"] = std::move(body);
  const fs::path path = ctx.out / name;
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::config_error, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

VirtualSum read_mode(Config& cfg) {
  const std::string mode = cfg.text("virtual_sum", "complete");
  if (mode == "complete") return VirtualSum::complete;
  if (mode == "truncated") return VirtualSum::truncated;
  throw Error(ErrorCode::config_error, "key 'virtual_sum' must be complete or truncated");
}

TrapSpec1D read_trap_1d(Config& cfg) {
  TrapSpec1D trap;
  trap.n_fermions = cfg.integer("n_fermions");
  trap.vp_ratio = cfg.number("vp_ratio", 0.0);
  if (cfg.has("kp_xzp")) trap.kp_xzp = cfg.number("kp_xzp");
  validated(trap);
  return trap;
}

GridOptions read_grid(Config& cfg) {
  GridOptions g;
  g.box_factor = cfg.number("grid.box_factor", g.box_factor);
  g.points_per_wavelength = cfg.integer("grid.points_per_wavelength", g.points_per_wavelength);
  g.radial_step = cfg.number("grid.radial_step", g.radial_step);
  if (!(g.box_factor > 1.0) || g.points_per_wavelength < 4 || !(g.radial_step > 0.0))
    throw Error(ErrorCode::config_error, "grid options out of range");
  return g;
}

KernelOptions read_kernel_options(Config& cfg, int threads) {
  KernelOptions k;
  k.virtual_factor = cfg.number("virtual_factor", k.virtual_factor);
  k.mode = read_mode(cfg);
  k.threads = threads;
  return k;
}

ProfileOptions read_profile(Config& cfg) {
  ProfileOptions p;
  p.kr_max = cfg.number("kr_max", p.kr_max);
  if (!(p.kr_max > 0.0)) throw Error(ErrorCode::config_error, "key 'kr_max' must be > 0");
  return p;
}

Kernel2DOptions read_kernel_2d(Config& cfg, int threads) {
  Kernel2DOptions k;
  k.cutoff_factor = cfg.number("cutoff_factor", k.cutoff_factor);
  k.virtual_factor = cfg.number("virtual_factor", k.virtual_factor);
  k.mode = read_mode(cfg);
  k.kr_max = cfg.number("kr_max", k.kr_max);
  k.grid = read_grid(cfg);
  k.threads = threads;
  if (!(k.cutoff_factor > 1.0)) throw Error(ErrorCode::config_error, "key 'cutoff_factor' must be > 1");
  return k;
}

RadialKernel kernel_1d(const TrapSpec1D& trap, const KernelOptions& options,
                       const GridOptions& grid, const ProfileOptions& profile) {
  const MediatedKernel1D k = mediated_kernel_1d(trap, options, grid);
  return radial_profile(k, profile);
}

RadialKernel kernel_2d(int n, double anisotropy, const Kernel2DOptions& options) {
  const TrapSpec2D trap{n, anisotropy};
  validated(trap);
  return mediated_kernel_2d(kernel_basis_2d(trap, options.cutoff_factor), n, options);
}

void write_kernel(const Context& ctx, const RadialKernel& radial, bool two_d) {
  CsvTable t = head(ctx, {"kr", "f", "f_asymptotic"});
  for (std::size_t i = 0; i < radial.size(); ++i) {
    const double x = radial.kr[i];
    const double a = x > 0.0 ? (two_d ? asymptotic_f2d(x) : asymptotic_f1d(x)) : NAN;
    t.rows.push_back({fmt(x), fmt(radial.f[i]), fmt(a)});
  }
  write_csv(ctx.out / "kernel.csv", t);
}

// Rows already present in `path` under an identical header, keyed by their
// first `key_columns` cells.
std::map<CsvRow, CsvRow> resume(const fs::path& path, const CsvTable& h, std::size_t key_columns) {
  std::map<CsvRow, CsvRow> done;
  if (!fs::exists(path)) return done;
  const CsvTable old = read_csv(path);
  if (old.comments != h.comments || old.columns != h.columns) return done;
  for (const auto& row : old.rows)
    done.emplace(CsvRow(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(key_columns)), row);
  return done;
}

// Single writer for checkpointed scans: rows are appended as cells finish and
// the file is rewritten in canonical order at the end.
class ScanWriter {
 public:
  ScanWriter(fs::path path, CsvTable h, std::size_t key_columns)
      : path_(std::move(path)), head_(std::move(h)), keys_(key_columns),
        rows_(resume(path_, head_, key_columns)) {}

  bool done(const CsvRow& key) const { return rows_.contains(key); }

  void start() {
    CsvTable t = head_;
    for (const auto& [k, row] : rows_) t.rows.push_back(row);
    appender_.emplace(path_, t);
  }

  void add(const CsvRow& row) {
    std::lock_guard lock(mutex_);
    rows_[CsvRow(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(keys_))] = row;
    appender_->append(row);
  }

  void finish(const std::vector<CsvRow>& order) {
    appender_.reset();
    CsvTable t = head_;
    for (const auto& key : order) t.rows.push_back(rows_.at(key));
    write_csv(path_, t);
  }

  const CsvRow& row(const CsvRow& key) const { return rows_.at(key); }

 private:
  fs::path path_;
  CsvTable head_;
  std::size_t keys_;
  std::map<CsvRow, CsvRow> rows_;
  std::optional<CsvAppender> appender_;
  std::mutex mutex_;
};

}  // namespace

int cmd_spectrum(Context& ctx) {
  Config& cfg = ctx.config;
  const TrapSpec1D trap = read_trap_1d(cfg);
  const int n_states = cfg.integer("n_states", trap.n_fermions);
  const bool with_wavefunctions = cfg.flag("wavefunctions", false);
  const GridOptions grid = read_grid(cfg);
  if (n_states < 1) throw Error(ErrorCode::config_error, "key 'n_states' must be >= 1");

  // Extra states above the Fermi level for the gap diagnostics.
  const auto solved = static_cast<std::size_t>(std::max(n_states, 2 * trap.n_fermions + 10));
  const GridSpec g = default_grid(trap, solved, grid);
  const SpectralBasis basis = solve_eigenbasis(build_1d_hamiltonian(trap, g), solved);

  CsvTable t = head(ctx, {"n", "energy"});
  for (int n = 0; n < n_states; ++n)
    t.rows.push_back({std::to_string(n), fmt(basis.energies[static_cast<std::size_t>(n)])});
  write_csv(ctx.out / "energies.csv", t);

  if (with_wavefunctions) {
    CsvRow cols{"xi"};
    for (int n = 0; n < n_states; ++n) cols.push_back("psi_" + std::to_string(n));
    CsvTable w = head(ctx, cols);
    for (std::size_t i = 0; i < g.n_points; ++i) {
      CsvRow row{fmt(g.position(i))};
      for (int n = 0; n < n_states; ++n)
        row.push_back(fmt(basis.wavefunction(static_cast<std::size_t>(n))[i]));
      w.rows.push_back(std::move(row));
    }
    write_csv(ctx.out / "wavefunctions.csv", w);
  }

  const FermiLevel fermi = fermi_level(basis.energies, trap.n_fermions);
  const CentralGap gap = central_gap(basis, trap.n_fermions);
  // A band gap at the trap center well beyond the bare level spacing (1).
  const bool gap_flag = gap.central_gap > 5.0;
  write_json(ctx, "spectrum.json",
             {{"fermi_energy", fermi.energy},
              {"k_f", fermi.k_f},
              {"grid_points", g.n_points},
              {"grid_step", g.step()},
              {"global_gap", gap.global_gap},
              {"central_gap", gap.central_gap},
              {"central_lower", gap.lower},
              {"central_upper", gap.upper},
              {"gap_flag", gap_flag}});
  return 0;
}

int cmd_kernel(Context& ctx) {
  Config& cfg = ctx.config;
  const int dimension = cfg.integer("dimension", 1);
  if (dimension != 1 && dimension != 2)
    throw Error(ErrorCode::config_error, "key 'dimension' must be 1 or 2");
  RadialKernel radial;
  double fit_min = 0.0;
  double fit_max = 0.0;
  double spectrum_min = 0.0;
  if (dimension == 1) {
    const TrapSpec1D trap = read_trap_1d(cfg);
    const KernelOptions options = read_kernel_options(cfg, ctx.threads);
    const GridOptions grid = read_grid(cfg);
    const ProfileOptions profile = read_profile(cfg);
    fit_min = cfg.number("fit_min", 2.0);
    fit_max = cfg.number("fit_max", profile.kr_max);
    spectrum_min = cfg.number("spectrum_min", 1.0);
    if (!(fit_max > fit_min)) throw Error(ErrorCode::config_error, "empty fit window (fit_min, fit_max]");
    radial = kernel_1d(trap, options, grid, profile);
  } else {
    const int n = cfg.integer("n_fermions");
    const double anisotropy = cfg.has("anis_over_n") ? cfg.number("anis_over_n") * n
                                                     : cfg.number("anisotropy", 1.0);
    const Kernel2DOptions options = read_kernel_2d(cfg, ctx.threads);
    fit_min = cfg.number("fit_min", 2.0);
    fit_max = cfg.number("fit_max", options.kr_max);
    spectrum_min = cfg.number("spectrum_min", 1.0);
    if (!(fit_max > fit_min)) throw Error(ErrorCode::config_error, "empty fit window (fit_min, fit_max]");
    radial = kernel_2d(n, anisotropy, options);
  }
  write_kernel(ctx, radial, dimension == 2);

  const auto maxima = extract_maxima(radial);
  CsvTable m = head(ctx, {"kr", "f"});
  for (const auto& e : maxima) m.rows.push_back({fmt(e.kr), fmt(e.f)});
  write_csv(ctx.out / "maxima.csv", m);

  const SpectrumSamples spectrum = cosine_transform(radial, spectrum_min, radial.kr.back());
  CsvTable s = head(ctx, {"k_over_kf", "amplitude"});
  for (std::size_t i = 0; i < spectrum.k.size(); ++i)
    s.rows.push_back({fmt(spectrum.k[i]), fmt(spectrum.amplitude[i])});
  write_csv(ctx.out / "spectrum.csv", s);

  json peaks = json::array();
  for (const auto& p : spectrum_peaks(spectrum)) {
    if (peaks.size() == 4) break;
    peaks.push_back({{"k_over_kf", p.kr}, {"amplitude", p.f}});
  }
  const auto fitted = window(maxima, fit_min, fit_max);
  const DecayFit fit = fit_yukawa(fitted);
  write_json(ctx, "yukawa.json",
             {{"ell", number_or_null(fit.ell)},
              {"decays", std::isfinite(fit.ell)},
              {"amplitude", fit.amplitude},
              {"log_residual", fit.residual},
              {"maxima_used", fitted.size()},
              {"all_positive", std::all_of(fitted.begin(), fitted.end(),
                                           [](const Extremum& e) { return e.f > 0.0; })},
              {"k_f", radial.k_f},
              {"translation_residual", radial.residual},
              {"spectrum_peaks", peaks}});
  return 0;
}

int cmd_couplings(Context& ctx) {
  Config& cfg = ctx.config;
  const TrapSpec1D trap = read_trap_1d(cfg);
  const KernelOptions options = read_kernel_options(cfg, ctx.threads);
  const GridOptions grid = read_grid(cfg);
  const ProfileOptions profile = read_profile(cfg);
  const WannierSpec wannier{cfg.number("width_ratio", 0.17), cfg.number("kf_d")};
  const int max_range = cfg.integer("max_range", 5);
  validated(wannier);
  if (max_range < 1) throw Error(ErrorCode::config_error, "key 'max_range' must be >= 1");

  const RadialKernel radial = kernel_1d(trap, options, grid, profile);
  const CouplingTable table = coupling_table(radial, wannier, max_range);
  CsvTable t = head(ctx, {"s", "kr", "v", "v_over_v1"});
  for (int s = 1; s <= max_range; ++s) {
    const double v = table.couplings[static_cast<std::size_t>(s - 1)];
    t.rows.push_back({std::to_string(s), fmt(s * wannier.spacing_kf), fmt(v),
                      fmt(v / table.couplings[0])});
  }
  write_csv(ctx.out / "couplings.csv", t);
  return 0;
}

int cmd_scan_ratios(Context& ctx) {
  Config& cfg = ctx.config;
  const int n = cfg.integer("n_fermions");
  const std::vector<double> vps = cfg.grid("vp_ratio");
  const std::vector<double> spacings = cfg.grid("kf_d");
  const double width = cfg.number("width_ratio", 0.17);
  std::optional<double> kp;
  if (cfg.has("kp_xzp")) kp = cfg.number("kp_xzp");
  KernelOptions options = read_kernel_options(cfg, 1);
  const GridOptions grid = read_grid(cfg);
  const ProfileOptions profile = read_profile(cfg);
  for (double d : spacings) validated(WannierSpec{width, d});

  ScanWriter writer(ctx.out / "ratios.csv",
                    head(ctx, {"vp_ratio", "kf_d", "v2_over_v1", "v3_over_v1", "undefined", "error"}),
                    2);
  std::vector<CsvRow> order;
  std::vector<double> todo;
  for (double vp : vps) {
    bool missing = false;
    for (double d : spacings) {
      order.push_back({fmt(vp), fmt(d)});
      missing = missing || !writer.done(order.back());
    }
    if (missing) todo.push_back(vp);
  }
  if (todo.empty()) return 0;
  writer.start();

  int failures = 0;
  parallel_for(todo.size(), ctx.threads, [&](std::size_t i) {
    TrapSpec1D trap{n, todo[i], kp};
    std::vector<CsvRow> rows;
    try {
      validated(trap);
      const VpKernel k{trap.vp_ratio, kernel_1d(trap, options, grid, profile)};
      const RatioScan scan = ratio_scan(std::span(&k, 1), spacings, width);
      for (const auto& c : scan.cells)
        rows.push_back({fmt(c.vp_ratio), fmt(c.spacing_kf), fmt(c.v2_over_v1),
                        fmt(c.v3_over_v1), c.undefined ? "1" : "0", ""});
    } catch (const Error& e) {
      ++failures;
      for (double d : spacings)
        rows.push_back({fmt(trap.vp_ratio), fmt(d), "nan", "nan", "1",
                        clean(std::string(to_string(e.code())) + ": " + e.what())});
    }
    for (const auto& r : rows) writer.add(r);
  });
  writer.finish(order);

  // BOW target over all rows in the file: |v2/v1 - 0.5| smallest with |v3/v1| < 0.1.
  std::optional<CsvRow> best;
  double miss = INFINITY;
  for (const auto& key : order) {
    const CsvRow& r = writer.row(key);
    if (r[4] == "1") continue;
    const double a = std::stod(r[2]);
    const double b = std::stod(r[3]);
    if (std::abs(b) < 0.1 && std::abs(a - 0.5) < miss) {
      miss = std::abs(a - 0.5);
      best = r;
    }
  }
  json target = nullptr;
  if (best) target = {{"vp_ratio", std::stod((*best)[0])}, {"kf_d", std::stod((*best)[1])},
                      {"v2_over_v1", std::stod((*best)[2])}, {"v3_over_v1", std::stod((*best)[3])}};
  write_json(ctx, "bow_target.json", {{"bow_target", target}});
  return failures == static_cast<int>(todo.size()) ? 3 : 0;
}

namespace {

Boundary read_boundary(Config& cfg) {
  const std::string b = cfg.text("boundary", "periodic");
  if (b == "periodic") return Boundary::periodic;
  if (b == "open") return Boundary::open;
  throw Error(ErrorCode::config_error, "key 'boundary' must be open or periodic");
}

LanczosOptions read_lanczos(Config& cfg) {
  LanczosOptions l;
  l.krylov_max = cfg.integer("lanczos.krylov_max", l.krylov_max);
  l.max_restarts = cfg.integer("lanczos.max_restarts", l.max_restarts);
  l.tolerance = cfg.number("lanczos.tolerance", l.tolerance);
  l.seed = static_cast<std::uint64_t>(cfg.integer("lanczos.seed", static_cast<int>(l.seed)));
  return l;
}

}  // namespace

int cmd_chain(Context& ctx) {
  Config& cfg = ctx.config;
  ChainModel model;
  model.length = cfg.integer("length");
  model.n_bosons = cfg.integer("n_bosons", model.length / 2);
  model.hopping = cfg.number("hopping", 1.0);
  model.couplings = cfg.has("couplings") ? cfg.numbers("couplings") : std::vector<double>{};
  model.boundary = read_boundary(cfg);
  model.twist = cfg.number("twist", 0.0);
  const int berry_steps = cfg.integer("berry_steps", 0);
  const int multiplet = cfg.integer("berry_multiplet", 2);
  const LanczosOptions lanczos = read_lanczos(cfg);
  if (model.length < 1 || model.length > OccupationBasis::kMaxLength)
    throw Error(ErrorCode::config_error, "key 'length' must be in [1, 24]");
  validated(model);

  const GroundStateResult gs = ground_state(model, lanczos);
  const OccupationBasis basis(model.length, model.n_bosons);
  const StructureFactor sf = structure_factor(gs.amplitudes, basis);
  const BondObservables bond = bond_observables(gs.amplitudes, model, basis);
  const std::vector<double> density = site_densities(gs.amplitudes, basis);

  CsvTable d = head(ctx, {"site", "density"});
  for (std::size_t j = 0; j < density.size(); ++j)
    d.rows.push_back({std::to_string(j), fmt(density[j])});
  write_csv(ctx.out / "densities.csv", d);
  CsvTable s = head(ctx, {"q", "s"});
  for (std::size_t m = 0; m < sf.q.size(); ++m) s.rows.push_back({fmt(sf.q[m]), fmt(sf.s[m])});
  write_csv(ctx.out / "structure.csv", s);

  json result{{"energy", gs.energy},         {"basis_dim", gs.basis_dim},
              {"residual", gs.residual},     {"gap", number_or_null(gs.gap)},
              {"degenerate", gs.degenerate}, {"q0", sf.q0},
              {"s_max", sf.s_max},           {"bond_order", bond.order},
              {"bond_correlator", bond.correlator}};
  if (berry_steps > 0) {
    BerryOptions b;
    b.steps = berry_steps;
    b.multiplet = multiplet;
    b.lanczos = lanczos;
    const BerryResult berry = berry_phase(model, b);
    result["gamma"] = berry.gamma;
    result["berry_min_gap"] = berry.min_gap;
  }
  write_json(ctx, "chain.json", result);
  return 0;
}

int cmd_scan_phase(Context& ctx) {
  Config& cfg = ctx.config;
  const int n = cfg.integer("n_fermions");
  const std::vector<double> vps = cfg.grid("vp_ratio");
  const std::vector<double> spacings = cfg.grid("kf_d");
  const double width = cfg.number("width_ratio", 0.17);
  std::optional<double> kp;
  if (cfg.has("kp_xzp")) kp = cfg.number("kp_xzp");
  const KernelOptions options = read_kernel_options(cfg, 1);
  const GridOptions grid = read_grid(cfg);
  const ProfileOptions profile = read_profile(cfg);
  PhaseOptions phase;
  phase.length = cfg.integer("length", 12);
  phase.n_bosons = cfg.integer("n_bosons", phase.length / 2);
  phase.hopping = cfg.number("hopping", 1.0);
  phase.strength = cfg.number("strength", 4.0);
  phase.boundary = read_boundary(cfg);
  phase.berry_steps = cfg.integer("berry_steps", 0);
  phase.berry_multiplet = cfg.integer("berry_multiplet", 2);
  phase.lanczos = read_lanczos(cfg);
  const int table_range = cfg.integer("table_range", 8);
  if (phase.length < 3 || phase.length > OccupationBasis::kMaxLength)
    throw Error(ErrorCode::config_error, "key 'length' must be in [3, 24]");
  if (table_range < phase_range(phase.length))
    throw Error(ErrorCode::config_error, "key 'table_range' is below the chain coupling range");
  for (double d : spacings) validated(WannierSpec{width, d});

  ScanWriter writer(ctx.out / "phase.csv",
                    head(ctx, {"vp_ratio", "kf_d", "q0", "s_max", "bond", "gamma", "warning",
                               "error"}),
                    2);
  std::vector<CsvRow> order;
  std::vector<std::pair<std::size_t, std::size_t>> todo;  // (vp index, spacing index)
  std::set<std::size_t> vp_needed;
  for (std::size_t a = 0; a < vps.size(); ++a)
    for (std::size_t b = 0; b < spacings.size(); ++b) {
      order.push_back({fmt(vps[a]), fmt(spacings[b])});
      if (!writer.done(order.back())) {
        todo.emplace_back(a, b);
        vp_needed.insert(a);
      }
    }
  if (todo.empty()) return 0;
  writer.start();

  // Kernels first, one per vp value, then the cells.
  const std::vector<std::size_t> kernel_list(vp_needed.begin(), vp_needed.end());
  std::map<std::size_t, RadialKernel> kernels;
  std::map<std::size_t, std::string> kernel_errors;
  std::vector<RadialKernel> computed(kernel_list.size());
  std::vector<std::string> failed(kernel_list.size());
  parallel_for(kernel_list.size(), ctx.threads, [&](std::size_t i) {
    try {
      TrapSpec1D trap{n, vps[kernel_list[i]], kp};
      validated(trap);
      computed[i] = kernel_1d(trap, options, grid, profile);
    } catch (const Error& e) {
      failed[i] = clean(std::string(to_string(e.code())) + ": " + e.what());
    }
  });
  for (std::size_t i = 0; i < kernel_list.size(); ++i) {
    if (failed[i].empty()) kernels[kernel_list[i]] = std::move(computed[i]);
    else kernel_errors[kernel_list[i]] = failed[i];
  }

  std::atomic<std::size_t> failures{0};
  PhaseOptions inner = phase;
  inner.threads = 1;
  parallel_for(todo.size(), ctx.threads, [&](std::size_t i) {
    const auto [a, b] = todo[i];
    PhaseRow row;
    row.vp_ratio = vps[a];
    row.spacing_kf = spacings[b];
    if (auto it = kernel_errors.find(a); it != kernel_errors.end()) {
      row.error = it->second;
    } else {
      try {
        PhaseCell cell{vps[a], spacings[b],
                       coupling_table(kernels.at(a), {width, spacings[b]}, table_range)};
        row = solve_cell(cell, inner);
      } catch (const Error& e) {
        row.error = std::string(to_string(e.code())) + ": " + e.what();
      }
    }
    if (!row.error.empty()) ++failures;
    writer.add({fmt(row.vp_ratio), fmt(row.spacing_kf), fmt(row.q0), fmt(row.s_max),
                fmt(row.bond), row.gamma ? fmt(*row.gamma) : "nan", clean(row.warning),
                clean(row.error)});
  });
  writer.finish(order);
  return failures == todo.size() ? 3 : 0;
}

int cmd_crossover(Context& ctx) {
  Config& cfg = ctx.config;
  const int n = cfg.integer("n_fermions", 250);
  const std::vector<double> ratios = cfg.grid("anis_over_n");
  const Kernel2DOptions options = read_kernel_2d(cfg, 1);
  const double cmp_min = cfg.number("compare_min", 2.0);
  const double cmp_max = cfg.number("compare_max", 10.0);
  const double spectrum_min = cfg.number("spectrum_min", 1.0);
  if (!(cmp_max > cmp_min)) throw Error(ErrorCode::config_error, "empty comparison window");

  // Direct 1D kernel of the same particle number as the reference.
  KernelOptions k1;
  k1.virtual_factor = options.virtual_factor;
  k1.mode = options.mode;
  k1.threads = ctx.threads;
  ProfileOptions p1;
  p1.kr_max = options.kr_max;
  const RadialKernel ref = kernel_1d(TrapSpec1D{n, 0.0, {}}, k1, options.grid, p1);

  std::vector<RadialKernel> kernels(ratios.size());
  parallel_for(ratios.size(), ctx.threads,
               [&](std::size_t i) { kernels[i] = kernel_2d(n, ratios[i] * n, options); });

  CsvTable ks = head(ctx, {"anis_over_n", "kr", "f"});
  CsvTable summary = head(ctx, {"anis_over_n", "k_f", "scale_1d", "deviation_1d", "peak0",
                                "peak1", "beat0", "beat1"});
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const RadialKernel& k = kernels[i];
    for (std::size_t j = 0; j < k.size(); ++j)
      ks.rows.push_back({fmt(ratios[i]), fmt(k.kr[j]), fmt(k.f[j])});
    const auto peaks = spectrum_peaks(cosine_transform(k, spectrum_min, k.kr.back()));
    auto beats = predicted_beat_frequencies(k.k_f, ratios[i] * n, n, 1);
    auto peak = [&](std::size_t m) { return m < peaks.size() ? peaks[m].kr : NAN; };
    auto beat = [&](std::size_t m) { return m < beats.size() ? beats[m] / k.k_f : NAN; };
    const ShapeComparison cmp = compare_shapes(k, ref, cmp_min, cmp_max);
    summary.rows.push_back({fmt(ratios[i]), fmt(k.k_f), fmt(cmp.scale), fmt(cmp.deviation),
                            fmt(peak(0)), fmt(peak(1)), fmt(beat(0)), fmt(beat(1))});
  }
  write_csv(ctx.out / "kernels_2d.csv", ks);
  write_csv(ctx.out / "crossover.csv", summary);
  return 0;
}

int cmd_kagome(Context& ctx) {
  Config& cfg = ctx.config;
  const int n = cfg.integer("n_fermions", 250);
  const std::vector<double> ratios = cfg.grid("anis_over_n");
  const std::vector<double> spacings = cfg.grid("kf_d");
  const double width = cfg.number("width_ratio", 0.17);
  const Kernel2DOptions options = read_kernel_2d(cfg, 1);
  const double tol_23 = cfg.number("tolerance_v2_v3", 0.2);
  for (double d : spacings) validated(WannierSpec{width, d});

  ScanWriter writer(ctx.out / "kagome.csv",
                    head(ctx, {"anis_over_n", "kf_d", "v1", "v2", "v3", "error"}), 2);
  std::vector<CsvRow> order;
  std::vector<std::size_t> todo;
  for (std::size_t a = 0; a < ratios.size(); ++a) {
    bool missing = false;
    for (double d : spacings) {
      order.push_back({fmt(ratios[a]), fmt(d)});
      missing = missing || !writer.done(order.back());
    }
    if (missing) todo.push_back(a);
  }

  std::atomic<std::size_t> failures{0};
  if (!todo.empty()) {
    writer.start();
    parallel_for(todo.size(), ctx.threads, [&](std::size_t i) {
      const double ratio = ratios[todo[i]];
      std::vector<CsvRow> rows;
      try {
        const RadialKernel k = kernel_2d(n, ratio * n, options);
        for (double d : spacings) {
          const KagomeCouplings v = kagome_couplings(k, {width, d});
          rows.push_back({fmt(ratio), fmt(d), fmt(v.v1), fmt(v.v2), fmt(v.v3), ""});
        }
      } catch (const Error& e) {
        ++failures;
        for (double d : spacings)
          rows.push_back({fmt(ratio), fmt(d), "nan", "nan", "nan",
                          clean(std::string(to_string(e.code())) + ": " + e.what())});
      }
      for (const auto& r : rows) writer.add(r);
    });
    writer.finish(order);
  }

  // Contour and frustration summary from the full table.
  std::vector<KagomeCell> cells;
  for (const auto& key : order) {
    const CsvRow& r = writer.row(key);
    cells.push_back({std::stod(r[0]), std::stod(r[1]), {std::stod(r[2]), std::stod(r[3]),
                                                         std::stod(r[4])}});
  }
  const auto contour = sign_change_cells(cells, ratios.size(), spacings.size());
  std::vector<KagomeCell> on_contour;
  for (auto i : contour) on_contour.push_back(cells[i]);
  const auto candidates = frustration_search(on_contour, INFINITY, tol_23);
  json best = json::array();
  for (const auto& c : candidates) {
    if (best.size() == 10) break;
    const KagomeCell& cell = on_contour[c.cell];
    best.push_back({{"anis_over_n", cell.anis_over_n}, {"kf_d", cell.spacing_kf},
                    {"v1", cell.v.v1}, {"v2", cell.v.v2}, {"v3", cell.v.v3}, {"score", c.score}});
  }
  write_json(ctx, "kagome.json", {{"contour_cells", contour.size()}, {"candidates", best}});
  return !todo.empty() && failures == todo.size() ? 3 : 0;
}

}  // namespace rkky::cli
