// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rkky/errors.hpp"
#include "rkky/manybody.hpp"
#include "rkky/parallel.hpp"

namespace rkky {

int phase_range(int length) { return std::max(1, std::min(5, length / 2 - 1)); }

std::vector<double> chain_couplings(const CouplingTable& table, int length, double strength,
                                    std::string* warning) {
  const int range = phase_range(length);
  if (table.max_range() < range)
    throw Error(ErrorCode::domain_error, "coupling table shorter than the chain range");
  if (!(strength >= 0.0)) throw Error(ErrorCode::domain_error, "strength must be >= 0");
  std::vector<double> v(table.couplings.begin(), table.couplings.begin() + range);
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, std::abs(x));
  if (peak == 0.0) throw Error(ErrorCode::domain_error, "couplings vanish within the range");
  for (double& x : v) x *= strength / peak;

  if (warning != nullptr) {
    warning->clear();
    const double v1 = std::abs(table.couplings[0]);
    double tail = 0.0;
    for (int s = range; s < table.max_range(); ++s)
      tail = std::max(tail, std::abs(table.couplings[static_cast<std::size_t>(s)]));
    if (tail >= 0.05 * v1) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "dropped couplings reach %.3g of |v1|",
                    v1 > 0.0 ? tail / v1 : INFINITY);
      *warning = buf;
    }
  }
  return v;
}

PhaseRow solve_cell(const PhaseCell& cell, const PhaseOptions& options) {
  PhaseRow row;
  row.vp_ratio = cell.vp_ratio;
  row.spacing_kf = cell.spacing_kf;
  try {
    ChainModel model;
    model.length = options.length;
    model.n_bosons = options.n_bosons;
    model.hopping = options.hopping;
    model.boundary = options.boundary;
    model.couplings = chain_couplings(cell.table, options.length, options.strength, &row.warning);
    const GroundStateResult gs = ground_state(model, options.lanczos);
    const OccupationBasis basis(model.length, model.n_bosons);
    const StructureFactor sf = structure_factor(gs.amplitudes, basis);
    row.q0 = sf.q0;
    row.s_max = sf.s_max;
    const BondObservables b = bond_observables(gs.amplitudes, model, basis);
    row.bond = model.boundary == Boundary::open ? b.order : b.correlator;
    if (model.boundary == Boundary::periodic && options.berry_steps > 0) {
      BerryOptions berry;
      berry.steps = options.berry_steps;
      berry.multiplet = options.berry_multiplet;
      berry.lanczos = options.lanczos;
      row.gamma = berry_phase(model, berry).gamma;
    }
  } catch (const Error& e) {
    row.error = std::string(to_string(e.code())) + ": " + e.what();
  }
  return row;
}

std::vector<PhaseRow> phase_scan(std::span<const PhaseCell> cells, const PhaseOptions& options) {
  if (cells.empty()) throw Error(ErrorCode::domain_error, "phase scan needs at least one cell");
  std::vector<PhaseRow> rows(cells.size());
  parallel_for(cells.size(), options.threads,
               [&](std::size_t i) { rows[i] = solve_cell(cells[i], options); });
  return rows;
}

}  // namespace rkky
