// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
//
// Exact diagonalization of a hardcore-boson chain with density-density
// couplings v_s n_j n_{j+s}, in a fixed particle-number sector.
#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rkky/lattice.hpp"

namespace rkky {

using Complex = std::complex<double>;
using StateVector = Eigen::VectorXcd;

template <class Scalar>
using SparseOperator = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

enum class Boundary { open, periodic };

struct ChainModel {
  int length = 2;
  int n_bosons = 1;
  double hopping = 1.0;
  std::vector<double> couplings;  // v_1 .. v_R
  Boundary boundary = Boundary::open;
  double twist = 0.0;             // phase on the wrap bond (periodic only)

  int range() const { return static_cast<int>(couplings.size()); }
  bool is_real() const;
  void validate() const;
};

// Fixed-number configurations in increasing binary order; bit j is site j.
class OccupationBasis {
 public:
  static constexpr int kMaxLength = 24;

  OccupationBasis(int length, int n_particles);

  std::size_t size() const { return states_.size(); }
  int length() const { return length_; }
  int particles() const { return particles_; }
  std::uint32_t state(std::size_t index) const { return states_[index]; }
  std::uint32_t unrank(std::size_t index) const;
  std::size_t rank(std::uint32_t state) const;

 private:
  std::uint64_t binomial(int n, int k) const;

  int length_;
  int particles_;
  std::vector<std::uint64_t> table_;  // Pascal triangle, (L+1) x (L+1)
  std::vector<std::uint32_t> states_;
};

OccupationBasis build_basis(int length, int n_particles);

// Diagonal energy of one configuration.
double interaction_energy(const ChainModel& model, std::uint32_t state);

template <class Scalar>
SparseOperator<Scalar> build_hamiltonian(const ChainModel& model, const OccupationBasis& basis);

struct LanczosOptions {
  int n_states = 1;
  int krylov_max = 300;     // vectors held before a restart
  int max_restarts = 40;
  double tolerance = 1e-10;  // residual norm target
  std::uint64_t seed = 0x5eed;
};

struct EigenStates {
  std::vector<double> values;
  std::vector<StateVector> vectors;
  std::vector<double> residuals;
};

// Lowest eigenpairs by Lanczos with full reorthogonalization, one state at a
// time with the converged ones deflated (so exact degeneracies are resolved).
template <class Scalar>
EigenStates lowest_states(const SparseOperator<Scalar>& h, const LanczosOptions& options);

EigenStates lowest_states(const ChainModel& model, const OccupationBasis& basis,
                          const LanczosOptions& options);

struct GroundStateResult {
  double energy = 0.0;
  StateVector amplitudes;
  std::size_t basis_dim = 0;
  double residual = 0.0;
  double gap = 0.0;  // to the next level; +inf in a one-state sector
  bool degenerate = false;
};

GroundStateResult ground_state(const ChainModel& model, const LanczosOptions& options = {});

std::vector<double> site_densities(const StateVector& state, const OccupationBasis& basis);

struct StructureFactor {
  std::vector<double> q;
  std::vector<double> s;
  double q0 = 0.0;
  double s_max = 0.0;
};

StructureFactor structure_factor(const StateVector& state, const OccupationBasis& basis);

struct BondObservables {
  double order = 0.0;       // B
  double correlator = 0.0;  // C_B, reference bond L/2
};

BondObservables bond_observables(const StateVector& state, const ChainModel& model,
                                 const OccupationBasis& basis);

std::vector<double> edge_profile(const StateVector& state, const ChainModel& model,
                                 const OccupationBasis& basis);

// States of the lowest `multiplet` levels at each twist point.
using TwistStates = std::vector<std::vector<StateVector>>;

struct BerryOptions {
  int steps = 16;
  int multiplet = 1;   // >1: phase of the determinant of the multiplet overlaps
  double min_gap = 1e-8;
  LanczosOptions lanczos;
};

struct BerryResult {
  double gamma = 0.0;  // in [0, 2 pi)
  double min_gap = 0.0;
};

// Discrete Berry phase -arg prod det <psi(theta_i)|psi(theta_{i+1})> of a
// closed loop of states (the last point connects back to the first).
double berry_phase(const TwistStates& loop);

BerryResult berry_phase(const ChainModel& model, const BerryOptions& options = {});

struct PhaseOptions {
  int length = 12;
  int n_bosons = 6;
  double hopping = 1.0;
  double strength = 4.0;  // V_0: largest |v_s| after rescaling
  Boundary boundary = Boundary::periodic;
  int berry_steps = 0;    // 0 skips the Berry phase
  int berry_multiplet = 2;
  LanczosOptions lanczos;
  int threads = 1;
};

struct PhaseCell {
  double vp_ratio = 0.0;
  double spacing_kf = 0.0;
  CouplingTable table;  // longer than the used range so truncation can be checked
};

struct PhaseRow {
  double vp_ratio = 0.0;
  double spacing_kf = 0.0;
  double q0 = 0.0;
  double s_max = 0.0;
  double bond = 0.0;  // B for open chains, C_B for periodic ones
  std::optional<double> gamma;
  std::string warning;
  std::string error;
};

int phase_range(int length);

// Couplings for one cell: truncated at phase_range(L), rescaled so the
// largest magnitude equals the strength. Sets `warning` when the dropped tail
// is not small against v_1.
std::vector<double> chain_couplings(const CouplingTable& table, int length, double strength,
                                    std::string* warning = nullptr);

PhaseRow solve_cell(const PhaseCell& cell, const PhaseOptions& options);

std::vector<PhaseRow> phase_scan(std::span<const PhaseCell> cells, const PhaseOptions& options);

}  // namespace rkky
