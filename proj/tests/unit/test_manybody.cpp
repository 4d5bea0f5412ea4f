// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rkky/errors.hpp"
#include "rkky/manybody.hpp"

using namespace rkky;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd dense_spectrum(const ChainModel& m) {
  const OccupationBasis b(m.length, m.n_bosons);
  const Eigen::MatrixXcd h = Eigen::MatrixXcd(build_hamiltonian<Complex>(m, b));
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h).eigenvalues();
}

StateVector product_state(const OccupationBasis& b, std::uint32_t bits) {
  StateVector v = StateVector::Zero(static_cast<Eigen::Index>(b.size()));
  v[static_cast<Eigen::Index>(b.rank(bits))] = 1.0;
  return v;
}

// Free fermions on L sites: the lowest n single-particle levels.
double free_fermion_energy(int length, int n, bool periodic, bool antiperiodic) {
  std::vector<double> levels;
  for (int m = 0; m < length; ++m) {
    if (periodic) {
      const double k = 2.0 * kPi * (m + (antiperiodic ? 0.5 : 0.0)) / length;
      levels.push_back(-2.0 * std::cos(k));
    } else {
      levels.push_back(-2.0 * std::cos(kPi * (m + 1) / (length + 1)));
    }
  }
  std::sort(levels.begin(), levels.end());
  double e = 0.0;
  for (int i = 0; i < n; ++i) e += levels[i];
  return e;
}

ChainModel ring(int length, int n, std::vector<double> v) {
  ChainModel m;
  m.length = length;
  m.n_bosons = n;
  m.couplings = std::move(v);
  m.boundary = Boundary::periodic;
  return m;
}

}  // namespace

TEST_CASE("occupation basis") {
  const OccupationBasis b(4, 2);
  CHECK(b.size() == 6);
  CHECK(b.state(0) == 0b0011u);
  CHECK(OccupationBasis(12, 6).size() == 924);
  const OccupationBasis c(14, 5);
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(std::popcount(c.state(i)) == 5);
    CHECK(c.rank(c.state(i)) == i);
    CHECK(c.unrank(i) == c.state(i));
    if (i > 0) CHECK(c.state(i) > c.state(i - 1));
  }
  CHECK_THROWS_AS(OccupationBasis(25, 2), Error);
  CHECK(OccupationBasis(5, 0).size() == 1);
}

TEST_CASE("two sites give +-t") {
  ChainModel m;
  m.length = 2;
  m.n_bosons = 1;
  const auto e = dense_spectrum(m);
  CHECK(e[0] == doctest::Approx(-1.0));
  CHECK(e[1] == doctest::Approx(1.0));
}

TEST_CASE("diagonal energies count coupled pairs") {
  ChainModel m;
  m.length = 8;
  m.n_bosons = 4;
  m.couplings = {2.0};
  CHECK(interaction_energy(m, 0b01010101u) == 0.0);
  CHECK(interaction_energy(m, 0b11110000u) == 6.0);
  m.boundary = Boundary::periodic;
  CHECK(interaction_energy(m, 0b01010101u) == 0.0);
  CHECK(interaction_energy(m, 0b11110000u) == 6.0);
  CHECK(interaction_energy(m, 0b10000111u) == 6.0);  // sites 7,0,1,2 across the wrap
  m.boundary = Boundary::open;
  CHECK(interaction_energy(m, 0b10000111u) == 4.0);
  m.couplings = {0.0, 1.5};
  CHECK(interaction_energy(m, 0b01010101u) == 4.5);
}

TEST_CASE("twisted Hamiltonian is Hermitian and 2 pi periodic") {
  ChainModel m = ring(7, 3, {0.4, -0.3});
  m.twist = 0.9;
  const OccupationBasis b(7, 3);
  const Eigen::MatrixXcd h(build_hamiltonian<Complex>(m, b));
  CHECK((h - h.adjoint()).norm() < 1e-14);
  m.twist = 0.0;
  const Eigen::MatrixXcd h0(build_hamiltonian<Complex>(m, b));
  m.twist = 2.0 * kPi;
  const Eigen::MatrixXcd h2(build_hamiltonian<Complex>(m, b));
  CHECK((h0 - h2).norm() < 1e-12);
}

TEST_CASE("Lanczos matches dense diagonalization on random models") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    ChainModel m;
    m.length = 6 + trial % 7;
    m.n_bosons = 1 + trial % (m.length - 1);
    m.boundary = trial % 2 ? Boundary::periodic : Boundary::open;
    const int range = 1 + trial % 2;
    for (int s = 0; s < range; ++s) m.couplings.push_back(u(gen));
    if (m.boundary == Boundary::periodic) m.twist = trial % 4 == 1 ? 0.0 : 0.37 * trial;
    const auto dense = dense_spectrum(m);
    LanczosOptions opt;
    opt.n_states = 3;
    const EigenStates st = lowest_states(m, OccupationBasis(m.length, m.n_bosons), opt);
    for (int k = 0; k < std::min<int>(3, static_cast<int>(dense.size())); ++k)
      CHECK(st.values[k] == doctest::Approx(dense[k]).epsilon(1e-10));
    CHECK(st.vectors[0].norm() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("free hardcore bosons match Jordan-Wigner fermions") {
  // Even particle number on a ring: the fermions see antiperiodic boundaries.
  const GroundStateResult even = ground_state(ring(12, 6, {}));
  CHECK(even.energy == doctest::Approx(free_fermion_energy(12, 6, true, true)).epsilon(1e-10));
  const GroundStateResult odd = ground_state(ring(11, 5, {}));
  CHECK(odd.energy == doctest::Approx(free_fermion_energy(11, 5, true, false)).epsilon(1e-10));
  ChainModel open;
  open.length = 12;
  open.n_bosons = 6;
  const GroundStateResult o = ground_state(open);
  CHECK(o.energy == doctest::Approx(free_fermion_energy(12, 6, false, false)).epsilon(1e-10));
  CHECK(o.residual < 1e-8);
}

TEST_CASE("single-state sector") {
  ChainModel m = ring(6, 0, {1.0});
  const GroundStateResult g = ground_state(m);
  CHECK(g.energy == 0.0);
  CHECK(g.basis_dim == 1);
  CHECK(std::isinf(g.gap));
}

TEST_CASE("structure factor of product states") {
  const OccupationBasis b(10, 5);
  const StructureFactor neel = structure_factor(product_state(b, 0b0101010101u), b);
  CHECK(neel.q0 == doctest::Approx(kPi));
  CHECK(neel.s_max == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(std::abs(neel.s[0]) < 1e-12);
  const StructureFactor block = structure_factor(product_state(b, 0b0000011111u), b);
  for (std::size_t m = 1; m < block.s.size(); ++m) {
    CHECK(block.s[m] == doctest::Approx(block.s[block.s.size() - m]).epsilon(1e-12));
    CHECK(block.s[m] >= -1e-12);
  }
  // the two lowest nonzero q tie; the smaller one is reported
  CHECK(block.q0 == doctest::Approx(2.0 * kPi / 10));
}

TEST_CASE("ring observables respect translation and particle-hole symmetry") {
  const ChainModel m = ring(10, 5, {1.0, 0.3});
  const OccupationBasis b(10, 5);
  const GroundStateResult g = ground_state(m);
  REQUIRE_FALSE(g.degenerate);
  for (double n : site_densities(g.amplitudes, b)) CHECK(n == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(std::abs(bond_observables(g.amplitudes, m, b).order) < 1e-8);
  const StructureFactor sf = structure_factor(g.amplitudes, b);
  CHECK(std::abs(sf.s[0]) < 1e-12);

  // n -> 1 - n maps N particles to L - N up to a constant on a ring
  const ChainModel few = ring(10, 3, {1.0, 0.3});
  const ChainModel many = ring(10, 7, {1.0, 0.3});
  const double shift = (1.0 + 0.3) * (10 - 2 * 3);
  CHECK(ground_state(many).energy ==
        doctest::Approx(ground_state(few).energy + shift).epsilon(1e-10));
}

TEST_CASE("edge profile") {
  ChainModel open;
  open.length = 6;
  open.n_bosons = 3;
  const OccupationBasis b(6, 3);
  const auto n = edge_profile(product_state(b, 0b010101u), open, b);
  CHECK(n == std::vector<double>{1, 0, 1, 0, 1, 0});
  ChainModel empty = open;
  empty.n_bosons = 0;
  const OccupationBasis e(6, 0);
  for (double x : edge_profile(ground_state(empty).amplitudes, empty, e)) CHECK(x == 0.0);
  CHECK(bond_observables(ground_state(empty).amplitudes, empty, e).order == 0.0);
  CHECK_THROWS_AS(edge_profile(product_state(b, 0b010101u), ring(6, 3, {}), b), Error);
}

TEST_CASE("bond order of a dimer product") {
  // Two particles on bonds (0,1) and (2,3) in bonding orbitals: <B_0> = <B_2> = 1.
  ChainModel m;
  m.length = 4;
  m.n_bosons = 2;
  const OccupationBasis b(4, 2);
  StateVector v = StateVector::Zero(6);
  const double h = 0.5;
  for (std::uint32_t a : {0b0001u, 0b0010u})
    for (std::uint32_t c : {0b0100u, 0b1000u}) v[static_cast<Eigen::Index>(b.rank(a | c))] = h;
  const BondObservables bo = bond_observables(v, m, b);
  CHECK(bo.order == doctest::Approx((1.0 + 1.0) / 4.0));
}

TEST_CASE("Berry phase is gauge invariant and quantized") {
  BerryOptions opt;
  opt.steps = 12;
  opt.multiplet = 2;
  const ChainModel bow = ring(12, 6, {4.0, 2.0});
  const ChainModel cdw = ring(12, 6, {4.0});
  const double g_bow = berry_phase(bow, opt).gamma;
  const double g_cdw = berry_phase(cdw, opt).gamma;
  CHECK(std::abs(std::remainder(g_bow - g_cdw - kPi, 2.0 * kPi)) < 1e-2);
  for (double g : {g_bow, g_cdw}) {
    const double to_lattice = std::min(std::abs(std::remainder(g, kPi)), kPi);
    CHECK(to_lattice < 1e-2);
  }
  opt.steps = 24;
  CHECK(std::abs(std::remainder(berry_phase(bow, opt).gamma - g_bow, 2.0 * kPi)) < 1e-3);

  // Random per-twist phases (and unitary mixing inside the multiplet).
  const OccupationBasis b(12, 6);
  TwistStates loop;
  LanczosOptions lz;
  lz.n_states = 2;
  for (int i = 0; i < 12; ++i) {
    ChainModel t = bow;
    t.twist = 2.0 * kPi * i / 12;
    auto st = lowest_states(t, b, lz);
    loop.push_back({st.vectors[0], st.vectors[1]});
  }
  const double reference = berry_phase(loop);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  for (auto& pt : loop) {
    const Complex a = std::polar(1.0, u(gen));
    const Complex c = std::polar(1.0, u(gen));
    const double mix = u(gen);
    const StateVector x = pt[0];
    const StateVector y = pt[1];
    pt[0] = a * (std::cos(mix) * x + std::sin(mix) * y);
    pt[1] = c * (-std::sin(mix) * x + std::cos(mix) * y);
  }
  CHECK(std::abs(std::remainder(berry_phase(loop) - reference, 2.0 * kPi)) < 1e-10);
}

TEST_CASE("Berry phase needs a ring and a separated multiplet") {
  ChainModel open;
  open.length = 6;
  open.n_bosons = 3;
  CHECK_THROWS_AS(berry_phase(open), Error);
  BerryOptions single;
  single.multiplet = 1;
  // free half-filled ring: levels cross under a 2 pi twist
  CHECK_THROWS_AS(berry_phase(ring(8, 4, {}), single), Error);
}

TEST_CASE("chain couplings rescale and report the dropped tail") {
  CouplingTable t{{2.0, -4.0, 1.0, 0.5, 0.1, 0.3, 0.01}, 1.0};
  std::string warning;
  const auto v = chain_couplings(t, 12, 4.0, &warning);
  REQUIRE(v.size() == 5);
  CHECK(v[1] == doctest::Approx(-4.0));
  CHECK(v[0] == doctest::Approx(2.0));
  CHECK_FALSE(warning.empty());  // |v6 / v1| = 0.15
  t.couplings[5] = 0.05;
  chain_couplings(t, 12, 4.0, &warning);
  CHECK(warning.empty());
  CHECK(phase_range(8) == 3);
  CHECK(phase_range(24) == 5);
  CHECK_THROWS_AS(chain_couplings(CouplingTable{{1.0, 0.5}, 1.0}, 12, 4.0), Error);
}

TEST_CASE("a one-cell scan reproduces the single solve") {
  PhaseCell cell{0.0, 1.5, CouplingTable{{1.0, 0.5, 0.0, 0.0, 0.0, 0.0}, 1.5}};
  PhaseOptions opt;
  opt.length = 10;
  opt.n_bosons = 5;
  const PhaseRow direct = solve_cell(cell, opt);
  const auto rows = phase_scan(std::span(&cell, 1), opt);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].q0 == direct.q0);
  CHECK(rows[0].s_max == direct.s_max);
  CHECK(rows[0].bond == direct.bond);
  CHECK(direct.error.empty());

  // failures are recorded, not thrown
  PhaseCell bad{0.0, 1.5, CouplingTable{{0.0, 0.0, 0.0, 0.0, 0.0}, 1.5}};
  const PhaseRow r = solve_cell(bad, opt);
  CHECK_FALSE(r.error.empty());
}
