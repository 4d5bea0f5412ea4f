// Copyright 2026 The rkky Authors
// SPDX-License-Identifier: Apache-2.0
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "rkky/errors.hpp"
#include "rkky/manybody.hpp"

namespace rkky {

namespace {

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
Vector<Scalar> random_start(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  // Raw generator bits mapped to [-1, 1); fixed across standard libraries.
  auto uniform = [&] {
    return 2.0 * static_cast<double>(gen() >> 11) * 0x1.0p-53 - 1.0;
  };
  Vector<Scalar> v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if constexpr (std::is_same_v<Scalar, Complex>) {
      const double re = uniform();
      v[i] = Complex(re, uniform());
    } else {
      v[i] = uniform();
    }
  }
  return v;
}

template <class Scalar>
void project_out(Vector<Scalar>& v, const std::vector<Vector<Scalar>>& basis) {
  for (const auto& b : basis) v -= b * b.dot(v);
}

struct Ritz {
  double value;
  Eigen::VectorXd coords;
  double estimate;  // |beta_m * last coordinate|
};

Ritz lowest_ritz(const std::vector<double>& alpha, const std::vector<double>& beta,
                 double beta_last) {
  const auto m = static_cast<Eigen::Index>(alpha.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    t(i, i) = alpha[i];
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  Ritz r{es.eigenvalues()[0], es.eigenvectors().col(0), 0.0};
  r.estimate = std::abs(beta_last * r.coords[m - 1]);
  return r;
}

// One eigenpair in the complement of `locked`, restarting from the current
// Ritz vector whenever the Krylov space fills up.
template <class Scalar>
std::pair<double, Vector<Scalar>> next_state(const SparseOperator<Scalar>& h,
                                             const std::vector<Vector<Scalar>>& locked,
                                             Vector<Scalar> start,
                                             const LanczosOptions& options, double* residual) {
  const Eigen::Index dim = h.rows();
  const auto free_dim = static_cast<int>(dim) - static_cast<int>(locked.size());
  const int krylov_max = std::max(1, std::min(options.krylov_max, free_dim));
  const double scale = std::max(1.0, h.cwiseAbs().sum() / static_cast<double>(dim));

  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    project_out(start, locked);
    const double norm = start.norm();
    if (!(norm > 0.0))
      throw Error(ErrorCode::convergence_failure, "Lanczos start vector vanished");
    std::vector<Vector<Scalar>> q{start / norm};
    std::vector<double> alpha;
    std::vector<double> beta;
    Ritz ritz{};
    bool done = false;
    for (int j = 0; j < krylov_max; ++j) {
      Vector<Scalar> w = h * q[j];
      alpha.push_back(std::real(q[j].dot(w)));
      // Two passes of full reorthogonalization against locked and Krylov vectors.
      for (int pass = 0; pass < 2; ++pass) {
        project_out(w, locked);
        for (const auto& v : q) w -= v * v.dot(w);
      }
      const double b = w.norm();
      const bool exhausted = b <= 1e-13 * scale || j + 1 == free_dim;
      if (exhausted || (j + 1) % 10 == 0 || j + 1 == krylov_max) {
        ritz = lowest_ritz(alpha, beta, exhausted ? 0.0 : b);
        if (exhausted || ritz.estimate < 0.1 * options.tolerance) {
          done = true;
          break;
        }
      }
      if (j + 1 == krylov_max) break;
      beta.push_back(b);
      q.push_back(w / b);
    }
    if (!done) ritz = lowest_ritz(alpha, beta, 0.0);

    Vector<Scalar> x = Vector<Scalar>::Zero(dim);
    for (std::size_t i = 0; i < static_cast<std::size_t>(ritz.coords.size()); ++i)
      x += q[i] * ritz.coords[static_cast<Eigen::Index>(i)];
    project_out(x, locked);
    x.normalize();
    const double value = std::real(x.dot(h * x));
    const double res = (h * x - value * x).norm();
    if (res < options.tolerance) {
      *residual = res;
      return {value, x};
    }
    start = x;
  }
  throw Error(ErrorCode::convergence_failure, "Lanczos did not converge");
}

}  // namespace

template <class Scalar>
EigenStates lowest_states(const SparseOperator<Scalar>& h, const LanczosOptions& options) {
  const Eigen::Index dim = h.rows();
  if (dim < 1) throw Error(ErrorCode::domain_error, "empty operator");
  const int want = std::min<int>(options.n_states, static_cast<int>(dim));
  EigenStates out;
  std::vector<Vector<Scalar>> locked;
  for (int k = 0; k < want; ++k) {
    double residual = 0.0;
    auto [value, vec] = next_state<Scalar>(h, locked, random_start<Scalar>(dim, options.seed + k),
                                           options, &residual);
    out.values.push_back(value);
    out.residuals.push_back(residual);
    out.vectors.push_back(vec.template cast<Complex>());
    locked.push_back(std::move(vec));
  }
  // Deflation finds the levels in order up to roundoff; sort to be safe.
  std::vector<std::size_t> order(out.values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return out.values[a] < out.values[b]; });
  EigenStates sorted;
  for (auto i : order) {
    sorted.values.push_back(out.values[i]);
    sorted.vectors.push_back(std::move(out.vectors[i]));
    sorted.residuals.push_back(out.residuals[i]);
  }
  return sorted;
}

template EigenStates lowest_states<double>(const SparseOperator<double>&, const LanczosOptions&);
template EigenStates lowest_states<Complex>(const SparseOperator<Complex>&, const LanczosOptions&);

EigenStates lowest_states(const ChainModel& model, const OccupationBasis& basis,
                          const LanczosOptions& options) {
  if (model.is_real()) return lowest_states(build_hamiltonian<double>(model, basis), options);
  return lowest_states(build_hamiltonian<Complex>(model, basis), options);
}

GroundStateResult ground_state(const ChainModel& model, const LanczosOptions& options) {
  model.validate();
  const OccupationBasis basis(model.length, model.n_bosons);
  LanczosOptions opts = options;
  opts.n_states = std::max(opts.n_states, 2);
  const EigenStates states = lowest_states(model, basis, opts);
  GroundStateResult result;
  result.energy = states.values[0];
  result.amplitudes = states.vectors[0];
  result.basis_dim = basis.size();
  result.residual = states.residuals[0];
  result.gap = states.values.size() > 1 ? states.values[1] - states.values[0]
                                        : std::numeric_limits<double>::infinity();
  result.degenerate = result.gap < 1e-10;
  return result;
}

}  // namespace rkky
