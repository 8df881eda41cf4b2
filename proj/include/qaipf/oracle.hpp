// Copyright 2026 The qaipf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QAIPF_ORACLE_HPP
#define QAIPF_ORACLE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "qaipf/bits.hpp"
#include "qaipf/errors.hpp"
#include "qaipf/estimator.hpp"
#include "qaipf/evolution.hpp"
#include "qaipf/model.hpp"
#include "qaipf/numeric.hpp"
#include "qaipf/sampling.hpp"

/**
 * \file
 * \brief Brute-force references: exact Z1, mu_m, optimal tables, KL fit,
 * a dense propagator for small n, and the neighbour-locality diagnostic.
 * Everything here costs O(2^n) or more and is capped accordingly.
 */

namespace qaipf {

inline constexpr int kExactMuMaxSpins = 14;
inline constexpr int kDenseMaxSpins = 4;
inline constexpr int kLocalityMaxSpins = 12;

/// Z1(beta) = sum_n exp(-beta E1_n), ascending index order, compensated.
[[nodiscard]] inline double exact_partition(const DiagonalSpectrum& spectrum, double beta) {
  CompensatedSum acc;
  for (const double e : spectrum.energies()) {
    acc.add(std::exp(-beta * e));
  }
  return acc.value();
}

/// mu_m = sum_n exp(-2 beta E1_n) P(n | m) for every m.
[[nodiscard]] inline std::vector<double> mu_from_transitions(const TransitionMatrix& matrix,
                                                             const DiagonalSpectrum& spectrum, double beta) {
  const std::size_t dim = matrix.dimension();
  if (spectrum.size() != dim) {
    throw InvalidArgument("mu_from_transitions: spectrum and matrix sizes differ");
  }
  std::vector<double> weight(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    weight[k] = std::exp(-2.0 * beta * spectrum[k]);
  }
  std::vector<double> mu(dim);
  for (std::size_t m = 0; m < dim; ++m) {
    const auto row = matrix.row(m);
    CompensatedSum acc;
    for (std::size_t k = 0; k < dim; ++k) {
      acc.add(weight[k] * row[k]);
    }
    mu[m] = acc.value();
  }
  return mu;
}

[[nodiscard]] inline TransitionMatrix exact_transitions(const IsingInstance& instance, const Schedule& schedule,
                                                        unsigned workers = 0) {
  if (instance.n > kExactMuMaxSpins) {
    throw ResourceLimit("exact analysis is capped at n <= 14");
  }
  return Evolver(target_spectrum(instance), schedule).transition_matrix(workers);
}

[[nodiscard]] inline std::vector<double> exact_mu(const IsingInstance& instance, const Schedule& schedule, double beta,
                                                  unsigned workers = 0) {
  return mu_from_transitions(exact_transitions(instance, schedule, workers), target_spectrum(instance), beta);
}

/**
 * Reference propagator on the dense 2^n x 2^n Hamiltonian: fourth-order
 * commutator-free Magnus steps of length <= dt_ref, each the product of two
 * exact exponentials of real-symmetric combinations of H at the two Gauss
 * nodes (eigendecomposition, no splitting). Independent of the production
 * propagator's data layout and splitting.
 */
[[nodiscard]] inline StateVector dense_reference_evolve(const IsingInstance& instance, BasisIndex m,
                                                        const Schedule& schedule, double dt_ref = 1e-3) {
  const int n = instance.n;
  if (n > kDenseMaxSpins) {
    throw ResourceLimit("dense reference is capped at n <= 4");
  }
  if (!(dt_ref > 0.0) || dt_ref > 1e-3) {
    throw InvalidArgument("dense reference: need 0 < dt_ref <= 1e-3");
  }
  const auto spectrum = target_spectrum(instance);
  const int dim = static_cast<int>(spectrum.size());
  if (m >= spectrum.size()) {
    throw InvalidArgument("dense reference: basis index out of range");
  }
  const double tau = schedule.tau;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi[static_cast<Eigen::Index>(m)] = 1.0;
  if (tau == 0.0) {
    return {n, std::vector<Amplitude>(psi.data(), psi.data() + dim)};
  }
  auto hamiltonian = [&](double t) {
    const double s = t / tau;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
      h(i, i) = s * spectrum[static_cast<BasisIndex>(i)] + (1.0 - s) * (1.0 - s) * std::popcount(static_cast<unsigned>(i));
      for (int b = 0; b < n; ++b) {
        h(i, i ^ (1 << b)) -= (1.0 - s) * s * schedule.gamma;
      }
    }
    return h;
  };
  auto apply_exp = [&](const Eigen::MatrixXd& h, double step) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    const Eigen::MatrixXcd v = eig.eigenvectors().cast<std::complex<double>>();
    Eigen::VectorXcd w = v.adjoint() * psi;
    for (int i = 0; i < dim; ++i) {
      w[i] *= std::exp(std::complex<double>(0.0, -step * eig.eigenvalues()[i]));
    }
    psi = v * w;
  };
  const auto steps = static_cast<std::int64_t>(std::ceil(tau / dt_ref - 1e-9));
  const double h = tau / static_cast<double>(steps);
  const double r3 = std::sqrt(3.0);
  const double a1 = (3.0 - 2.0 * r3) / 12.0;
  const double a2 = (3.0 + 2.0 * r3) / 12.0;
  const double c1 = 0.5 - r3 / 6.0;
  const double c2 = 0.5 + r3 / 6.0;
  for (std::int64_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * h;
    const Eigen::MatrixXd h1 = hamiltonian(t + c1 * h);
    const Eigen::MatrixXd h2 = hamiltonian(t + c2 * h);
    apply_exp(a2 * h1 + a1 * h2, h);
    apply_exp(a1 * h1 + a2 * h2, h);
  }
  return {n, std::vector<Amplitude>(psi.data(), psi.data() + dim)};
}

/**
 * Gibbs-family alpha closest in KL divergence to a target distribution.
 * Setting d/dalpha KL(P || P^G_alpha) = 0 gives (1 + e^alpha) <E0>_P = n,
 * so alpha = ln(n / <E0>_P - 1).
 */
[[nodiscard]] inline double kl_fit_alpha(std::span<const double> probs, int n) {
  if (probs.size() != dimension(n)) {
    throw InvalidArgument("kl_fit_alpha: expected 2^n probabilities");
  }
  CompensatedSum mean;
  for (std::size_t m = 0; m < probs.size(); ++m) {
    mean.add(hamming_weight(m) * probs[m]);
  }
  const double e = mean.value();
  if (!(e > 0.0) || !(e < n)) {
    throw NoRoot("kl_fit_alpha: mean H0 energy at the boundary of [0, n]", e, static_cast<double>(n) - e);
  }
  return std::log(n / e - 1.0);
}

/// Q_E proportional to e^{alpha E} sum_{m in I_E} mu_m, normalised over E = 0..n.
[[nodiscard]] inline std::vector<double> q_distribution(std::span<const double> mu, double alpha, int n) {
  if (mu.size() != dimension(n)) {
    throw InvalidArgument("q_distribution: expected 2^n entries");
  }
  const auto sums = shell_sums(mu);
  std::vector<double> logs(sums.size());
  for (int e = 0; e <= n; ++e) {
    logs[static_cast<std::size_t>(e)] = std::log(sums[static_cast<std::size_t>(e)]) + alpha * e;
  }
  const double norm = log_sum_exp(logs);
  for (double& v : logs) {
    v = std::exp(v - norm);
  }
  return logs;
}

/// Full exact analysis at one beta.
struct ExactAnalysis {
  double beta = 0.0;
  double z1 = 0.0;
  std::vector<double> mu;
  std::vector<double> p_opt;
  double sigma2_min = 0.0;
  double alpha_star = 0.0;
  double alpha_kl = 0.0;
  std::vector<double> q_dist;
};

[[nodiscard]] inline ExactAnalysis analyze_exact(const TransitionMatrix& matrix, const DiagonalSpectrum& spectrum,
                                                 double beta) {
  const int n = spectrum.spins();
  ExactAnalysis out;
  out.beta = beta;
  out.z1 = exact_partition(spectrum, beta);
  out.mu = mu_from_transitions(matrix, spectrum, beta);
  const auto dist = exact_optimal(out.mu);
  out.p_opt.resize(out.mu.size());
  for (std::size_t m = 0; m < out.mu.size(); ++m) {
    out.p_opt[m] = dist.prob(m);
  }
  out.sigma2_min = min_variance(out.mu, out.z1);
  out.alpha_star = solve_alpha_exact(out.mu, n).alpha;
  out.alpha_kl = kl_fit_alpha(out.p_opt, n);
  out.q_dist = q_distribution(out.mu, out.alpha_star, n);
  return out;
}

/**
 * Nearest-neighbour locality of nu_m = sqrt(mu_m) over site pairs (j1, j2):
 * (a) e^{-alpha}/2 (nu_{[j1]} + nu_{[j2]}), (b) nu_{[j1 j2]},
 * (c) e^{alpha}/(n - 2) sum_{j3 != j1, j2} nu_{[j1 j2 j3]},
 * where [..] is the state with exactly those spins flipped down. Diagonal
 * entries are NaN. If the extrapolation ansatz holds, all three agree.
 */
struct LocalityDiagnostic {
  int n = 0;
  std::vector<double> a;  // row-major n x n
  std::vector<double> b;
  std::vector<double> c;
  double correlation_ab = 0.0;
  double correlation_bc = 0.0;
};

namespace detail {
inline double off_diagonal_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0.0;
  double sy = 0.0;
  double k = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isnan(x[i])) {
      sx += x[i];
      sy += y[i];
      k += 1.0;
    }
  }
  const double mx = sx / k;
  const double my = sy / k;
  double cxy = 0.0;
  double cxx = 0.0;
  double cyy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isnan(x[i])) {
      cxy += (x[i] - mx) * (y[i] - my);
      cxx += (x[i] - mx) * (x[i] - mx);
      cyy += (y[i] - my) * (y[i] - my);
    }
  }
  if (cxx == 0.0 || cyy == 0.0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return cxy / std::sqrt(cxx * cyy);
}
}  // namespace detail

[[nodiscard]] inline LocalityDiagnostic locality_from_mu(std::span<const double> mu, double alpha) {
  const int n = detail::spins_for_length(mu.size());
  if (n < 3) {
    throw InvalidArgument("locality diagnostic needs n >= 3");
  }
  auto nu = [&](BasisIndex m) { return std::sqrt(mu[m]); };
  const auto nn = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  LocalityDiagnostic out{n, std::vector<double>(nn, nan), std::vector<double>(nn, nan), std::vector<double>(nn, nan)};
  for (int j1 = 0; j1 < n; ++j1) {
    for (int j2 = 0; j2 < n; ++j2) {
      if (j1 == j2) {
        continue;
      }
      const BasisIndex b1 = BasisIndex{1} << j1;
      const BasisIndex b2 = BasisIndex{1} << j2;
      CompensatedSum third;
      for (int j3 = 0; j3 < n; ++j3) {
        if (j3 != j1 && j3 != j2) {
          third.add(nu(b1 | b2 | (BasisIndex{1} << j3)));
        }
      }
      const auto at = static_cast<std::size_t>(j1 * n + j2);
      out.a[at] = std::exp(-alpha) / 2.0 * (nu(b1) + nu(b2));
      out.b[at] = nu(b1 | b2);
      out.c[at] = std::exp(alpha) / (n - 2) * third.value();
    }
  }
  out.correlation_ab = detail::off_diagonal_correlation(out.a, out.b);
  out.correlation_bc = detail::off_diagonal_correlation(out.b, out.c);
  return out;
}

[[nodiscard]] inline LocalityDiagnostic locality_diagnostic(const IsingInstance& instance, const Schedule& schedule,
                                                            double beta, double alpha, unsigned workers = 0) {
  if (instance.n < 3) {
    throw InvalidArgument("locality diagnostic needs n >= 3");
  }
  if (instance.n > kLocalityMaxSpins) {
    throw ResourceLimit("locality diagnostic is capped at n <= 12");
  }
  return locality_from_mu(exact_mu(instance, schedule, beta, workers), alpha);
}

}  // namespace qaipf

#endif  // QAIPF_ORACLE_HPP
