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

#ifndef QAIPF_ESTIMATOR_HPP
#define QAIPF_ESTIMATOR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qaipf/bits.hpp"
#include "qaipf/errors.hpp"
#include "qaipf/evolution.hpp"
#include "qaipf/numeric.hpp"
#include "qaipf/parallel.hpp"
#include "qaipf/random.hpp"
#include "qaipf/sampling.hpp"

/**
 * \file
 * \brief Trajectory estimator for Z1(beta) and the variance bookkeeping around it.
 *
 * One trajectory draws m from P, evolves |m>, measures n and returns
 * z = exp(-beta E1_n) / P_m, whose expectation is Z1(beta) for any strictly
 * positive P. Its variance is sum_m mu_m / P_m - Z1^2.
 */

namespace qaipf {

/// One evolve-and-measure trajectory.
struct Trajectory {
  BasisIndex initial = 0;
  BasisIndex outcome = 0;
  double e0 = 0.0;
  double e1 = 0.0;
  double z = 0.0;
  bool operator==(const Trajectory&) const = default;
};

struct EstimateResult {
  double beta = 0.0;
  double z_est = 0.0;
  std::size_t m_s = 0;
  /// Unbiased (M_s - 1) sample variance of the z values; 0 when M_s = 1.
  double empirical_variance = 0.0;
  double standard_error = 0.0;
  std::uint64_t seed = 0;
  std::string sampler;
  Schedule schedule;
  /// Per-trajectory records in trajectory-index order (empty unless requested).
  std::vector<Trajectory> trajectories;

  [[nodiscard]] double relative_error() const { return standard_error / z_est; }
};

/// Supplies transition rows for batches of initial states.
using RowSource = std::function<std::vector<TransitionRow>(std::span<const BasisIndex>)>;

[[nodiscard]] inline RowSource row_source(const Evolver& evolver) {
  return [&evolver](std::span<const BasisIndex> ms) { return evolver.transition_rows(ms); };
}

[[nodiscard]] inline RowSource row_source(const TransitionMatrix& matrix) {
  return [&matrix](std::span<const BasisIndex> ms) {
    std::vector<TransitionRow> rows;
    rows.reserve(ms.size());
    for (const BasisIndex m : ms) {
      const auto r = matrix.row(m);
      rows.push_back({m, std::vector<double>(r.begin(), r.end())});
    }
    return rows;
  };
}

namespace detail {

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;
};

inline SampleMoments sample_moments(std::span<const double> z) {
  SampleMoments out;
  out.mean = compensated_sum(z) / static_cast<double>(z.size());
  if (z.size() > 1) {
    CompensatedSum acc;
    for (const double v : z) {
      acc.add((v - out.mean) * (v - out.mean));
    }
    out.variance = acc.value() / static_cast<double>(z.size() - 1);
  }
  return out;
}

}  // namespace detail

/**
 * Runs m_s trajectories with initial states drawn from `dist`. Trajectory i
 * uses the stream keyed by (seed, i) for both its initial draw and its
 * measurement. Initial states are drawn first, distinct ones are evolved in
 * blocks across workers, and the reduction runs in trajectory order, so the
 * result does not depend on the worker count.
 */
[[nodiscard]] inline EstimateResult estimate_z(const RowSource& rows, const DiagonalSpectrum& spectrum,
                                               const SamplingDistribution& dist, double beta, std::size_t m_s,
                                               std::uint64_t seed, unsigned workers = 0,
                                               bool keep_trajectories = false) {
  if (m_s == 0) {
    throw InvalidArgument("estimate_z: need m_s >= 1");
  }
  if (dist.spins() != spectrum.spins()) {
    throw InvalidArgument("estimate_z: distribution and instance disagree on n");
  }
  std::vector<RandomStream> streams;
  streams.reserve(m_s);
  std::vector<Trajectory> traj(m_s);
  for (std::size_t i = 0; i < m_s; ++i) {
    streams.push_back(make_stream(seed, StreamDomain::kTrajectory, i));
    traj[i].initial = dist.sample(streams.back());
  }
  std::vector<std::size_t> order(m_s);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return traj[a].initial < traj[b].initial; });
  std::vector<BasisIndex> distinct;
  std::vector<std::size_t> first_of;  // position in `order` where each distinct state starts
  for (std::size_t k = 0; k < m_s; ++k) {
    if (distinct.empty() || traj[order[k]].initial != distinct.back()) {
      distinct.push_back(traj[order[k]].initial);
      first_of.push_back(k);
    }
  }
  first_of.push_back(m_s);

  constexpr std::size_t kBlock = 16;
  const std::size_t blocks = (distinct.size() + kBlock - 1) / kBlock;
  parallel_for(blocks, workers, [&](std::size_t b) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(distinct.size(), lo + kBlock);
    const auto batch = rows(std::span<const BasisIndex>(distinct).subspan(lo, hi - lo));
    for (std::size_t d = lo; d < hi; ++d) {
      const auto& probs = batch[d - lo].probs;
      const double p = dist.prob(distinct[d]);
      for (std::size_t k = first_of[d]; k < first_of[d + 1]; ++k) {
        auto& t = traj[order[k]];
        t.outcome = sample_from_row(probs, streams[order[k]]);
        t.e0 = static_cast<double>(hamming_weight(t.initial));
        t.e1 = spectrum[t.outcome];
        t.z = std::exp(-beta * t.e1) / p;
      }
    }
  });

  std::vector<double> z(m_s);
  std::transform(traj.begin(), traj.end(), z.begin(), [](const Trajectory& t) { return t.z; });
  const auto mom = detail::sample_moments(z);
  EstimateResult out;
  out.beta = beta;
  out.z_est = mom.mean;
  out.m_s = m_s;
  out.empirical_variance = mom.variance;
  out.standard_error = std::sqrt(mom.variance / static_cast<double>(m_s));
  out.seed = seed;
  out.sampler = dist.describe();
  if (keep_trajectories) {
    out.trajectories = std::move(traj);
  }
  return out;
}

[[nodiscard]] inline EstimateResult estimate_z(const Evolver& evolver, const SamplingDistribution& dist, double beta,
                                               std::size_t m_s, std::uint64_t seed, unsigned workers = 0,
                                               bool keep_trajectories = false) {
  auto out = estimate_z(row_source(evolver), evolver.spectrum(), dist, beta, m_s, seed, workers, keep_trajectories);
  out.schedule = evolver.schedule();
  return out;
}

[[nodiscard]] inline EstimateResult estimate_z(const IsingInstance& instance, const Schedule& schedule,
                                               const SamplingDistribution& dist, double beta, std::size_t m_s,
                                               std::uint64_t seed, unsigned workers = 0,
                                               bool keep_trajectories = false) {
  return estimate_z(Evolver(target_spectrum(instance), schedule), dist, beta, m_s, seed, workers, keep_trajectories);
}

/// Jarzynski form of the JE-sampler estimate: Z1 / Z0 = <exp(-beta W)>, W = E1_n - E0_m.
struct JeWorkResult {
  EstimateResult estimate;
  double ratio = 0.0;
  double z0 = 0.0;
  /// |Z0 * ratio - z_est| / z_est over the same trajectories.
  double identity_gap = 0.0;
};

[[nodiscard]] inline JeWorkResult je_work_estimate(const Evolver& evolver, double beta, std::size_t m_s,
                                                   std::uint64_t seed, unsigned workers = 0) {
  const auto dist = je_gibbs(beta, evolver.spins());
  JeWorkResult out;
  out.estimate = estimate_z(evolver, dist, beta, m_s, seed, workers, true);
  std::vector<double> w(m_s);
  std::transform(out.estimate.trajectories.begin(), out.estimate.trajectories.end(), w.begin(),
                 [beta](const Trajectory& t) { return std::exp(-beta * (t.e1 - t.e0)); });
  out.ratio = compensated_sum(w) / static_cast<double>(m_s);
  out.z0 = std::pow(1.0 + std::exp(-beta), evolver.spins());
  out.identity_gap = std::abs(out.z0 * out.ratio - out.estimate.z_est) / out.estimate.z_est;
  return out;
}

/**
 * Estimate that reuses the presampling records. The presampled layer
 * (H0 energy <= n_e) is summed directly, each state contributing the mean of
 * exp(-beta E1) over its records, and only the shells above n_e are importance
 * sampled, from the practical shell weights renormalised to those shells.
 */
struct ReuseEstimate {
  double z_est = 0.0;
  double standard_error = 0.0;
  double low_part = 0.0;
  double low_standard_error = 0.0;
  /// Importance-sampled part over shells E > n_e (absent when n_e = n).
  EstimateResult high;
};

[[nodiscard]] inline ReuseEstimate estimate_z_with_reuse(const Evolver& evolver, const PresampleData& data,
                                                         double alpha, double beta, std::size_t m_s,
                                                         std::uint64_t seed, unsigned workers = 0) {
  if (data.n != evolver.spins()) {
    throw InvalidArgument("estimate_z_with_reuse: presample data and instance disagree on n");
  }
  ReuseEstimate out;
  CompensatedSum low;
  CompensatedSum low_var;
  for (const auto& rec : data.records) {
    std::vector<double> w(rec.energies.size());
    std::transform(rec.energies.begin(), rec.energies.end(), w.begin(),
                   [beta](double e) { return std::exp(-beta * e); });
    const auto mom = detail::sample_moments(w);
    low.add(mom.mean);
    low_var.add(mom.variance / static_cast<double>(w.size()));
  }
  out.low_part = low.value();
  out.low_standard_error = std::sqrt(low_var.value());
  out.z_est = out.low_part;
  out.standard_error = out.low_standard_error;
  if (data.n_e < data.n) {
    const auto mom = presample_moments(data, beta);
    const auto ext = extrapolate_shells(mom, alpha);
    std::vector<double> shell_weight(static_cast<std::size_t>(data.n + 1), 0.0);
    for (int e = data.n_e + 1; e <= data.n; ++e) {
      shell_weight[static_cast<std::size_t>(e)] = ext.nu_bar[static_cast<std::size_t>(e)];
    }
    const auto high_dist = SamplingDistribution::low_plus_shells(alpha, data.n, data.n_e, {}, {}, shell_weight);
    out.high = estimate_z(evolver, high_dist, beta, m_s, seed, workers);
    out.z_est += out.high.z_est;
    out.standard_error = std::hypot(out.low_standard_error, out.high.standard_error);
  }
  return out;
}

/// sigma^2 = sum_m mu_m / P_m - Z1^2.
[[nodiscard]] inline double exact_variance(const SamplingDistribution& dist, std::span<const double> mu, double z1) {
  if (mu.size() != dimension(dist.spins())) {
    throw InvalidArgument("exact_variance: mu and distribution sizes differ");
  }
  CompensatedSum acc;
  for (std::size_t m = 0; m < mu.size(); ++m) {
    acc.add(mu[m] / dist.prob(m));
  }
  return acc.value() - z1 * z1;
}

/// sigma^2_min = (sum_m sqrt(mu_m))^2 - Z1^2, attained by P proportional to sqrt(mu).
[[nodiscard]] inline double min_variance(std::span<const double> mu, double z1) {
  CompensatedSum acc;
  for (const double v : mu) {
    if (!(v > 0.0)) {
      throw InvalidArgument("min_variance: mu entries must be positive");
    }
    acc.add(std::sqrt(v));
  }
  return acc.value() * acc.value() - z1 * z1;
}

/// Samples needed for relative standard error epsilon: ceil(sigma^2 / (epsilon^2 Z1^2)).
[[nodiscard]] inline std::uint64_t required_samples(double sigma2, double epsilon, double z1) {
  if (!(sigma2 > 0.0) || !(epsilon > 0.0) || !(z1 > 0.0)) {
    throw InvalidArgument("required_samples: inputs must be positive");
  }
  const double m = sigma2 / (epsilon * epsilon * z1 * z1);
  // Absorb rounding in the quotient so exact ratios do not round up by one.
  const double nearest = std::nearbyint(m);
  const double snapped = std::abs(m - nearest) <= 1e-9 * std::max(1.0, nearest) ? nearest : m;
  return static_cast<std::uint64_t>(std::ceil(snapped));
}

struct ScalingPoint {
  int n = 0;
  double relvar = 0.0;
};

struct ScalingFit {
  std::vector<ScalingPoint> points;
  double gamma = 0.0;
  double intercept = 0.0;
  double residual_norm = 0.0;
};

/// Unweighted least squares of log2(relvar) against n; the slope is gamma.
[[nodiscard]] inline ScalingFit fit_gamma(std::span<const ScalingPoint> points) {
  if (points.size() < 3) {
    throw InvalidArgument("fit_gamma: need at least 3 points");
  }
  ScalingFit fit;
  fit.points.assign(points.begin(), points.end());
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& p : points) {
    if (!(p.relvar > 0.0) || !std::isfinite(p.relvar)) {
      throw InvalidArgument("fit_gamma: relative variances must be positive and finite");
    }
    sx += p.n;
    sy += std::log2(p.relvar);
  }
  const double k = static_cast<double>(points.size());
  const double mx = sx / k;
  const double my = sy / k;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& p : points) {
    sxx += (p.n - mx) * (p.n - mx);
    sxy += (p.n - mx) * (std::log2(p.relvar) - my);
  }
  if (sxx == 0.0) {
    throw InvalidArgument("fit_gamma: need at least two distinct n");
  }
  fit.gamma = sxy / sxx;
  fit.intercept = my - fit.gamma * mx;
  double r2 = 0.0;
  for (const auto& p : points) {
    const double r = std::log2(p.relvar) - (fit.intercept + fit.gamma * p.n);
    r2 += r * r;
  }
  fit.residual_norm = std::sqrt(r2);
  return fit;
}

/// Exponent of the Gibbs-family variance: log2(1 + 2 e^{-alpha} / (1 + e^{-2 alpha})).
[[nodiscard]] inline double gamma_theory(double alpha) {
  return std::log2(1.0 + 2.0 * std::exp(-alpha) / (1.0 + std::exp(-2.0 * alpha)));
}

/// Exponent when sampling at alpha' instead of the optimum alpha.
[[nodiscard]] inline double gamma_prime(double alpha, double alpha_prime) {
  return std::log2(1.0 + (std::exp(-alpha_prime) + std::exp(-(2.0 * alpha - alpha_prime))) /
                             (1.0 + std::exp(-2.0 * alpha)));
}

/// (tau0 + tau) sigma^2: wall-clock weighted cost of reaching a fixed error.
[[nodiscard]] inline double total_cost(double tau0, double tau, double sigma2) {
  if (tau0 < 0.0 || tau < 0.0) {
    throw InvalidArgument("total_cost: times must be nonnegative");
  }
  return (tau0 + tau) * sigma2;
}

}  // namespace qaipf

#endif  // QAIPF_ESTIMATOR_HPP
