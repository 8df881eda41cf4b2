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

#ifndef QAIPF_SAMPLING_HPP
#define QAIPF_SAMPLING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qaipf/bits.hpp"
#include "qaipf/errors.hpp"
#include "qaipf/evolution.hpp"
#include "qaipf/model.hpp"
#include "qaipf/numeric.hpp"
#include "qaipf/parallel.hpp"
#include "qaipf/random.hpp"

/**
 * \file
 * \brief Initial-state distributions P_m for the trajectory estimator and the
 * presampling protocol that builds the practical one.
 *
 * Four families are supported: the Gibbs state of H0 at the target inverse
 * temperature (which turns the estimator into Jarzynski's equality), the
 * Gibbs state at a variational inverse temperature alpha, the
 * variance-optimal P_m proportional to sqrt(mu_m), and the practical
 * approximation built from presampled low-energy states plus shell-averaged
 * extrapolation above the presampling depth n_e.
 */

namespace qaipf {

enum class SamplerMode { kJeGibbs, kVariationalGibbs, kExactOptimal, kPractical };

[[nodiscard]] inline std::string to_string(SamplerMode mode) {
  switch (mode) {
    case SamplerMode::kJeGibbs:
      return "je";
    case SamplerMode::kVariationalGibbs:
      return "gibbs";
    case SamplerMode::kExactOptimal:
      return "optimal";
    case SamplerMode::kPractical:
      return "practical";
  }
  return "unknown";
}

[[nodiscard]] inline SamplerMode sampler_mode_from_string(const std::string& s) {
  if (s == "je") {
    return SamplerMode::kJeGibbs;
  }
  if (s == "gibbs") {
    return SamplerMode::kVariationalGibbs;
  }
  if (s == "optimal") {
    return SamplerMode::kExactOptimal;
  }
  if (s == "practical") {
    return SamplerMode::kPractical;
  }
  throw InvalidArgument("unknown sampler '" + s + "' (expected je, gibbs, optimal or practical)");
}

/// Uniform n-bit word of Hamming weight E, by unranking a uniform rank.
[[nodiscard]] inline BasisIndex uniform_in_shell(int shell, int n, RandomStream& rng) {
  if (n < 0 || n > kMaxSpins || shell < 0 || shell > n) {
    throw InvalidArgument("uniform_in_shell: shell energy out of range");
  }
  return unrank_combination(n, shell, rng.below(binomial(n, shell)));
}

namespace detail {

// Cumulative table over unnormalised weights for inverse-CDF draws.
class CumulativeTable {
 public:
  CumulativeTable() = default;
  explicit CumulativeTable(std::span<const double> weights) : cumulative_(weights.size()) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc.add(weights[i]);
      cumulative_[i] = acc.value();
    }
    total_ = acc.value();
  }

  [[nodiscard]] double total() const noexcept { return total_; }

  [[nodiscard]] std::size_t draw(RandomStream& rng) const {
    const double u = rng.uniform() * total_;
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

}  // namespace detail

/**
 * Immutable distribution over the 2^n initial basis states. prob() is exact
 * (closed form for the Gibbs families, table or shell lookup otherwise) and
 * sample() consumes only the caller's stream, so one object can be shared by
 * many threads.
 */
class SamplingDistribution {
 public:
  /// Gibbs state of H0 at inverse temperature `alpha`; each spin is down independently.
  static SamplingDistribution gibbs(SamplerMode mode, double alpha, int n) {
    if (n < 1 || n > kMaxSpins) {
      throw InvalidArgument("gibbs distribution: n out of range");
    }
    SamplingDistribution d;
    d.mode_ = mode;
    d.n_ = n;
    d.parameter_ = alpha;
    // log p_down = -softplus(alpha), log p_up = -softplus(-alpha).
    d.log_down_ = -softplus(alpha);
    d.log_up_ = -softplus(-alpha);
    d.p_down_ = logistic(-alpha);
    return d;
  }

  /// Explicit table of unnormalised positive weights, one per basis index.
  static SamplingDistribution table(SamplerMode mode, std::vector<double> weights, int n) {
    if (weights.size() != dimension(n)) {
      throw InvalidArgument("distribution table: expected 2^n weights");
    }
    SamplingDistribution d;
    d.mode_ = mode;
    d.n_ = n;
    d.cumulative_ = detail::CumulativeTable(weights);
    d.normalizer_ = d.cumulative_.total();
    d.weights_ = std::move(weights);
    return d;
  }

  /**
   * Practical family: explicit weights for the listed low-energy states
   * (ascending, all of weight <= n_e), and one shared per-state weight for
   * every state of each shell E > n_e.
   */
  static SamplingDistribution low_plus_shells(double alpha, int n, int n_e, std::vector<BasisIndex> low_states,
                                              std::vector<double> low_weights, std::vector<double> shell_state_weight) {
    if (low_states.size() != low_weights.size() || shell_state_weight.size() != static_cast<std::size_t>(n + 1)) {
      throw InvalidArgument("practical distribution: inconsistent table sizes");
    }
    SamplingDistribution d;
    d.mode_ = SamplerMode::kPractical;
    d.n_ = n;
    d.n_e_ = n_e;
    d.parameter_ = alpha;
    std::vector<double> slots = low_weights;
    for (int e = n_e + 1; e <= n; ++e) {
      slots.push_back(binomial_real(n, e) * shell_state_weight[static_cast<std::size_t>(e)]);
    }
    d.cumulative_ = detail::CumulativeTable(slots);
    d.normalizer_ = d.cumulative_.total();
    d.low_states_ = std::move(low_states);
    d.weights_ = std::move(low_weights);
    d.shell_weight_ = std::move(shell_state_weight);
    return d;
  }

  [[nodiscard]] SamplerMode mode() const noexcept { return mode_; }
  [[nodiscard]] int spins() const noexcept { return n_; }
  /// beta for JE, alpha for the variational and practical families, NaN otherwise.
  [[nodiscard]] double parameter() const noexcept { return parameter_; }
  [[nodiscard]] int presample_depth() const noexcept { return n_e_; }
  [[nodiscard]] double normalizer() const noexcept { return normalizer_; }

  [[nodiscard]] double prob(BasisIndex m) const {
    if (m >= dimension(n_)) {
      throw InvalidArgument("prob: basis index out of range");
    }
    switch (mode_) {
      case SamplerMode::kJeGibbs:
      case SamplerMode::kVariationalGibbs: {
        const int e = hamming_weight(m);
        return std::exp(e * log_down_ + (n_ - e) * log_up_);
      }
      case SamplerMode::kExactOptimal:
        return weights_[m] / normalizer_;
      case SamplerMode::kPractical: {
        const int e = hamming_weight(m);
        if (e > n_e_) {
          return shell_weight_[static_cast<std::size_t>(e)] / normalizer_;
        }
        const auto it = std::lower_bound(low_states_.begin(), low_states_.end(), m);
        if (it == low_states_.end() || *it != m) {
          return 0.0;  // only for the shells-only restriction used by the reuse estimator
        }
        return weights_[static_cast<std::size_t>(it - low_states_.begin())] / normalizer_;
      }
    }
    return 0.0;
  }

  [[nodiscard]] BasisIndex sample(RandomStream& rng) const {
    switch (mode_) {
      case SamplerMode::kJeGibbs:
      case SamplerMode::kVariationalGibbs: {
        BasisIndex m = 0;
        for (int i = 0; i < n_; ++i) {
          if (rng.uniform() < p_down_) {
            m |= BasisIndex{1} << i;
          }
        }
        return m;
      }
      case SamplerMode::kExactOptimal:
        return cumulative_.draw(rng);
      case SamplerMode::kPractical: {
        const std::size_t slot = cumulative_.draw(rng);
        if (slot < low_states_.size()) {
          return low_states_[slot];
        }
        const int shell = n_e_ + 1 + static_cast<int>(slot - low_states_.size());
        return uniform_in_shell(shell, n_, rng);
      }
    }
    return 0;
  }

  /// Total probability of each shell E = 0..n, from closed forms (no 2^n sweep for Gibbs or practical).
  [[nodiscard]] std::vector<double> shell_masses() const {
    std::vector<double> mass(static_cast<std::size_t>(n_ + 1), 0.0);
    switch (mode_) {
      case SamplerMode::kJeGibbs:
      case SamplerMode::kVariationalGibbs:
        for (int e = 0; e <= n_; ++e) {
          mass[static_cast<std::size_t>(e)] = binomial_real(n_, e) * std::exp(e * log_down_ + (n_ - e) * log_up_);
        }
        break;
      case SamplerMode::kExactOptimal:
        for (std::size_t m = 0; m < weights_.size(); ++m) {
          mass[static_cast<std::size_t>(hamming_weight(m))] += weights_[m] / normalizer_;
        }
        break;
      case SamplerMode::kPractical:
        for (std::size_t k = 0; k < low_states_.size(); ++k) {
          mass[static_cast<std::size_t>(hamming_weight(low_states_[k]))] += weights_[k] / normalizer_;
        }
        for (int e = n_e_ + 1; e <= n_; ++e) {
          mass[static_cast<std::size_t>(e)] = binomial_real(n_, e) * shell_weight_[static_cast<std::size_t>(e)] / normalizer_;
        }
        break;
    }
    return mass;
  }

  [[nodiscard]] double total_probability() const { return compensated_sum(shell_masses()); }

  [[nodiscard]] std::string describe() const {
    std::string s = to_string(mode_);
    if (mode_ != SamplerMode::kExactOptimal) {
      s += "(" + std::to_string(parameter_) + ")";
    }
    if (mode_ == SamplerMode::kPractical) {
      s += "[n_e=" + std::to_string(n_e_) + "]";
    }
    return s;
  }

 private:
  SamplingDistribution() = default;

  SamplerMode mode_ = SamplerMode::kJeGibbs;
  int n_ = 0;
  int n_e_ = 0;
  double parameter_ = std::numeric_limits<double>::quiet_NaN();
  double log_down_ = 0.0;
  double log_up_ = 0.0;
  double p_down_ = 0.5;
  double normalizer_ = 1.0;
  std::vector<double> weights_;
  std::vector<BasisIndex> low_states_;
  std::vector<double> shell_weight_;
  detail::CumulativeTable cumulative_;
};

[[nodiscard]] inline SamplingDistribution je_gibbs(double beta, int n) {
  if (!(beta >= 0.0)) {
    throw InvalidArgument("je_gibbs: beta must be nonnegative");
  }
  return SamplingDistribution::gibbs(SamplerMode::kJeGibbs, beta, n);
}

[[nodiscard]] inline SamplingDistribution variational_gibbs(double alpha, int n) {
  if (!std::isfinite(alpha)) {
    throw InvalidArgument("variational_gibbs: alpha must be finite");
  }
  return SamplingDistribution::gibbs(SamplerMode::kVariationalGibbs, alpha, n);
}

namespace detail {
inline int spins_for_length(std::size_t length) {
  if (length == 0 || !std::has_single_bit(length)) {
    throw InvalidArgument("expected a table of length 2^n");
  }
  return std::countr_zero(length);
}
}  // namespace detail

/// P_m = sqrt(mu_m) / sum_m' sqrt(mu_m').
[[nodiscard]] inline SamplingDistribution exact_optimal(std::span<const double> mu) {
  const int n = detail::spins_for_length(mu.size());
  std::vector<double> weights(mu.size());
  for (std::size_t m = 0; m < mu.size(); ++m) {
    if (!(mu[m] > 0.0) || !std::isfinite(mu[m])) {
      throw InvalidArgument("exact_optimal: every mu_m must be positive and finite");
    }
    weights[m] = std::sqrt(mu[m]);
  }
  return SamplingDistribution::table(SamplerMode::kExactOptimal, std::move(weights), n);
}

/// Result of a self-consistent alpha solve.
struct AlphaSolution {
  double alpha = 0.0;
  double residual = 0.0;
  /// Left grid nodes of every sign change found by the pre-scan (practical solver only).
  std::vector<double> sign_changes;

  [[nodiscard]] bool ambiguous() const noexcept { return sign_changes.size() > 1; }
};

inline constexpr Bracket kAlphaBracket{-10.0, 40.0};
inline constexpr double kAlphaTolerance = 1e-10;
inline constexpr double kAlphaScanStep = 0.05;

/// n / (1 + e^alpha) - sum_E E Q_E with log Q_E = log_shell_weight[E] + alpha E (normalised).
[[nodiscard]] inline double alpha_residual(double alpha, std::span<const double> log_shell_weight) {
  const int n = static_cast<int>(log_shell_weight.size()) - 1;
  std::vector<double> logs(log_shell_weight.size());
  for (int e = 0; e <= n; ++e) {
    logs[static_cast<std::size_t>(e)] = log_shell_weight[static_cast<std::size_t>(e)] + alpha * e;
  }
  const double log_norm = log_sum_exp(logs);
  CompensatedSum mean;
  for (int e = 1; e <= n; ++e) {
    mean.add(e * std::exp(logs[static_cast<std::size_t>(e)] - log_norm));
  }
  return n * logistic(-alpha) - mean.value();
}

/// Per-shell sums sum_{m in I_E} mu_m, E = 0..n, compensated.
[[nodiscard]] inline std::vector<double> shell_sums(std::span<const double> mu) {
  const int n = detail::spins_for_length(mu.size());
  std::vector<CompensatedSum> acc(static_cast<std::size_t>(n + 1));
  for (std::size_t m = 0; m < mu.size(); ++m) {
    acc[static_cast<std::size_t>(hamming_weight(m))].add(mu[m]);
  }
  std::vector<double> out(acc.size());
  std::transform(acc.begin(), acc.end(), out.begin(), [](const CompensatedSum& s) { return s.value(); });
  return out;
}

/**
 * Variance-optimal inverse temperature of the Gibbs family: the root of
 * n / (1 + e^alpha) = sum_E E Q_E(alpha), Q_E proportional to
 * e^{alpha E} sum_{m in I_E} mu_m. The residual is strictly decreasing, so
 * the root is unique whenever the bracket holds a sign change.
 */
[[nodiscard]] inline AlphaSolution solve_alpha_exact(std::span<const double> mu, int n) {
  if (mu.size() != dimension(n)) {
    throw InvalidArgument("solve_alpha_exact: mu must have 2^n entries");
  }
  for (const double v : mu) {
    if (!(v > 0.0)) {
      throw InvalidArgument("solve_alpha_exact: mu entries must be positive");
    }
  }
  const auto sums = shell_sums(mu);
  std::vector<double> log_weight(sums.size());
  std::transform(sums.begin(), sums.end(), log_weight.begin(), [](double s) { return std::log(s); });
  auto f = [&](double a) { return alpha_residual(a, log_weight); };
  const auto root = bisect(f, kAlphaBracket.lo, kAlphaBracket.hi, kAlphaTolerance, "solve_alpha_exact");
  return {root.root, root.residual, {}};
}

// ---------------------------------------------------------------------------
// Presampling
// ---------------------------------------------------------------------------

struct PresampleRecord {
  BasisIndex m = 0;
  /// Target energies E1 of the measured outcomes, one per trajectory.
  std::vector<double> energies;
  bool operator==(const PresampleRecord&) const = default;
};

/// Raw presampling output: every state of H0 energy <= n_e, m_ps measured outcomes each.
struct PresampleData {
  int n = 0;
  int n_e = 0;
  std::size_t m_ps = 0;
  Schedule schedule;
  std::uint64_t seed = 0;
  /// Ascending basis index.
  std::vector<PresampleRecord> records;

  bool operator==(const PresampleData&) const = default;
};

/// Number of states presampled at depth n_e: sum_{E <= n_e} C(n, E).
[[nodiscard]] inline std::size_t presample_state_count(int n, int n_e) {
  std::size_t count = 0;
  for (int e = 0; e <= std::min(n, n_e); ++e) {
    count += binomial(n, e);
  }
  return count;
}

/// Basis states of H0 energy <= n_e in ascending order.
[[nodiscard]] inline std::vector<BasisIndex> low_energy_states(int n, int n_e) {
  std::vector<BasisIndex> states;
  for (int e = 0; e <= std::min(n, n_e); ++e) {
    const auto shell = shell_members(n, e);
    states.insert(states.end(), shell.begin(), shell.end());
  }
  std::sort(states.begin(), states.end());
  return states;
}

/**
 * Runs m_ps evolve-and-measure trajectories from every state of H0 energy
 * <= n_e. Trajectory i of state m measures with its own stream keyed by
 * (seed, m, i); the evolution itself is deterministic, so each state is
 * propagated once and measured m_ps times.
 */
[[nodiscard]] inline PresampleData presample(const Evolver& evolver, int n_e, std::size_t m_ps, std::uint64_t seed,
                                             unsigned workers = 0) {
  const int n = evolver.spins();
  if (n_e < 1 || n_e > n) {
    throw InvalidArgument("presample: need 1 <= n_e <= n");
  }
  if (m_ps < 1) {
    throw InvalidArgument("presample: need m_ps >= 1");
  }
  PresampleData data;
  data.n = n;
  data.n_e = n_e;
  data.m_ps = m_ps;
  data.schedule = evolver.schedule();
  data.seed = seed;
  const auto states = low_energy_states(n, n_e);
  data.records.resize(states.size());
  constexpr std::size_t kBlock = 16;
  const std::size_t blocks = (states.size() + kBlock - 1) / kBlock;
  parallel_for(blocks, workers, [&](std::size_t b) {
    const std::size_t first = b * kBlock;
    const std::size_t last = std::min(states.size(), first + kBlock);
    const auto rows = evolver.transition_rows(std::span<const BasisIndex>(states).subspan(first, last - first));
    for (std::size_t k = first; k < last; ++k) {
      auto& rec = data.records[k];
      rec.m = states[k];
      rec.energies.resize(m_ps);
      for (std::size_t i = 0; i < m_ps; ++i) {
        auto rng = make_stream(seed, StreamDomain::kPresample, rec.m, i);
        rec.energies[i] = evolver.spectrum()[sample_from_row(rows[k - first].probs, rng)];
      }
    }
  });
  return data;
}

[[nodiscard]] inline PresampleData presample(const IsingInstance& instance, const Schedule& schedule, int n_e,
                                             std::size_t m_ps, std::uint64_t seed, unsigned workers = 0) {
  return presample(Evolver(target_spectrum(instance), schedule), n_e, m_ps, seed, workers);
}

/**
 * Per-beta moments of the presampled layer: mu_hat_m, nu_hat_m = sqrt(mu_hat_m)
 * for every state with H0 energy <= n_e, and shell averages of both for
 * E = 0..n_e.
 */
struct PresampleMoments {
  int n = 0;
  int n_e = 0;
  double beta = 0.0;
  std::vector<BasisIndex> states;
  std::vector<double> mu_hat;
  std::vector<double> nu_hat;
  std::vector<double> shell_mu_bar;
  std::vector<double> shell_nu_bar;

  [[nodiscard]] double base_mu_bar() const { return shell_mu_bar.at(static_cast<std::size_t>(n_e)); }
  [[nodiscard]] double base_nu_bar() const { return shell_nu_bar.at(static_cast<std::size_t>(n_e)); }

  [[nodiscard]] double nu_of(BasisIndex m) const {
    const auto it = std::lower_bound(states.begin(), states.end(), m);
    if (it == states.end() || *it != m) {
      throw InvalidArgument("presample moments: state was not presampled");
    }
    return nu_hat[static_cast<std::size_t>(it - states.begin())];
  }
};

namespace detail {
inline void fill_shell_averages(PresampleMoments& mom) {
  std::vector<CompensatedSum> mu_acc(static_cast<std::size_t>(mom.n_e + 1));
  std::vector<CompensatedSum> nu_acc(static_cast<std::size_t>(mom.n_e + 1));
  for (std::size_t k = 0; k < mom.states.size(); ++k) {
    const auto e = static_cast<std::size_t>(hamming_weight(mom.states[k]));
    mu_acc[e].add(mom.mu_hat[k]);
    nu_acc[e].add(mom.nu_hat[k]);
  }
  mom.shell_mu_bar.resize(mu_acc.size());
  mom.shell_nu_bar.resize(nu_acc.size());
  for (int e = 0; e <= mom.n_e; ++e) {
    const double size = binomial_real(mom.n, e);
    mom.shell_mu_bar[static_cast<std::size_t>(e)] = mu_acc[static_cast<std::size_t>(e)].value() / size;
    mom.shell_nu_bar[static_cast<std::size_t>(e)] = nu_acc[static_cast<std::size_t>(e)].value() / size;
  }
}
}  // namespace detail

/// mu_hat_m(beta) = mean_i exp(-2 beta E1_i) from the stored records.
[[nodiscard]] inline PresampleMoments presample_moments(const PresampleData& data, double beta) {
  if (data.records.size() != presample_state_count(data.n, data.n_e)) {
    throw InvalidArgument("presample moments: record count does not match n_e");
  }
  PresampleMoments mom;
  mom.n = data.n;
  mom.n_e = data.n_e;
  mom.beta = beta;
  for (const auto& rec : data.records) {
    if (rec.energies.empty()) {
      throw InvalidArgument("presample moments: state without trajectories");
    }
    CompensatedSum acc;
    for (const double e : rec.energies) {
      acc.add(std::exp(-2.0 * beta * e));
    }
    const double mu = acc.value() / static_cast<double>(rec.energies.size());
    mom.states.push_back(rec.m);
    mom.mu_hat.push_back(mu);
    mom.nu_hat.push_back(std::sqrt(mu));
  }
  if (!std::is_sorted(mom.states.begin(), mom.states.end())) {
    throw InvalidArgument("presample moments: records must be in ascending basis order");
  }
  detail::fill_shell_averages(mom);
  return mom;
}

/// Moments built from exact mu_m (full 2^n table) instead of Monte Carlo estimates.
[[nodiscard]] inline PresampleMoments moments_from_mu(std::span<const double> mu, int n_e, double beta) {
  const int n = detail::spins_for_length(mu.size());
  if (n_e < 1 || n_e > n) {
    throw InvalidArgument("moments_from_mu: need 1 <= n_e <= n");
  }
  PresampleMoments mom;
  mom.n = n;
  mom.n_e = n_e;
  mom.beta = beta;
  mom.states = low_energy_states(n, n_e);
  for (const BasisIndex m : mom.states) {
    mom.mu_hat.push_back(mu[m]);
    mom.nu_hat.push_back(std::sqrt(mu[m]));
  }
  detail::fill_shell_averages(mom);
  return mom;
}

/// Shell averages nu_bar_E and mu_bar_E for E = 0..n; entries E <= n_e are the presampled ones.
struct ShellExtrapolation {
  int n_e = 0;
  std::vector<double> nu_bar;
  std::vector<double> mu_bar;
};

namespace detail {
// log of mu_bar_E for E > n_e, including the e^{-2 alpha (E - n_e)} factor.
inline double log_extrapolated_mu(const PresampleMoments& mom, double alpha, int e) {
  const std::uint64_t c_n = binomial(mom.n, mom.n_e);
  const std::uint64_t c_e = binomial(e, mom.n_e);
  const double denominator = static_cast<double>(c_e) * static_cast<double>(c_n - 1);
  const double mu_part = mom.base_mu_bar() * (static_cast<double>(c_n - c_e) / denominator);
  const double nu_part =
      mom.base_nu_bar() * mom.base_nu_bar() * (static_cast<double>(c_n) * static_cast<double>(c_e - 1) / denominator);
  return -2.0 * alpha * (e - mom.n_e) + std::log(mu_part + nu_part);
}

inline void check_extrapolable(const PresampleMoments& mom) {
  if (mom.n_e < 1 || binomial(mom.n, mom.n_e) <= 1) {
    throw InvalidArgument("extrapolate_shells: need n_e >= 1 and C(n, n_e) > 1");
  }
}
}  // namespace detail

/**
 * Extrapolates shell averages above the presampling depth:
 * nu_bar_E = e^{-alpha (E - n_e)} nu_bar_{n_e}, and mu_bar_E from the
 * finite-population second-moment relation
 *
 *   mu_bar_E = e^{-2 alpha (E - n_e)} [ mu_bar_b (C_N - C_E) + nu_bar_b^2 C_N (C_E - 1) ] / (C_E (C_N - 1)),
 *
 * with C_N = C(n, n_e) and C_E = C(E, n_e) taken in exact integer arithmetic.
 */
[[nodiscard]] inline ShellExtrapolation extrapolate_shells(const PresampleMoments& mom, double alpha) {
  detail::check_extrapolable(mom);
  ShellExtrapolation out;
  out.n_e = mom.n_e;
  out.nu_bar = mom.shell_nu_bar;
  out.mu_bar = mom.shell_mu_bar;
  for (int e = mom.n_e + 1; e <= mom.n; ++e) {
    out.nu_bar.push_back(std::exp(-alpha * (e - mom.n_e)) * mom.base_nu_bar());
    out.mu_bar.push_back(std::exp(detail::log_extrapolated_mu(mom, alpha, e)));
  }
  return out;
}

/// Residual of the practical self-consistency condition at alpha.
[[nodiscard]] inline double practical_residual(const PresampleMoments& mom, double alpha) {
  std::vector<double> log_weight(static_cast<std::size_t>(mom.n + 1));
  for (int e = 0; e <= mom.n; ++e) {
    const double log_mu = e <= mom.n_e ? std::log(mom.shell_mu_bar[static_cast<std::size_t>(e)])
                                       : detail::log_extrapolated_mu(mom, alpha, e);
    log_weight[static_cast<std::size_t>(e)] = std::log(binomial_real(mom.n, e)) + log_mu;
  }
  return alpha_residual(alpha, log_weight);
}

/**
 * Self-consistent alpha of the practical distribution. The composite
 * residual depends on alpha through the extrapolated shells as well, so the
 * bracket is pre-scanned for sign changes; with several, the smallest root
 * >= 0 is returned (the largest negative one if none is >= 0) and every
 * crossing is reported in the solution.
 */
[[nodiscard]] inline AlphaSolution solve_alpha_practical(const PresampleMoments& mom) {
  if (mom.n_e < mom.n) {
    detail::check_extrapolable(mom);
  }
  auto f = [&](double a) { return practical_residual(mom, a); };
  const auto crossings = scan_sign_changes(f, kAlphaBracket.lo, kAlphaBracket.hi, kAlphaScanStep);
  if (crossings.empty()) {
    throw NoRoot("solve_alpha_practical: no sign change in [-10, 40]", f(kAlphaBracket.lo), f(kAlphaBracket.hi));
  }
  double cell = crossings.back();
  for (const double x : crossings) {
    if (x + kAlphaScanStep >= 0.0) {
      cell = x;
      break;
    }
  }
  const double hi = std::min(kAlphaBracket.hi, cell + kAlphaScanStep);
  const auto root = bisect(f, cell, hi, kAlphaTolerance, "solve_alpha_practical");
  return {root.root, root.residual, crossings};
}

[[nodiscard]] inline AlphaSolution solve_alpha_practical(const PresampleData& data, double beta) {
  return solve_alpha_practical(presample_moments(data, beta));
}

/**
 * Practical distribution: P_m = nu_hat_m / N for presampled states and
 * P_m = nu_bar_E / N for every state of a shell E > n_e (shells are drawn as
 * a whole, then a member uniformly), with
 * N = sum of presampled nu_hat + sum_{E > n_e} C(n, E) nu_bar_E.
 */
[[nodiscard]] inline SamplingDistribution practical_distribution(const PresampleMoments& mom, double alpha) {
  for (const double v : mom.nu_hat) {
    if (!(v > 0.0)) {
      throw InternalError("practical_distribution: nonpositive nu_hat");
    }
  }
  std::vector<double> shell_weight(static_cast<std::size_t>(mom.n + 1), 0.0);
  if (mom.n_e < mom.n) {
    const auto ext = extrapolate_shells(mom, alpha);
    for (int e = mom.n_e + 1; e <= mom.n; ++e) {
      shell_weight[static_cast<std::size_t>(e)] = ext.nu_bar[static_cast<std::size_t>(e)];
    }
  }
  return SamplingDistribution::low_plus_shells(alpha, mom.n, mom.n_e, mom.states, mom.nu_hat, std::move(shell_weight));
}

[[nodiscard]] inline SamplingDistribution practical_distribution(const PresampleData& data, double alpha,
                                                                 double beta) {
  return practical_distribution(presample_moments(data, beta), alpha);
}

/**
 * Per-state extrapolation nu_m = e^{-alpha} / E * sum over the E lower
 * neighbours of m, recursed down to the presampled layer n_e. Exponential in
 * the distance to n_e; meant for diagnostics on single states.
 */
[[nodiscard]] inline double recursive_nu(const PresampleMoments& mom, double alpha, BasisIndex m) {
  if (m >= dimension(mom.n)) {
    throw InvalidArgument("recursive_nu: basis index out of range");
  }
  if (hamming_weight(m) <= mom.n_e) {
    throw InvalidArgument("recursive_nu: state lies inside the presampled layer");
  }
  std::map<BasisIndex, double> memo;
  std::function<double(BasisIndex)> nu = [&](BasisIndex state) -> double {
    const int e = hamming_weight(state);
    if (e == mom.n_e) {
      return mom.nu_of(state);
    }
    if (const auto it = memo.find(state); it != memo.end()) {
      return it->second;
    }
    CompensatedSum acc;
    for (const BasisIndex lower : lower_neighbors(state)) {
      acc.add(nu(lower));
    }
    const double value = std::exp(-alpha) / e * acc.value();
    memo.emplace(state, value);
    return value;
  };
  return nu(m);
}

}  // namespace qaipf

#endif  // QAIPF_SAMPLING_HPP
