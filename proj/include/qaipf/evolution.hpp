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

#ifndef QAIPF_EVOLUTION_HPP
#define QAIPF_EVOLUTION_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "qaipf/bits.hpp"
#include "qaipf/errors.hpp"
#include "qaipf/model.hpp"
#include "qaipf/numeric.hpp"
#include "qaipf/parallel.hpp"
#include "qaipf/random.hpp"

/**
 * \file
 * \brief Reverse-annealing propagation
 *
 *     H(t) = s H1 + (1 - s) s Hx + (1 - s)^2 H0,   s = t / tau,
 *     Hx = -gamma sum_i X_i,   H0 = sum_i (1 - Z_i) / 2,
 *
 * with a symmetric three-stage splitting tuned for a dominant, exactly
 * solvable diagonal part (the SABA3 scheme of Laskar and Robutel):
 *
 *     D(c1 h) X(5h/18) D(c2 h) X(4h/9) D(c2 h) X(5h/18) D(c1 h),
 *     c1 = 1/2 - sqrt(15)/10,  c2 = sqrt(15)/10,
 *
 * where D is the diagonal part s E1 + (1 - s)^2 E0 and X the transverse part.
 * Each factor freezes its time-dependent coefficient at the centre of the
 * sub-interval it covers, so the transverse factors sit on the three
 * Gauss-Legendre nodes with their quadrature weights. The scheme is second
 * order in h (the [X, [X, D]] term survives), but its error constant is about
 * half that of the two-stage variant and a fraction of plain Strang splitting.
 * The transverse factor is a product of commuting single-bit rotations
 * cos(theta) I + i sin(theta) X_i, so a step costs O(n 2^n) and is unitary to
 * rounding.
 */

namespace qaipf {

struct Schedule {
  double tau = 100.0;
  double dt = 0.01;
  double gamma = 1.0;

  void validate() const {
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
      throw InvalidArgument("schedule: tau must be finite and nonnegative");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      throw InvalidArgument("schedule: dt must be positive");
    }
    if (tau > 0.0 && dt > tau) {
      throw InvalidArgument("schedule: dt must not exceed tau");
    }
    if (!std::isfinite(gamma)) {
      throw InvalidArgument("schedule: gamma must be finite");
    }
  }

  /// Number of integrator steps; the step width tau / steps() is at most dt.
  [[nodiscard]] std::size_t steps() const {
    if (tau == 0.0) {
      return 0;
    }
    return static_cast<std::size_t>(std::max(1.0, std::ceil(tau / dt - 1e-9)));
  }

  [[nodiscard]] Schedule halved() const { return {tau, dt / 2, gamma}; }

  bool operator==(const Schedule&) const = default;
};

using Amplitude = std::complex<double>;

class StateVector {
 public:
  StateVector() = default;
  StateVector(int n, std::vector<Amplitude> amplitudes) : n_(n), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != qaipf::dimension(n)) {
      throw InvalidArgument("state vector: expected 2^n amplitudes");
    }
  }

  static StateVector basis(int n, BasisIndex m) {
    std::vector<Amplitude> amps(qaipf::dimension(n));
    amps.at(m) = 1.0;
    return {n, std::move(amps)};
  }

  [[nodiscard]] int spins() const noexcept { return n_; }
  [[nodiscard]] std::size_t size() const noexcept { return amplitudes_.size(); }
  [[nodiscard]] std::span<const Amplitude> amplitudes() const noexcept { return amplitudes_; }
  [[nodiscard]] const Amplitude& operator[](std::size_t i) const noexcept { return amplitudes_[i]; }

  [[nodiscard]] double norm_squared() const {
    CompensatedSum acc;
    for (const auto& a : amplitudes_) {
      acc.add(std::norm(a));
    }
    return acc.value();
  }

  [[nodiscard]] std::vector<double> probabilities() const {
    std::vector<double> p(amplitudes_.size());
    std::transform(amplitudes_.begin(), amplitudes_.end(), p.begin(), [](const Amplitude& a) { return std::norm(a); });
    return p;
  }

 private:
  int n_ = 0;
  std::vector<Amplitude> amplitudes_;
};

/// Born probabilities P(n | m) of measuring target basis state n after evolving from m.
struct TransitionRow {
  BasisIndex initial = 0;
  std::vector<double> probs;
};

/// Full P(n | m) table, row m stored contiguously.
struct TransitionMatrix {
  int n = 0;
  std::vector<double> probs;

  [[nodiscard]] std::size_t dimension() const noexcept { return qaipf::dimension(n); }
  [[nodiscard]] std::span<const double> row(BasisIndex m) const {
    return std::span<const double>(probs).subspan(m * dimension(), dimension());
  }
  [[nodiscard]] double operator()(BasisIndex m, BasisIndex target) const { return probs[m * dimension() + target]; }
};

/**
 * Propagator for one (spectrum, schedule) pair. Evolves blocks of initial
 * basis states together: amplitudes are stored planar (real and imaginary
 * arrays), basis-major with the block as the fast axis, so every per-step
 * diagonal phase is computed once and reused across the block.
 */
class Evolver {
 public:
  Evolver(DiagonalSpectrum spectrum, Schedule schedule) : spectrum_(std::move(spectrum)), schedule_(schedule) {
    schedule_.validate();
    n_ = spectrum_.spins();
    if (n_ < 1 || n_ > 26) {
      throw ResourceLimit("evolver: spin count outside [1, 26]");
    }
    free_energy_.resize(spectrum_.size());
    for (std::size_t m = 0; m < free_energy_.size(); ++m) {
      free_energy_[m] = static_cast<double>(hamming_weight(m));
    }
  }

  [[nodiscard]] int spins() const noexcept { return n_; }
  [[nodiscard]] const Schedule& schedule() const noexcept { return schedule_; }
  [[nodiscard]] const DiagonalSpectrum& spectrum() const noexcept { return spectrum_; }

  [[nodiscard]] StateVector evolve(BasisIndex m) const {
    check_index(m);
    const std::size_t dim = spectrum_.size();
    std::vector<double> re(dim, 0.0);
    std::vector<double> im(dim, 0.0);
    re[m] = 1.0;
    propagate(re, im, 1);
    std::vector<Amplitude> amps(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      amps[i] = {re[i], im[i]};
    }
    return {n_, std::move(amps)};
  }

  [[nodiscard]] TransitionRow transition_row(BasisIndex m) const {
    auto rows = transition_rows(std::span<const BasisIndex>(&m, 1));
    return std::move(rows.front());
  }

  /// Transition rows for a batch of initial states, propagated together.
  [[nodiscard]] std::vector<TransitionRow> transition_rows(std::span<const BasisIndex> initial) const {
    const std::size_t dim = spectrum_.size();
    const std::size_t width = initial.size();
    std::vector<double> re(dim * width, 0.0);
    std::vector<double> im(dim * width, 0.0);
    for (std::size_t c = 0; c < width; ++c) {
      check_index(initial[c]);
      re[initial[c] * width + c] = 1.0;
    }
    std::vector<TransitionRow> rows(width);
    if (schedule_.gamma == 0.0) {
      // Diagonal Hamiltonian: populations never move, only phases do.
      for (std::size_t c = 0; c < width; ++c) {
        rows[c].initial = initial[c];
        rows[c].probs.assign(dim, 0.0);
        rows[c].probs[initial[c]] = 1.0;
      }
      return rows;
    }
    propagate(re, im, width);
    for (std::size_t c = 0; c < width; ++c) {
      rows[c].initial = initial[c];
      rows[c].probs.resize(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        const double a = re[i * width + c];
        const double b = im[i * width + c];
        rows[c].probs[i] = a * a + b * b;
      }
    }
    return rows;
  }

  /// All rows, blocks of initial states distributed over workers.
  [[nodiscard]] TransitionMatrix transition_matrix(unsigned workers = 0, std::size_t block = 32) const {
    const std::size_t dim = spectrum_.size();
    block = std::max<std::size_t>(1, std::min(block, dim));
    TransitionMatrix out{n_, std::vector<double>(dim * dim)};
    const std::size_t blocks = (dim + block - 1) / block;
    parallel_for(blocks, workers, [&](std::size_t b) {
      std::vector<BasisIndex> ms;
      for (std::size_t m = b * block; m < std::min(dim, (b + 1) * block); ++m) {
        ms.push_back(m);
      }
      const auto rows = transition_rows(ms);
      for (const auto& row : rows) {
        std::copy(row.probs.begin(), row.probs.end(), out.probs.begin() + static_cast<std::ptrdiff_t>(row.initial * dim));
      }
    });
    return out;
  }

 private:
  void check_index(BasisIndex m) const {
    if (m >= spectrum_.size()) {
      throw InvalidArgument("evolve: basis index out of range");
    }
  }

  // exp(-i (a E1 + b E0)) on every amplitude.
  void apply_diagonal(std::vector<double>& re, std::vector<double>& im, std::size_t width, double a, double b) const {
    const std::size_t dim = spectrum_.size();
    for (std::size_t i = 0; i < dim; ++i) {
      const double phase = a * spectrum_[i] + b * free_energy_[i];
      const double cr = std::cos(phase);
      const double ci = -std::sin(phase);
      double* pr = re.data() + i * width;
      double* pi = im.data() + i * width;
      for (std::size_t c = 0; c < width; ++c) {
        const double x = pr[c];
        const double y = pi[c];
        pr[c] = x * cr - y * ci;
        pi[c] = x * ci + y * cr;
      }
    }
  }

  // prod_i (cos(theta) I + i sin(theta) X_i).
  void apply_transverse(std::vector<double>& re, std::vector<double>& im, std::size_t width, double theta) const {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const std::size_t dim = spectrum_.size();
    for (int bit = 0; bit < n_; ++bit) {
      const std::size_t stride = std::size_t{1} << bit;
      for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t low = base; low < base + stride; ++low) {
          double* ar = re.data() + low * width;
          double* ai = im.data() + low * width;
          double* br = re.data() + (low + stride) * width;
          double* bi = im.data() + (low + stride) * width;
          for (std::size_t col = 0; col < width; ++col) {
            const double xr = ar[col];
            const double xi = ai[col];
            const double yr = br[col];
            const double yi = bi[col];
            ar[col] = c * xr - s * yi;
            ai[col] = c * xi + s * yr;
            br[col] = c * yr - s * xi;
            bi[col] = c * yi + s * xr;
          }
        }
      }
    }
  }

  void propagate(std::vector<double>& re, std::vector<double>& im, std::size_t width) const {
    const std::size_t steps = schedule_.steps();
    if (steps == 0) {
      return;
    }
    const double tau = schedule_.tau;
    if (schedule_.gamma == 0.0) {
      // Exact: integral of s is tau/2, of (1 - s)^2 is tau/3.
      apply_diagonal(re, im, width, 0.5 * tau, tau / 3.0);
      return;
    }
    const double h = tau / static_cast<double>(steps);
    const double c2 = std::sqrt(15.0) / 10.0;
    const double c1 = 0.5 - c2;
    // Diagonal coefficients (a, b) of exp(-i (a E1 + b E0)) over a sub-step
    // of width w*h centred at fraction c of step k.
    auto diag_at = [&](std::size_t k, double c, double w, double& a, double& b) {
      const double s = (static_cast<double>(k) + c) * h / tau;
      a += w * h * s;
      b += w * h * (1 - s) * (1 - s);
    };
    auto transverse_at = [&](std::size_t k, double c, double w) {
      const double s = (static_cast<double>(k) + c) * h / tau;
      return w * h * (1 - s) * s * schedule_.gamma;
    };
    double a = 0.0;
    double b = 0.0;
    diag_at(0, 0.5 * c1, c1, a, b);
    apply_diagonal(re, im, width, a, b);
    for (std::size_t k = 0; k < steps; ++k) {
      apply_transverse(re, im, width, transverse_at(k, c1, 5.0 / 18.0));
      a = b = 0.0;
      diag_at(k, c1 + 0.5 * c2, c2, a, b);
      apply_diagonal(re, im, width, a, b);
      apply_transverse(re, im, width, transverse_at(k, 0.5, 4.0 / 9.0));
      a = b = 0.0;
      diag_at(k, 0.5 + 0.5 * c2, c2, a, b);
      apply_diagonal(re, im, width, a, b);
      apply_transverse(re, im, width, transverse_at(k, 1.0 - c1, 5.0 / 18.0));
      // Closing diagonal of step k fused with the opening one of step k + 1.
      a = b = 0.0;
      diag_at(k, 1.0 - 0.5 * c1, c1, a, b);
      if (k + 1 < steps) {
        diag_at(k + 1, 0.5 * c1, c1, a, b);
      }
      apply_diagonal(re, im, width, a, b);
    }
  }

  DiagonalSpectrum spectrum_;
  Schedule schedule_;
  int n_ = 0;
  std::vector<double> free_energy_;
};

[[nodiscard]] inline StateVector evolve(const IsingInstance& instance, BasisIndex m, const Schedule& schedule) {
  return Evolver(target_spectrum(instance), schedule).evolve(m);
}

[[nodiscard]] inline TransitionRow transition_row(const IsingInstance& instance, BasisIndex m,
                                                  const Schedule& schedule) {
  return Evolver(target_spectrum(instance), schedule).transition_row(m);
}

/// Inverse-CDF draw over a probability table in index order.
[[nodiscard]] inline BasisIndex sample_from_row(std::span<const double> probs, RandomStream& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  BasisIndex last_nonzero = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) {
      last_nonzero = i;
    }
    cumulative += probs[i];
    if (u < cumulative) {
      return i;
    }
  }
  return last_nonzero;
}

/// Projective measurement in the computational (H1 eigen-) basis.
[[nodiscard]] inline BasisIndex sample_measurement(const StateVector& state, RandomStream& rng) {
  if (std::abs(state.norm_squared() - 1.0) > 1e-6) {
    throw InternalError("sample_measurement: state norm deviates from 1 (integrator fault)");
  }
  const auto probs = state.probabilities();
  return sample_from_row(probs, rng);
}

/// L-infinity change of the transition row when dt is halved.
[[nodiscard]] inline double convergence_check(const IsingInstance& instance, BasisIndex m, const Schedule& schedule) {
  const auto spectrum = target_spectrum(instance);
  const auto coarse = Evolver(spectrum, schedule).transition_row(m);
  const auto fine = Evolver(spectrum, schedule.halved()).transition_row(m);
  double worst = 0.0;
  for (std::size_t i = 0; i < coarse.probs.size(); ++i) {
    worst = std::max(worst, std::abs(coarse.probs[i] - fine.probs[i]));
  }
  return worst;
}

// Debug dump: 8-byte magic, n as little-endian uint64, then 2^n (re, im) little-endian doubles.
inline constexpr char kStateDumpMagic[8] = {'Q', 'A', 'I', 'P', 'F', 'S', 'V', '1'};

namespace detail {
template <typename T>
T to_little_endian(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return value;
}
}  // namespace detail

inline void write_state_dump(const std::string& path, const StateVector& state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  out.write(kStateDumpMagic, sizeof kStateDumpMagic);
  const auto n = detail::to_little_endian(static_cast<std::uint64_t>(state.spins()));
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  for (const auto& a : state.amplitudes()) {
    const double parts[2] = {detail::to_little_endian(a.real()), detail::to_little_endian(a.imag())};
    out.write(reinterpret_cast<const char*>(parts), sizeof parts);
  }
  if (!out) {
    throw IoError("write failed for " + path);
  }
}

[[nodiscard]] inline StateVector read_state_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  char magic[8] = {};
  std::uint64_t n = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  n = detail::to_little_endian(n);
  if (!in || std::memcmp(magic, kStateDumpMagic, sizeof magic) != 0 || n < 1 || n > 30) {
    throw IoError(path + ": not a state dump");
  }
  std::vector<Amplitude> amps(dimension(static_cast<int>(n)));
  for (auto& a : amps) {
    double parts[2];
    in.read(reinterpret_cast<char*>(parts), sizeof parts);
    a = {detail::to_little_endian(parts[0]), detail::to_little_endian(parts[1])};
  }
  if (!in) {
    throw IoError(path + ": truncated state dump");
  }
  return {static_cast<int>(n), std::move(amps)};
}

}  // namespace qaipf

#endif  // QAIPF_EVOLUTION_HPP
