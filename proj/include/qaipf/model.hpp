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

#ifndef QAIPF_MODEL_HPP
#define QAIPF_MODEL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "qaipf/bits.hpp"
#include "qaipf/errors.hpp"
#include "qaipf/random.hpp"

/**
 * \file
 * \brief Problem instances (SK spin glass, planted 3-SAT) and their diagonal
 * spectra over the computational basis.
 *
 * Every instance is stored in one Ising form
 *
 *     E(m) = offset - sum_i F_i s_i - sum_{i<j} J_ij s_i s_j - sum_{i<j<k} K_ijk s_i s_j s_k
 *
 * with s_i = +1 when bit i of the basis index m is clear (spin up, Boolean
 * TRUE) and s_i = -1 when it is set (spin down, Boolean FALSE).
 */

namespace qaipf {

enum class ModelKind { kSK, kSat3 };

[[nodiscard]] inline std::string to_string(ModelKind kind) { return kind == ModelKind::kSK ? "sk" : "sat3"; }

[[nodiscard]] inline ModelKind model_kind_from_string(const std::string& s) {
  if (s == "sk") {
    return ModelKind::kSK;
  }
  if (s == "sat3") {
    return ModelKind::kSat3;
  }
  throw InvalidArgument("unknown model kind '" + s + "' (expected sk or sat3)");
}

struct PairCoupling {
  int i = 0;
  int j = 0;
  double value = 0.0;
  bool operator==(const PairCoupling&) const = default;
};

struct TripleCoupling {
  int i = 0;
  int j = 0;
  int k = 0;
  double value = 0.0;
  bool operator==(const TripleCoupling&) const = default;
};

/// Three literals over distinct variables; sign +1 is the literal x_v, -1 its negation.
struct SatClause {
  std::array<int, 3> vars{};
  std::array<int, 3> signs{1, 1, 1};
  bool operator==(const SatClause&) const = default;
};

struct IsingInstance {
  ModelKind kind = ModelKind::kSK;
  int n = 0;
  std::vector<PairCoupling> pairs;
  std::vector<double> fields;
  std::vector<TripleCoupling> triples;
  double offset = 0.0;
  std::uint64_t seed = 0;
  std::vector<SatClause> clauses;
  /// Planted assignment x_i in {0, 1}; SAT3 only.
  std::vector<int> planted;

  bool operator==(const IsingInstance&) const = default;

  [[nodiscard]] std::size_t dimension() const { return static_cast<std::size_t>(qaipf::dimension(n)); }

  void validate() const;
};

/// Spin value of site i in basis state m.
[[nodiscard]] constexpr int spin(BasisIndex m, int i) noexcept { return ((m >> i) & 1U) != 0 ? -1 : 1; }

/// Basis index of a Boolean assignment (x_i = 1 <=> bit i clear).
[[nodiscard]] inline BasisIndex assignment_to_index(std::span<const int> x) {
  BasisIndex m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) {
      m |= BasisIndex{1} << i;
    }
  }
  return m;
}

/// Energy of the free Hamiltonian: the number of down spins.
[[nodiscard]] inline int h0_energy(BasisIndex m, int n) {
  if (n < 0 || n > kMaxSpins || m >= dimension(n)) {
    throw InvalidArgument("h0_energy: basis index out of range");
  }
  return hamming_weight(m);
}

inline void IsingInstance::validate() const {
  if (n < 1 || n > kMaxSpins) {
    throw InvalidArgument("instance: spin count out of range");
  }
  if (fields.size() != static_cast<std::size_t>(n)) {
    throw InvalidArgument("instance: fields must have one entry per spin");
  }
  auto in_range = [this](int v) { return v >= 0 && v < n; };
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& c = pairs[p];
    if (!in_range(c.i) || !in_range(c.j) || c.i >= c.j) {
      throw InvalidArgument("instance: pair indices must satisfy 0 <= i < j < n");
    }
    if (p > 0 && std::tie(pairs[p - 1].i, pairs[p - 1].j) >= std::tie(c.i, c.j)) {
      throw InvalidArgument("instance: pairs must be sorted without duplicates");
    }
  }
  for (std::size_t t = 0; t < triples.size(); ++t) {
    const auto& c = triples[t];
    if (!in_range(c.i) || !in_range(c.k) || c.i >= c.j || c.j >= c.k) {
      throw InvalidArgument("instance: triple indices must satisfy 0 <= i < j < k < n");
    }
    if (t > 0 && std::tie(triples[t - 1].i, triples[t - 1].j, triples[t - 1].k) >= std::tie(c.i, c.j, c.k)) {
      throw InvalidArgument("instance: triples must be sorted without duplicates");
    }
  }
  if (kind == ModelKind::kSK) {
    if (!triples.empty() || offset != 0.0 || !clauses.empty() || !planted.empty()) {
      throw InvalidArgument("instance: SK instances carry no triples, offset, clauses or planted state");
    }
    return;
  }
  if (planted.size() != static_cast<std::size_t>(n)) {
    throw InvalidArgument("instance: planted assignment must have n bits");
  }
  for (const int x : planted) {
    if (x != 0 && x != 1) {
      throw InvalidArgument("instance: planted bits must be 0 or 1");
    }
  }
  for (const auto& clause : clauses) {
    for (int a = 0; a < 3; ++a) {
      if (!in_range(clause.vars[a]) || (clause.signs[a] != 1 && clause.signs[a] != -1)) {
        throw InvalidArgument("instance: malformed clause literal");
      }
    }
    if (clause.vars[0] == clause.vars[1] || clause.vars[0] == clause.vars[2] || clause.vars[1] == clause.vars[2]) {
      throw InvalidArgument("instance: clause variables must be distinct");
    }
  }
}

/// Sherrington-Kirkpatrick instance: one N(0,1) coupling per unordered pair scaled by 1/sqrt(n), one N(0,1) field per spin.
[[nodiscard]] inline IsingInstance sk_instance(int n, std::uint64_t seed) {
  if (n < 1 || n > kMaxSpins) {
    throw InvalidArgument("sk_instance: n must be in [1, 62]");
  }
  auto rng = make_stream(seed, StreamDomain::kInstance, 1);
  IsingInstance inst;
  inst.kind = ModelKind::kSK;
  inst.n = n;
  inst.seed = seed;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  inst.pairs.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      inst.pairs.push_back({i, j, scale * rng.normal()});
    }
  }
  inst.fields.resize(static_cast<std::size_t>(n));
  for (auto& h : inst.fields) {
    h = rng.normal();
  }
  return inst;
}

struct Sat3Parameters {
  double clause_ratio = 4.25;
  double p0 = 1.0 / 7.0;
  double p1 = 1.0 / 14.0;
  double p2 = 3.0 / 14.0;
};

/// Number of false literals of `clause` under assignment x: 0, 1 or 2 for planted clauses.
[[nodiscard]] inline int false_literal_count(const SatClause& clause, std::span<const int> x) {
  int count = 0;
  for (int a = 0; a < 3; ++a) {
    const int value = x[static_cast<std::size_t>(clause.vars[a])];
    const bool literal_true = clause.signs[a] == 1 ? value == 1 : value == 0;
    count += literal_true ? 0 : 1;
  }
  return count;
}

/// Fills F, J, K and the offset of `inst` from its clause list: each clause
/// contributes (1 - c_a s_a)(1 - c_b s_b)(1 - c_c s_c) / 8.
inline void expand_clauses(IsingInstance& inst) {
  std::vector<double> fields(static_cast<std::size_t>(inst.n), 0.0);
  std::map<std::pair<int, int>, double> pairs;
  std::map<std::tuple<int, int, int>, double> triples;
  for (const auto& clause : inst.clauses) {
    std::array<std::pair<int, int>, 3> lits{{{clause.vars[0], clause.signs[0]},
                                             {clause.vars[1], clause.signs[1]},
                                             {clause.vars[2], clause.signs[2]}}};
    std::sort(lits.begin(), lits.end());
    for (const auto& [v, c] : lits) {
      fields[static_cast<std::size_t>(v)] += 0.125 * c;
    }
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        pairs[{lits[a].first, lits[b].first}] -= 0.125 * lits[a].second * lits[b].second;
      }
    }
    triples[{lits[0].first, lits[1].first, lits[2].first}] +=
        0.125 * lits[0].second * lits[1].second * lits[2].second;
  }
  inst.fields = std::move(fields);
  inst.pairs.clear();
  for (const auto& [key, value] : pairs) {
    if (value != 0.0) {
      inst.pairs.push_back({key.first, key.second, value});
    }
  }
  inst.triples.clear();
  for (const auto& [key, value] : triples) {
    if (value != 0.0) {
      inst.triples.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), value});
    }
  }
  inst.offset = 0.125 * static_cast<double>(inst.clauses.size());
}

/**
 * Random 3-SAT instance built around a uniformly random planted assignment.
 * Each clause draws three distinct variables, then a type relative to the
 * planted assignment: type 0 (no false literal) with p0, each of the three
 * type-1 variants (one false literal) with p1, each of the three type-2
 * variants (two false literals) with p2.
 */
[[nodiscard]] inline IsingInstance sat3_instance(int n, const Sat3Parameters& params, std::uint64_t seed) {
  const double total = params.p0 + 3.0 * params.p1 + 3.0 * params.p2;
  if (std::abs(total - 1.0) > 1e-12 || params.p0 < 0 || params.p1 < 0 || params.p2 < 0) {
    throw InvalidArgument("sat3_instance: need p0 + 3 p1 + 3 p2 = 1 with nonnegative entries");
  }
  if (n < 3 || n > kMaxSpins) {
    throw InvalidArgument("sat3_instance: n must be in [3, 62]");
  }
  if (!(params.clause_ratio >= 0) || !std::isfinite(params.clause_ratio)) {
    throw InvalidArgument("sat3_instance: clause ratio must be finite and nonnegative");
  }
  auto rng = make_stream(seed, StreamDomain::kInstance, 2);
  IsingInstance inst;
  inst.kind = ModelKind::kSat3;
  inst.n = n;
  inst.seed = seed;
  inst.planted.resize(static_cast<std::size_t>(n));
  for (auto& x : inst.planted) {
    x = static_cast<int>(rng() >> 63);
  }
  // Default rounding mode is round-half-to-even.
  const auto clause_count = static_cast<std::size_t>(std::nearbyint(params.clause_ratio * n));
  inst.clauses.reserve(clause_count);
  for (std::size_t c = 0; c < clause_count; ++c) {
    SatClause clause;
    for (int a = 0; a < 3; ++a) {
      int v = 0;
      do {
        v = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      } while ((a > 0 && v == clause.vars[0]) || (a > 1 && v == clause.vars[1]));
      clause.vars[a] = v;
    }
    const double u = rng.uniform();
    std::array<bool, 3> literal_false{false, false, false};
    if (u >= params.p0) {
      if (u < params.p0 + 3.0 * params.p1) {
        const int variant = std::min(2, static_cast<int>((u - params.p0) / params.p1));
        literal_false[variant] = true;
      } else {
        const int variant = std::min(2, static_cast<int>((u - params.p0 - 3.0 * params.p1) / params.p2));
        literal_false = {true, true, true};
        literal_false[variant] = false;
      }
    }
    for (int a = 0; a < 3; ++a) {
      const int true_sign = inst.planted[static_cast<std::size_t>(clause.vars[a])] == 1 ? 1 : -1;
      clause.signs[a] = literal_false[a] ? -true_sign : true_sign;
    }
    inst.clauses.push_back(clause);
  }
  expand_clauses(inst);
  return inst;
}

/// Target energies E(m) for every basis index, in index order.
class DiagonalSpectrum {
 public:
  DiagonalSpectrum() = default;
  DiagonalSpectrum(int n, std::vector<double> energies) : n_(n), energies_(std::move(energies)) {
    if (energies_.size() != qaipf::dimension(n)) {
      throw InvalidArgument("spectrum: expected 2^n energies");
    }
  }

  [[nodiscard]] int spins() const noexcept { return n_; }
  [[nodiscard]] std::size_t size() const noexcept { return energies_.size(); }
  [[nodiscard]] double operator[](std::size_t m) const noexcept { return energies_[m]; }
  [[nodiscard]] std::span<const double> energies() const noexcept { return energies_; }
  [[nodiscard]] double min() const { return *std::min_element(energies_.begin(), energies_.end()); }

 private:
  int n_ = 0;
  std::vector<double> energies_;
};

/// Energy of one basis state from the Ising coefficients.
[[nodiscard]] inline double ising_energy(const IsingInstance& inst, BasisIndex m) {
  double e = inst.offset;
  for (int i = 0; i < inst.n; ++i) {
    e -= inst.fields[static_cast<std::size_t>(i)] * spin(m, i);
  }
  for (const auto& c : inst.pairs) {
    e -= c.value * spin(m, c.i) * spin(m, c.j);
  }
  for (const auto& c : inst.triples) {
    e -= c.value * spin(m, c.i) * spin(m, c.j) * spin(m, c.k);
  }
  return e;
}

/// Number of clauses violated by basis state m (SAT3 only).
[[nodiscard]] inline int unsatisfied_clauses(const IsingInstance& inst, BasisIndex m) {
  int count = 0;
  for (const auto& clause : inst.clauses) {
    bool all_false = true;
    for (int a = 0; a < 3 && all_false; ++a) {
      const bool bit_set = ((m >> clause.vars[a]) & 1U) != 0;
      // x = TRUE <=> bit clear; the literal x is false when the bit is set.
      all_false = clause.signs[a] == 1 ? bit_set : !bit_set;
    }
    count += all_false ? 1 : 0;
  }
  return count;
}

[[nodiscard]] inline DiagonalSpectrum target_spectrum(const IsingInstance& inst) {
  inst.validate();
  if (inst.n > 30) {
    throw ResourceLimit("target_spectrum: 2^n table too large");
  }
  std::vector<double> energies(inst.dimension());
  for (std::size_t m = 0; m < energies.size(); ++m) {
    energies[m] = ising_energy(inst, m);
  }
  return {inst.n, std::move(energies)};
}

}  // namespace qaipf

#endif  // QAIPF_MODEL_HPP
