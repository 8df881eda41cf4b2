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

#ifndef QAIPF_BITS_HPP
#define QAIPF_BITS_HPP

#include <bit>
#include <cstdint>
#include <limits>
#include <vector>

#include "qaipf/errors.hpp"

/**
 * \file
 * \brief Basis-index bit helpers: Hamming weights, exact binomials and
 * combination unranking over the n-bit hypercube.
 *
 * Bit i of a basis index set means spin i points down, so the Hamming weight
 * of an index is its energy under the free Hamiltonian.
 */

namespace qaipf {

using BasisIndex = std::uint64_t;

inline constexpr int kMaxSpins = 62;

[[nodiscard]] constexpr int hamming_weight(BasisIndex m) noexcept { return std::popcount(m); }

[[nodiscard]] constexpr BasisIndex dimension(int n) noexcept { return BasisIndex{1} << n; }

[[nodiscard]] constexpr BasisIndex all_ones(int n) noexcept { return dimension(n) - 1; }

/// Exact C(n, k) in 64-bit integer arithmetic; valid for n <= 64 with k anywhere.
[[nodiscard]] constexpr std::uint64_t binomial(int n, int k) noexcept {
  if (k < 0 || k > n) {
    return 0;
  }
  if (k > n - k) {
    k = n - k;
  }
  // Multiplicative form: each partial product is itself a binomial, so the
  // division is exact. 128-bit intermediate avoids overflow for n <= 64.
  unsigned __int128 acc = 1;
  for (int i = 1; i <= k; ++i) {
    acc = acc * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
  }
  return static_cast<std::uint64_t>(acc);
}

[[nodiscard]] inline double binomial_real(int n, int k) noexcept {
  return static_cast<double>(binomial(n, k));
}

/// Maps rank in [0, C(n, k)) to the rank-th n-bit word of weight k in
/// colexicographic order.
[[nodiscard]] inline BasisIndex unrank_combination(int n, int k, std::uint64_t rank) {
  if (k < 0 || k > n || rank >= binomial(n, k)) {
    throw InvalidArgument("unrank_combination: rank or weight out of range");
  }
  BasisIndex word = 0;
  int remaining = k;
  for (int bit = n - 1; bit >= 0 && remaining > 0; --bit) {
    const std::uint64_t below = binomial(bit, remaining);
    if (rank >= below) {
      word |= BasisIndex{1} << bit;
      rank -= below;
      --remaining;
    }
  }
  return word;
}

/// Inverse of unrank_combination.
[[nodiscard]] inline std::uint64_t rank_combination(BasisIndex word) noexcept {
  std::uint64_t rank = 0;
  int seen = 0;
  for (int bit = 0; word >> bit; ++bit) {
    if ((word >> bit) & 1U) {
      ++seen;
      rank += binomial(bit, seen);
    }
  }
  return rank;
}

/// All words of weight k among n bits, ascending.
[[nodiscard]] inline std::vector<BasisIndex> shell_members(int n, int k) {
  std::vector<BasisIndex> out;
  if (k < 0 || k > n) {
    return out;
  }
  out.reserve(binomial(n, k));
  if (k == 0) {
    out.push_back(0);
    return out;
  }
  // Gosper's hack enumerates same-weight words in increasing order.
  BasisIndex word = (BasisIndex{1} << k) - 1;
  const BasisIndex limit = dimension(n);
  while (word < limit) {
    out.push_back(word);
    const BasisIndex c = word & (~word + 1);
    const BasisIndex r = word + c;
    word = (((r ^ word) >> 2) / c) | r;
  }
  return out;
}

/// Neighbours of m one level down the hypercube (one set bit cleared).
[[nodiscard]] inline std::vector<BasisIndex> lower_neighbors(BasisIndex m) {
  std::vector<BasisIndex> out;
  out.reserve(static_cast<std::size_t>(hamming_weight(m)));
  for (BasisIndex rest = m; rest != 0; rest &= rest - 1) {
    out.push_back(m & ~(rest & (~rest + 1)));
  }
  return out;
}

/// Submasks of m having exactly `weight` set bits: the states of that shell
/// at Hamming distance popcount(m) - weight below m.
[[nodiscard]] inline std::vector<BasisIndex> submasks_of_weight(BasisIndex m, int weight) {
  std::vector<BasisIndex> out;
  const int total = hamming_weight(m);
  if (weight < 0 || weight > total) {
    return out;
  }
  std::vector<BasisIndex> bits;
  for (BasisIndex rest = m; rest != 0; rest &= rest - 1) {
    bits.push_back(rest & (~rest + 1));
  }
  for (const BasisIndex pattern : shell_members(total, weight)) {
    BasisIndex sub = 0;
    for (int b = 0; b < total; ++b) {
      if ((pattern >> b) & 1U) {
        sub |= bits[static_cast<std::size_t>(b)];
      }
    }
    out.push_back(sub);
  }
  return out;
}

}  // namespace qaipf

#endif  // QAIPF_BITS_HPP
