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

#ifndef QAIPF_RANDOM_HPP
#define QAIPF_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace qaipf {

/**
 * \brief Counter-based SplitMix64 stream.
 *
 * Output i of a stream is `mix(key + (i + 1) * golden_gamma)`, where the key is
 * derived from a master seed and up to two sub-keys. Streams for distinct
 * (seed, a, b) triples are statistically independent, and each stream is
 * reproducible on every platform regardless of how work is scheduled.
 *
 * Satisfies std::uniform_random_bit_generator.
 */
class RandomStream {
 public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

  explicit RandomStream(std::uint64_t seed, std::uint64_t key_a = 0, std::uint64_t key_b = 0) noexcept
      : key_(derive_key(seed, key_a, key_b)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    ++counter_;
    return mix(key_ + counter_ * kGoldenGamma);
  }

  /// Uniform double on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform double on (0, 1].
  double uniform_open() noexcept { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

  /// Standard normal via the cosine branch of Box-Muller (two uniforms per draw).
  double normal() noexcept {
    const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    return radius * std::cos(angle);
  }

  /// Unbiased integer on [0, bound) by Lemire's multiply-shift rejection.
  std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound <= 1) {
      return 0;
    }
    unsigned __int128 product = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        product = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

  [[nodiscard]] std::uint64_t draws() const noexcept { return counter_; }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t h = mix(seed + kGoldenGamma);
    h = mix(h ^ (a + 0x632be59bd9b4e019ULL));
    h = mix(h ^ (b + 0x85157af5d2d8e1e3ULL));
    return h;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Sub-key tags so that different consumers of one master seed never share a stream.
enum class StreamDomain : std::uint64_t {
  kInstance = 0x1001,
  kPresample = 0x2002,
  kTrajectory = 0x3003,
  kScan = 0x4004,
};

[[nodiscard]] inline RandomStream make_stream(std::uint64_t seed, StreamDomain domain, std::uint64_t a = 0,
                                              std::uint64_t b = 0) noexcept {
  return RandomStream(seed ^ RandomStream::mix(static_cast<std::uint64_t>(domain)), a, b);
}

}  // namespace qaipf

#endif  // QAIPF_RANDOM_HPP
