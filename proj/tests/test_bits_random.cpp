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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "qaipf/bits.hpp"
#include "qaipf/numeric.hpp"
#include "qaipf/random.hpp"

namespace {

using namespace qaipf;

TEST(Binomial, MatchesPascalTriangle) {
  std::vector<std::vector<std::uint64_t>> pascal(65);
  for (int n = 0; n <= 64; ++n) {
    pascal[n].assign(static_cast<std::size_t>(n + 1), 1);
    for (int k = 1; k < n; ++k) {
      pascal[n][k] = pascal[n - 1][k - 1] + pascal[n - 1][k];
    }
  }
  for (int n = 0; n <= 64; ++n) {
    for (int k = 0; k <= n; ++k) {
      ASSERT_EQ(binomial(n, k), pascal[n][k]) << n << " choose " << k;
    }
    EXPECT_EQ(binomial(n, -1), 0U);
    EXPECT_EQ(binomial(n, n + 1), 0U);
  }
}

TEST(Combinations, RankUnrankRoundTripAndOrder) {
  for (int n = 1; n <= 10; ++n) {
    for (int k = 0; k <= n; ++k) {
      const auto members = shell_members(n, k);
      ASSERT_EQ(members.size(), binomial(n, k));
      ASSERT_TRUE(std::is_sorted(members.begin(), members.end()));
      std::set<BasisIndex> seen;
      for (std::uint64_t r = 0; r < binomial(n, k); ++r) {
        const BasisIndex w = unrank_combination(n, k, r);
        ASSERT_EQ(hamming_weight(w), k);
        ASSERT_LT(w, dimension(n));
        ASSERT_EQ(rank_combination(w), r);
        seen.insert(w);
      }
      EXPECT_EQ(seen, std::set<BasisIndex>(members.begin(), members.end()));
    }
  }
  EXPECT_THROW((void)unrank_combination(5, 2, 10), InvalidArgument);
}

TEST(Neighbours, LowerNeighboursAndSubmasks) {
  for (BasisIndex m = 0; m < 256; ++m) {
    const auto lower = lower_neighbors(m);
    ASSERT_EQ(lower.size(), static_cast<std::size_t>(hamming_weight(m)));
    for (const auto l : lower) {
      EXPECT_EQ(hamming_weight(l), hamming_weight(m) - 1);
      EXPECT_EQ(l & ~m, 0U);
    }
    for (int w = 0; w <= hamming_weight(m); ++w) {
      const auto subs = submasks_of_weight(m, w);
      EXPECT_EQ(subs.size(), binomial(hamming_weight(m), w));
    }
  }
}

TEST(RandomStream, DeterministicAndKeyed) {
  RandomStream a(42, 1, 2);
  RandomStream b(42, 1, 2);
  RandomStream c(42, 1, 3);
  RandomStream d(43, 1, 2);
  int same_c = 0;
  int same_d = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    ASSERT_EQ(x, b());
    same_c += x == c() ? 1 : 0;
    same_d += x == d() ? 1 : 0;
  }
  EXPECT_EQ(same_c, 0);
  EXPECT_EQ(same_d, 0);
  EXPECT_NE(make_stream(7, StreamDomain::kInstance)(), make_stream(7, StreamDomain::kPresample)());
}

TEST(RandomStream, UniformAndNormalMoments) {
  RandomStream rng(2024);
  constexpr int kDraws = 400000;
  CompensatedSum u1;
  CompensatedSum z1;
  CompensatedSum z2;
  CompensatedSum z4;
  for (int i = 0; i < kDraws; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    u1.add(u);
    const double z = rng.normal();
    z1.add(z);
    z2.add(z * z);
    z4.add(z * z * z * z);
  }
  // 5-sigma bounds.
  EXPECT_NEAR(u1.value() / kDraws, 0.5, 5 * std::sqrt(1.0 / 12 / kDraws));
  EXPECT_NEAR(z1.value() / kDraws, 0.0, 5 * std::sqrt(1.0 / kDraws));
  EXPECT_NEAR(z2.value() / kDraws, 1.0, 5 * std::sqrt(2.0 / kDraws));
  EXPECT_NEAR(z4.value() / kDraws, 3.0, 5 * std::sqrt(96.0 / kDraws));
}

TEST(RandomStream, BelowIsUniform) {
  RandomStream rng(5);
  constexpr int kBins = 7;
  constexpr int kDraws = 700000;
  std::vector<int> counts(kBins, 0);
  for (int i = 0; i < kDraws; ++i) {
    const auto v = rng.below(kBins);
    ASSERT_LT(v, static_cast<std::uint64_t>(kBins));
    ++counts[v];
  }
  const double p = 1.0 / kBins;
  for (const int c : counts) {
    EXPECT_NEAR(c / static_cast<double>(kDraws), p, 4 * std::sqrt(p * (1 - p) / kDraws));
  }
  EXPECT_EQ(rng.below(1), 0U);
}

TEST(Numeric, CompensatedSumBeatsNaive) {
  std::vector<double> v{1e16, 1.0, -1e16};
  for (int i = 0; i < 1000; ++i) {
    v.push_back(0.1);
  }
  EXPECT_NEAR(compensated_sum(v), 101.0, 1e-9);
}

TEST(Numeric, LogSumExpAndLogistic) {
  const std::vector<double> logs{1000.0, 1000.0};
  EXPECT_NEAR(log_sum_exp(logs), 1000.0 + std::log(2.0), 1e-12);
  EXPECT_NEAR(logistic(0.0), 0.5, 1e-15);
  EXPECT_NEAR(softplus(0.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(softplus(800.0), 800.0, 1e-12);
  EXPECT_GT(logistic(-800.0), -1e-300);
}

TEST(Numeric, BisectionAndScan) {
  const auto r = bisect([](double x) { return 2.0 - x; }, -10, 40, 1e-12, "line");
  EXPECT_NEAR(r.root, 2.0, 1e-10);
  EXPECT_THROW((void)bisect([](double x) { return x * x + 1; }, -1, 1, 1e-10, "none"), NoRoot);
  try {
    (void)bisect([](double) { return 3.0; }, 0, 1, 1e-10, "const");
    FAIL();
  } catch (const NoRoot& e) {
    EXPECT_EQ(e.f_lo(), 3.0);
    EXPECT_EQ(e.f_hi(), 3.0);
  }
  const auto changes = scan_sign_changes([](double x) { return (x - 0.33) * (x - 1.71); }, 0.0, 3.0, 0.05);
  ASSERT_EQ(changes.size(), 2U);
  EXPECT_LE(changes[0], 0.33);
  EXPECT_GT(changes[0] + 0.05, 0.33);
  EXPECT_LE(changes[1], 1.71);
}

}  // namespace
