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

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>

#include "qaipf/evolution.hpp"
#include "qaipf/oracle.hpp"

namespace {

using namespace qaipf;

double aligned_max_error(const StateVector& ref, const StateVector& got) {
  std::size_t big = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    if (std::abs(ref[i]) > std::abs(ref[big])) {
      big = i;
    }
  }
  auto phase = ref[big] / got[big];
  phase /= std::abs(phase);
  double err = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    err = std::max(err, std::abs(ref[i] - phase * got[i]));
  }
  return err;
}

TEST(Schedule, Validation) {
  EXPECT_THROW((Schedule{1.0, 2.0, 1.0}.validate()), InvalidArgument);
  EXPECT_THROW((Schedule{-1.0, 0.01, 1.0}.validate()), InvalidArgument);
  EXPECT_THROW((Schedule{1.0, 0.0, 1.0}.validate()), InvalidArgument);
  EXPECT_NO_THROW((Schedule{0.0, 0.01, 1.0}.validate()));
  EXPECT_EQ((Schedule{100.0, 0.01, 1.0}.steps()), 10000U);
  EXPECT_EQ((Schedule{0.0, 0.01, 1.0}.steps()), 0U);
}

TEST(Evolve, ZeroTimeIsIdentity) {
  const auto inst = sk_instance(4, 2);
  const Schedule s{0.0, 0.01, 1.0};
  for (BasisIndex m = 0; m < 16; ++m) {
    const auto psi = evolve(inst, m, s);
    for (std::size_t i = 0; i < psi.size(); ++i) {
      EXPECT_EQ(psi[i], (i == m ? Amplitude(1.0, 0.0) : Amplitude(0.0, 0.0)));
    }
  }
}

TEST(Evolve, NoTransverseFieldKeepsPopulations) {
  const auto inst = sat3_instance(5, {}, 4);
  const Schedule s{7.0, 0.01, 0.0};
  for (const BasisIndex m : {0ULL, 5ULL, 31ULL}) {
    const auto row = transition_row(inst, m, s);
    for (std::size_t i = 0; i < row.probs.size(); ++i) {
      EXPECT_NEAR(row.probs[i], i == m ? 1.0 : 0.0, 1e-15);
    }
    EXPECT_EQ(convergence_check(inst, m, s), 0.0);
  }
}

TEST(Evolve, MatchesDenseReference) {
  for (const int n : {2, 4}) {
    const auto inst = sk_instance(n, 11);
    const Schedule s{5.0, 0.01, 1.0};
    for (const BasisIndex m : {BasisIndex{0}, BasisIndex{1}, dimension(n) - 1}) {
      const auto ref = dense_reference_evolve(inst, m, s, 1e-3);
      const auto got = evolve(inst, m, s);
      EXPECT_LT(aligned_max_error(ref, got), 1e-6) << "n=" << n << " m=" << m;
    }
  }
}

TEST(Evolve, NormConservedOverLongSchedule) {
  const auto inst = sk_instance(6, 5);
  const auto psi = evolve(inst, 3, {100.0, 0.01, 1.0});
  EXPECT_LT(std::abs(psi.norm_squared() - 1.0), 1e-10);
}

TEST(Evolve, RangeErrors) {
  const auto inst = sk_instance(3, 1);
  EXPECT_THROW((void)evolve(inst, 8, {1.0, 0.01, 1.0}), InvalidArgument);
  EXPECT_THROW((void)evolve(inst, 0, {1.0, 2.0, 1.0}), InvalidArgument);
}

TEST(TransitionMatrix, DoublyStochasticAndWorkerIndependent) {
  const auto inst = sat3_instance(6, {}, 9);
  const Evolver ev(target_spectrum(inst), {10.0, 0.01, 1.0});
  const auto a = ev.transition_matrix(1, 8);
  const auto b = ev.transition_matrix(3, 5);
  EXPECT_EQ(a.probs, b.probs);
  const std::size_t dim = a.dimension();
  for (std::size_t m = 0; m < dim; ++m) {
    double row = 0.0;
    double col = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      row += a(m, k);
      col += a(k, m);
      ASSERT_GE(a(m, k), 0.0);
    }
    EXPECT_NEAR(row, 1.0, 1e-10);
    EXPECT_NEAR(col, 1.0, 1e-9);
  }
  // Block propagation equals single-state propagation exactly.
  const auto single = ev.transition_row(17);
  for (std::size_t k = 0; k < dim; ++k) {
    EXPECT_EQ(single.probs[k], a(17, k));
  }
}

TEST(Convergence, SecondOrderAndSmall) {
  const auto inst = sk_instance(6, 21);
  const Schedule s{100.0, 0.01, 1.0};
  const double e1 = convergence_check(inst, 0, s);
  const double e2 = convergence_check(inst, 0, s.halved());
  EXPECT_LT(e1, 1e-6);
  const double ratio = e1 / e2;
  EXPECT_GT(ratio, 4.0 / 1.5);
  EXPECT_LT(ratio, 4.0 * 1.5);
}

TEST(Measurement, BasisStateAndFrequencies) {
  RandomStream rng(3);
  const auto basis = StateVector::basis(3, 5);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(sample_measurement(basis, rng), 5U);
  }
  const double h = 1.0 / std::sqrt(2.0);
  const StateVector even(1, {Amplitude(h, 0.0), Amplitude(0.0, h)});
  constexpr int kDraws = 100000;
  int ones = 0;
  RandomStream r2(8);
  for (int i = 0; i < kDraws; ++i) {
    ones += sample_measurement(even, r2) == 1 ? 1 : 0;
  }
  EXPECT_NEAR(ones / static_cast<double>(kDraws), 0.5, 3 * std::sqrt(0.25 / kDraws));
  RandomStream x(77);
  RandomStream y(77);
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(sample_measurement(even, x), sample_measurement(even, y));
  }
  const StateVector broken(1, {Amplitude(1.0, 0.0), Amplitude(0.1, 0.0)});
  EXPECT_THROW((void)sample_measurement(broken, rng), InternalError);
}

TEST(StateDump, RoundTrip) {
  const auto psi = evolve(sk_instance(3, 4), 2, {3.0, 0.01, 1.0});
  const auto path = (std::filesystem::temp_directory_path() / "qaipf_state_dump.bin").string();
  write_state_dump(path, psi);
  const auto back = read_state_dump(path);
  ASSERT_EQ(back.size(), psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    EXPECT_EQ(back[i], psi[i]);
  }
  EXPECT_EQ(std::filesystem::file_size(path), 16U + 16U * psi.size());
  std::filesystem::remove(path);
  EXPECT_THROW((void)read_state_dump(path), IoError);
}

}  // namespace
