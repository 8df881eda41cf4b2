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
#include <vector>

#include "qaipf/oracle.hpp"

namespace {

using namespace qaipf;

TEST(ExactPartition, Examples) {
  const auto sp = target_spectrum(sk_instance(6, 1));
  EXPECT_EQ(exact_partition(sp, 0.0), 64.0);
  const DiagonalSpectrum two(1, {-1.0, 1.0});
  EXPECT_NEAR(exact_partition(two, 0.7), std::exp(0.7) + std::exp(-0.7), 1e-15);
  // Large beta on SAT3 counts zero-energy states.
  const auto sat = target_spectrum(sat3_instance(7, {}, 3));
  int ground = 0;
  for (std::size_t m = 0; m < sat.size(); ++m) {
    ground += sat[m] == 0.0 ? 1 : 0;
  }
  EXPECT_GE(ground, 1);
  EXPECT_NEAR(exact_partition(sat, 60.0), ground, 1e-20);
}

TEST(ExactMu, LimitsAndIdentity) {
  const auto inst = sat3_instance(6, {}, 8);
  const auto sp = target_spectrum(inst);
  const Schedule s{10.0, 0.01, 1.0};
  for (const double v : exact_mu(inst, s, 0.0, 1)) {
    EXPECT_NEAR(v, 1.0, 1e-10);
  }
  const auto still = exact_mu(inst, {0.0, 0.01, 1.0}, 1.5, 1);
  for (std::size_t m = 0; m < sp.size(); ++m) {
    EXPECT_NEAR(still[m], std::exp(-3.0 * sp[m]), 1e-15);
  }
  for (const double beta : {0.5, 2.0, 10.0}) {
    const auto mu = exact_mu(inst, s, beta, 1);
    CompensatedSum total;
    for (const double v : mu) {
      total.add(v);
    }
    EXPECT_NEAR(total.value() / exact_partition(sp, 2 * beta), 1.0, 1e-9);
  }
  EXPECT_THROW((void)exact_mu(sk_instance(15, 1), s, 1.0), ResourceLimit);
}

TEST(DenseReference, LimitsAndSelfConvergence) {
  const auto inst = sk_instance(2, 9);
  const auto psi0 = dense_reference_evolve(inst, 2, {0.0, 0.01, 1.0});
  EXPECT_EQ(psi0[2], Amplitude(1.0, 0.0));
  EXPECT_EQ(std::norm(psi0[0]) + std::norm(psi0[1]) + std::norm(psi0[3]), 0.0);
  const auto diag = dense_reference_evolve(sk_instance(3, 2), 5, {2.0, 0.01, 0.0});
  for (std::size_t i = 0; i < diag.size(); ++i) {
    EXPECT_NEAR(std::norm(diag[i]), i == 5 ? 1.0 : 0.0, 1e-12);
  }
  const Schedule s{3.0, 0.01, 1.0};
  const auto a = dense_reference_evolve(inst, 1, s, 1e-3);
  const auto b = dense_reference_evolve(inst, 1, s, 5e-4);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
  }
  EXPECT_LT(diff, 1e-9);
  EXPECT_THROW((void)dense_reference_evolve(sk_instance(5, 1), 0, s), ResourceLimit);
  EXPECT_THROW((void)dense_reference_evolve(inst, 0, s, 1e-2), InvalidArgument);
}

TEST(KlFit, UniformGibbsAndBoundary) {
  EXPECT_NEAR(kl_fit_alpha(std::vector<double>(64, 1.0 / 64), 6), 0.0, 1e-12);
  for (const double a0 : {-1.0, 0.3, 1.921, 4.0}) {
    const auto g = variational_gibbs(a0, 7);
    std::vector<double> p(128);
    for (BasisIndex m = 0; m < 128; ++m) {
      p[m] = g.prob(m);
    }
    EXPECT_NEAR(kl_fit_alpha(p, 7), a0, 1e-10);
  }
  std::vector<double> corner(8, 0.0);
  corner[0] = 1.0;
  EXPECT_THROW((void)kl_fit_alpha(corner, 3), NoRoot);
}

TEST(QDistribution, NormalisedAndBinomial) {
  const std::vector<double> ones(256, 1.0);
  const auto q = q_distribution(ones, 0.0, 8);
  for (int e = 0; e <= 8; ++e) {
    EXPECT_NEAR(q[static_cast<std::size_t>(e)], binomial_real(8, e) / 256.0, 1e-15);
  }
  const auto mu = exact_mu(sk_instance(8, 2), {20.0, 0.01, 1.0}, 5.0, 1);
  const auto a = solve_alpha_exact(mu, 8).alpha;
  const auto qa = q_distribution(mu, a, 8);
  EXPECT_NEAR(compensated_sum(qa), 1.0, 1e-12);
  // Diagnostic: weight concentrates on low shells at low temperature.
  std::size_t mode = 0;
  for (std::size_t e = 0; e < qa.size(); ++e) {
    mode = qa[e] > qa[mode] ? e : mode;
  }
  RecordProperty("q_mode", static_cast<int>(mode));
  for (std::size_t e = mode + 1; e + 1 < qa.size(); ++e) {
    EXPECT_GE(qa[e], qa[e + 1] * 0.5);
  }
}

TEST(Locality, SymmetryAndHighTemperature) {
  const auto inst = sk_instance(6, 12);
  const Schedule s{10.0, 0.01, 1.0};
  const auto hot = locality_diagnostic(inst, s, 0.0, 0.6, 1);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      const auto at = static_cast<std::size_t>(i * 6 + j);
      if (i == j) {
        EXPECT_TRUE(std::isnan(hot.a[at]));
        continue;
      }
      EXPECT_NEAR(hot.a[at], std::exp(-0.6), 1e-10);
      EXPECT_NEAR(hot.b[at], 1.0, 1e-10);
      EXPECT_NEAR(hot.c[at], std::exp(0.6), 1e-10);
    }
  }
  const auto cold = locality_diagnostic(inst, s, 10.0, 1.5, 1);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      const auto ij = static_cast<std::size_t>(i * 6 + j);
      const auto ji = static_cast<std::size_t>(j * 6 + i);
      if (i != j) {
        EXPECT_EQ(cold.a[ij], cold.a[ji]);
        EXPECT_EQ(cold.b[ij], cold.b[ji]);
        EXPECT_EQ(cold.c[ij], cold.c[ji]);
      }
    }
  }
  RecordProperty("correlation_ab", std::to_string(cold.correlation_ab));
  EXPECT_THROW((void)locality_diagnostic(sk_instance(2, 1), s, 1.0, 1.0), InvalidArgument);
  EXPECT_THROW((void)locality_diagnostic(sk_instance(13, 1), s, 1.0, 1.0), ResourceLimit);
}

TEST(ExactAnalysis, InvariantsAndBounds) {
  const auto inst = sk_instance(6, 30);
  const auto sp = target_spectrum(inst);
  const auto t = Evolver(sp, {20.0, 0.01, 1.0}).transition_matrix(1);
  for (const double beta : {0.0, 0.5, 3.0, 10.0}) {
    const auto a = analyze_exact(t, sp, beta);
    EXPECT_NEAR(compensated_sum(a.p_opt), 1.0, 1e-12);
    CompensatedSum roots;
    for (const double v : a.mu) {
      roots.add(std::sqrt(v));
    }
    EXPECT_NEAR(a.sigma2_min, roots.value() * roots.value() - a.z1 * a.z1, 1e-9 * a.z1 * a.z1);
    EXPECT_GE(a.sigma2_min, -1e-9 * a.z1 * a.z1);
    const double d = 64.0;
    const double z2 = exact_partition(sp, 2 * beta);
    const double rel = a.sigma2_min / (a.z1 * a.z1);
    // Cauchy-Schwarz: (sum sqrt mu)^2 <= D sum mu = D Z1(2 beta), and Z1(2 beta) <= Z1^2.
    EXPECT_LE(rel, d * z2 / (a.z1 * a.z1) - 1.0 + 1e-9 * d);
    EXPECT_LE(z2, a.z1 * a.z1 * (1 + 1e-12));
    if (beta == 0.0) {
      EXPECT_NEAR(a.sigma2_min, 0.0, 1e-9);
      EXPECT_NEAR(a.alpha_star, 0.0, 1e-9);
      EXPECT_NEAR(a.alpha_kl, 0.0, 1e-9);
    }
    RecordProperty("alpha_star_vs_kl_beta" + std::to_string(beta),
                   std::to_string(a.alpha_star) + "/" + std::to_string(a.alpha_kl));
  }
}

}  // namespace
