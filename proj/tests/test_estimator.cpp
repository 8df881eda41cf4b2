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

#include "qaipf/estimator.hpp"
#include "qaipf/oracle.hpp"

namespace {

using namespace qaipf;

struct Fixture {
  IsingInstance inst;
  DiagonalSpectrum sp;
  TransitionMatrix t;
};

Fixture make_fixture(const IsingInstance& inst, const Schedule& s) {
  auto sp = target_spectrum(inst);
  auto t = Evolver(sp, s).transition_matrix(1);
  return {inst, std::move(sp), std::move(t)};
}

// Direct enumeration oracle: sum over (m, n) of z_{m,n} P(n|m) P_m.
double enumerate_expectation(const Fixture& f, const SamplingDistribution& d, double beta) {
  CompensatedSum acc;
  for (BasisIndex m = 0; m < f.sp.size(); ++m) {
    const double pm = d.prob(m);
    for (BasisIndex k = 0; k < f.sp.size(); ++k) {
      acc.add(std::exp(-beta * f.sp[k]) / pm * f.t(m, k) * pm);
    }
  }
  return acc.value();
}

double brute_z(const DiagonalSpectrum& sp, double beta) {
  double z = 0.0;
  for (std::size_t k = 0; k < sp.size(); ++k) {
    z += std::exp(-beta * sp[k]);
  }
  return z;
}

TEST(Estimate, ZeroBetaGivesInverseProbabilities) {
  const auto f = make_fixture(sk_instance(3, 1), {5.0, 0.01, 1.0});
  const auto d = variational_gibbs(0.8, 3);
  const auto r = estimate_z(row_source(f.t), f.sp, d, 0.0, 500, 4, 1, true);
  for (const auto& tr : r.trajectories) {
    EXPECT_EQ(tr.z, 1.0 / d.prob(tr.initial));
  }
  EXPECT_NEAR(enumerate_expectation(f, d, 0.0), 8.0, 1e-12);
  EXPECT_NEAR(r.z_est, 8.0, 4 * r.standard_error);
}

TEST(Estimate, UnbiasedByEnumeration) {
  for (const auto& inst : {sk_instance(3, 5), sat3_instance(3, {}, 5)}) {
    const auto f = make_fixture(inst, {5.0, 0.01, 1.0});
    for (const double beta : {0.1, 1.0, 10.0}) {
      const double z1 = brute_z(f.sp, beta);
      const auto mu = mu_from_transitions(f.t, f.sp, beta);
      const double alpha = solve_alpha_exact(mu, 3).alpha;
      const std::vector<SamplingDistribution> dists{je_gibbs(beta, 3), variational_gibbs(alpha, 3),
                                                    exact_optimal(mu),
                                                    practical_distribution(moments_from_mu(mu, 1, beta), alpha)};
      for (const auto& d : dists) {
        EXPECT_NEAR(enumerate_expectation(f, d, beta) / z1, 1.0, 1e-10) << d.describe() << " beta=" << beta;
      }
    }
  }
}

TEST(Estimate, DeterministicAcrossWorkers) {
  const auto inst = sk_instance(5, 8);
  const Evolver ev(target_spectrum(inst), {5.0, 0.01, 1.0});
  const auto d = je_gibbs(0.3, 5);
  const auto a = estimate_z(ev, d, 1.0, 700, 77, 1, true);
  const auto b = estimate_z(ev, d, 1.0, 700, 77, 3, true);
  const auto c = estimate_z(ev, d, 1.0, 700, 77, 1, true);
  EXPECT_EQ(a.z_est, b.z_est);
  EXPECT_EQ(a.empirical_variance, b.empirical_variance);
  EXPECT_EQ(a.trajectories, b.trajectories);
  EXPECT_EQ(a.z_est, c.z_est);
  EXPECT_GT(a.z_est, 0.0);
  EXPECT_NEAR(a.standard_error * a.standard_error * 700, a.empirical_variance, 1e-12 * a.empirical_variance);
  EXPECT_THROW((void)estimate_z(ev, d, 1.0, 0, 1), InvalidArgument);
  EXPECT_THROW((void)estimate_z(ev, je_gibbs(0.3, 4), 1.0, 10, 1), InvalidArgument);
}

TEST(Estimate, AgreesWithExactWithinErrorBars) {
  const auto f = make_fixture(sat3_instance(5, {}, 3), {10.0, 0.01, 1.0});
  const double beta = 1.0;
  const auto mu = mu_from_transitions(f.t, f.sp, beta);
  const double z1 = exact_partition(f.sp, beta);
  for (const auto& d : {je_gibbs(beta, 5), exact_optimal(mu)}) {
    const auto r = estimate_z(row_source(f.t), f.sp, d, beta, 20000, 3, 1);
    EXPECT_NEAR(r.z_est, z1, 4.5 * r.standard_error) << d.describe();
    // The sample variance tracks the exact variance.
    EXPECT_NEAR(r.empirical_variance / exact_variance(d, mu, z1), 1.0, 0.2) << d.describe();
  }
}

TEST(Estimate, ErrorScalesAsInverseSqrtSamples) {
  const auto f = make_fixture(sk_instance(4, 2), {5.0, 0.01, 1.0});
  const double beta = 1.0;
  const double z1 = exact_partition(f.sp, beta);
  const auto d = je_gibbs(beta, 4);
  auto rms_error = [&](std::size_t m_s, std::uint64_t base) {
    double acc = 0.0;
    constexpr int kRuns = 200;
    for (int r = 0; r < kRuns; ++r) {
      const auto e = estimate_z(row_source(f.t), f.sp, d, beta, m_s, base + static_cast<std::uint64_t>(r), 1);
      acc += std::pow((e.z_est - z1) / z1, 2);
    }
    return std::sqrt(acc / kRuns);
  };
  const double ratio = rms_error(100, 1000) / rms_error(1000, 5000);
  EXPECT_GT(ratio, std::sqrt(10.0) / 2);
  EXPECT_LT(ratio, std::sqrt(10.0) * 2);
}

TEST(JeWork, IdentityAndZeroTime) {
  const auto inst = sk_instance(4, 13);
  const Evolver ev(target_spectrum(inst), {5.0, 0.01, 1.0});
  const auto w = je_work_estimate(ev, 2.0, 3000, 6, 1);
  EXPECT_LT(w.identity_gap, 1e-12);
  // tau = 0: identity transitions, so <exp(-beta W)> = sum_m P^G_m exp(-beta (E1_m - E0_m)) = Z1 / Z0.
  const auto inst2 = sk_instance(2, 4);
  const auto sp2 = target_spectrum(inst2);
  const Evolver ev0(sp2, {0.0, 0.01, 1.0});
  const double beta = 1.5;
  double z0 = 0.0;
  double z1 = 0.0;
  for (BasisIndex m = 0; m < 4; ++m) {
    z0 += std::exp(-beta * hamming_weight(m));
    z1 += std::exp(-beta * sp2[m]);
  }
  const auto w0 = je_work_estimate(ev0, beta, 40000, 8, 1);
  EXPECT_NEAR(w0.z0, z0, 1e-12);
  EXPECT_NEAR(w0.ratio, z1 / z0, 4.5 * w0.estimate.standard_error / z0);
  const auto hot = je_work_estimate(ev, 0.0, 100, 1, 1);
  EXPECT_EQ(hot.ratio, 1.0);
}

TEST(Reuse, StratifiedEstimateIsUnbiased) {
  const auto inst = sk_instance(5, 19);
  const auto sp = target_spectrum(inst);
  const Evolver ev(sp, {5.0, 0.01, 1.0});
  const double beta = 1.0;
  const double z1 = exact_partition(sp, beta);
  const auto data = presample(ev, 1, 400, 3, 1);
  const double alpha = solve_alpha_practical(data, beta).alpha;
  const auto r = estimate_z_with_reuse(ev, data, alpha, beta, 20000, 4, 1);
  EXPECT_NEAR(r.z_est, z1, 4.5 * r.standard_error);
  EXPECT_NEAR(r.z_est, r.low_part + r.high.z_est, 1e-12 * r.z_est);
  const auto full = presample(ev, 5, 50, 3, 1);
  const auto only_low = estimate_z_with_reuse(ev, full, 0.0, beta, 10, 4, 1);
  EXPECT_EQ(only_low.high.m_s, 0U);
  EXPECT_NEAR(only_low.z_est, z1, 4.5 * only_low.standard_error);
}

TEST(Variance, ExactAndMinimal) {
  const std::vector<double> ones(16, 1.0);
  EXPECT_NEAR(exact_variance(je_gibbs(0.0, 4), ones, 16.0), 0.0, 1e-12);
  EXPECT_NEAR(min_variance(ones, 16.0), 0.0, 1e-12);
  EXPECT_NEAR(min_variance(std::vector<double>{4.0, 1.0}, 2.0), 9.0 - 4.0, 1e-15);
  const auto f = make_fixture(sk_instance(5, 7), {10.0, 0.01, 1.0});
  for (const double beta : {1.0, 5.0}) {
    const auto mu = mu_from_transitions(f.t, f.sp, beta);
    const double z1 = exact_partition(f.sp, beta);
    const double vmin = min_variance(mu, z1);
    EXPECT_NEAR(exact_variance(exact_optimal(mu), mu, z1), vmin, 1e-10 * z1 * z1);
    for (const auto& d : {je_gibbs(beta, 5), variational_gibbs(0.3, 5), variational_gibbs(3.0, 5)}) {
      EXPECT_GE(exact_variance(d, mu, z1), vmin - 1e-9 * z1 * z1);
    }
    CompensatedSum total;
    for (const double v : mu) {
      total.add(v);
    }
    EXPECT_LE(vmin + z1 * z1, 32.0 * total.value() * (1 + 1e-9));
  }
  EXPECT_THROW((void)min_variance(std::vector<double>{1.0, 0.0}, 1.0), InvalidArgument);
  EXPECT_THROW((void)exact_variance(je_gibbs(1.0, 3), ones, 1.0), InvalidArgument);
}

TEST(RequiredSamples, Formula) {
  EXPECT_EQ(required_samples(4.0, 1.0, 2.0), 1U);
  EXPECT_EQ(required_samples(100.0 * 9.0, 0.1, 3.0), 10000U);
  EXPECT_EQ(required_samples(100.0 * 9.0, 0.2, 3.0), 2500U);
  EXPECT_EQ(required_samples(1.1, 1.0, 1.0), 2U);
  EXPECT_THROW((void)required_samples(0.0, 0.1, 1.0), InvalidArgument);
  EXPECT_THROW((void)required_samples(1.0, -0.1, 1.0), InvalidArgument);
}

TEST(FitGamma, ExactData) {
  std::vector<ScalingPoint> pts;
  for (int n = 4; n <= 10; ++n) {
    pts.push_back({n, std::exp2(0.5 * n)});
  }
  const auto fit = fit_gamma(pts);
  EXPECT_NEAR(fit.gamma, 0.5, 1e-12);
  EXPECT_NEAR(fit.intercept, 0.0, 1e-11);
  EXPECT_LT(fit.residual_norm, 1e-11);
  std::vector<ScalingPoint> flat{{3, 2.0}, {4, 2.0}, {5, 2.0}};
  EXPECT_NEAR(fit_gamma(flat).gamma, 0.0, 1e-15);
  EXPECT_THROW((void)fit_gamma(std::vector<ScalingPoint>{{3, 1.0}, {4, 1.0}}), InvalidArgument);
  EXPECT_THROW((void)fit_gamma(std::vector<ScalingPoint>{{3, 1.0}, {4, 0.0}, {5, 1.0}}), InvalidArgument);
}

TEST(GammaFormulas, ClosedForms) {
  EXPECT_NEAR(gamma_theory(1.921), 0.364, 1e-3);
  EXPECT_NEAR(gamma_theory(1.575), 0.482, 1e-3);
  EXPECT_DOUBLE_EQ(gamma_theory(0.0), 1.0);
  for (const double a : {0.0, 0.5, 1.921, 3.0}) {
    EXPECT_EQ(gamma_prime(a, a), gamma_theory(a));
    for (const double d : {-0.5, -0.1, 0.1, 0.7}) {
      EXPECT_GT(gamma_prime(a, a + d), gamma_theory(a));
    }
  }
  EXPECT_DOUBLE_EQ(gamma_prime(0.0, 0.0), 1.0);
}

TEST(TotalCost, Formula) {
  EXPECT_EQ(total_cost(5.0, 10.0, 0.0), 0.0);
  EXPECT_EQ(total_cost(100.0, 100.0, 1.0), 200.0);
  EXPECT_THROW((void)total_cost(-1.0, 1.0, 1.0), InvalidArgument);
}

}  // namespace
