// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "compoly/approx_ops.hpp"
#include "oracles.hpp"

using namespace compoly;

TEST(ApproxOps, ReluUnitWithinBound) {
  for (int alpha : {7, 10, 13}) {
    ReluApprox ra = ReluApprox::for_alpha(alpha);
    const long double bound = std::ldexp(1.0L, -alpha);
    long double worst = 0;
    for (long double x : oracle::uniform_grid(-1, 1, 100001)) {
      worst = std::max(worst, std::fabs(ra.unit(x) - std::max(x, 0.0L)));
    }
    EXPECT_LE(worst, bound) << "alpha " << alpha;
    EXPECT_GT(worst, bound / 4) << "alpha " << alpha;
  }
}

TEST(ApproxOps, ReluScaled) {
  ReluApprox ra = ReluApprox::for_alpha(10, 50.0);
  const long double bound = 50 * std::ldexp(1.0L, -10);
  for (long double x : oracle::uniform_grid(-50, 50, 20001)) {
    EXPECT_LE(std::fabs(ra.scaled(x) - std::max(x, 0.0L)), bound);
  }
  EXPECT_THROW(ReluApprox::for_alpha(10, 0.5), std::invalid_argument);
}

TEST(ApproxOps, PairwiseMax) {
  MaxApprox ma = MaxApprox::for_alpha(9);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  const double bound = std::ldexp(1.0, -9);
  for (int i = 0; i < 20000; ++i) {
    double a = u(rng), b = i % 2 ? std::clamp(a + 1e-3 * (u(rng) - 0.5), 0.0, 1.0) : u(rng);
    EXPECT_LE(std::fabs(ma(a, b) - std::max(a, b)), bound);
  }
}

TEST(ApproxOps, MaxPoolRecursion) {
  MaxApprox ma = MaxApprox::for_alpha(10);
  const double eps = std::ldexp(1.0, -10);
  std::mt19937_64 rng(4);
  for (int n : {1, 2, 3, 4, 5, 9}) {
    const int L = ceil_log2_int(n);
    const double margin = std::max(L - 1, 0) * eps;
    std::uniform_real_distribution<double> u(margin, 1 - margin);
    for (int t = 0; t < 2000; ++t) {
      std::vector<double> xs(static_cast<size_t>(n));
      for (double& x : xs) x = u(rng);
      MaxTrace tr;
      double got = maxpool_approx(ma, xs, &tr);
      EXPECT_LE(std::fabs(got - *std::max_element(xs.begin(), xs.end())), L * eps + 1e-15);
      EXPECT_TRUE(tr.all_in_range());
      if (n == 1) {
        EXPECT_EQ(got, xs[0]);
      }
    }
  }
}

TEST(ApproxOps, ScaledMaxPool) {
  MaxPoolApprox mp = MaxPoolApprox::for_alpha(10, 4, 100.0);
  EXPECT_GT(mp.B_prime(), 200.0);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-100, 100);
  const double bound = 100 * 2 * std::ldexp(1.0, -10) / (0.5 - std::ldexp(1.0, -10));
  for (int t = 0; t < 5000; ++t) {
    std::vector<double> xs(4);
    for (double& x : xs) x = u(rng);
    EXPECT_LE(std::fabs(mp(xs) - *std::max_element(xs.begin(), xs.end())), bound);
  }
  std::vector<double> three(3, 0.0);
  EXPECT_THROW(mp(three), std::invalid_argument);
}

TEST(ApproxOps, ClampSlackAndDomainErrors) {
  ReluApprox ra = ReluApprox::for_alpha(8);
  reset_clamp_count();
  const double inside_slack = 1 + std::ldexp(1.0, -10);
  EXPECT_NO_THROW(ra.unit(inside_slack));
  EXPECT_EQ(clamp_count(), 1u);
  EXPECT_NO_THROW(ra.unit(-inside_slack));
  EXPECT_EQ(clamp_count(), 2u);
  EXPECT_THROW(ra.unit(1.1), DomainError);
  EXPECT_THROW(ra.unit(std::nan("")), DomainError);
  MaxApprox ma = MaxApprox::for_alpha(8);
  EXPECT_THROW(ma(-0.5, 0.5), DomainError);
  reset_clamp_count();
  EXPECT_EQ(clamp_count(), 0u);
}

TEST(ApproxOps, CeilLog2) {
  EXPECT_EQ(ceil_log2_int(1), 0);
  EXPECT_EQ(ceil_log2_int(2), 1);
  EXPECT_EQ(ceil_log2_int(3), 2);
  EXPECT_EQ(ceil_log2_int(4), 2);
  EXPECT_EQ(ceil_log2_int(9), 4);
  EXPECT_THROW(ceil_log2_int(0), std::invalid_argument);
}

TEST(ApproxOps, VerifyBoundSmallPlan) {
  SamplePlan plan;
  plan.grid_points = 20001;
  plan.random_samples = 2000;
  plan.adversarial_samples = 2000;
  for (OpKind op : {OpKind::kRelu, OpKind::kMax, OpKind::kMaxPool}) {
    plan.n = 4;
    VerifyReport r = verify_bound(op, 9, plan);
    EXPECT_TRUE(r.ok()) << to_string(op);
    EXPECT_GT(r.evaluations, 0u);
    EXPECT_LE(r.max_error, r.bound);
  }
}
