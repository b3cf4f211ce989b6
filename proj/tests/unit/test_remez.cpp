// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "compoly/remez.hpp"
#include "oracles.hpp"

using namespace compoly;

namespace {

BigReal relu(const BigReal& x) { return x > 0 ? x : BigReal(0); }

// Error f - p recomputed at the reported extrema must alternate in sign and
// agree in magnitude with the reported minimax error.
void expect_equioscillation(const RemezResult& r, const std::function<BigReal(const BigReal&)>& f,
                            size_t min_points) {
  PrecisionGuard g(r.precision_bits);
  ASSERT_GE(r.extrema.size(), min_points);
  const BigReal E = r.minimax_error;
  const BigReal tol = ldexp(E, -40);
  for (size_t i = 0; i < r.extrema.size(); ++i) {
    BigReal e = f(r.extrema[i]) - r.poly.eval(r.extrema[i]);
    EXPECT_LE(abs(abs(e) - E).to_double(), tol.to_double()) << "extremum " << i;
    EXPECT_LE(abs(e - r.extremal_errors[i]).to_double(), tol.to_double());
    if (i > 0) {
      EXPECT_LT(r.extremal_errors[i].sign() * r.extremal_errors[i - 1].sign(), 0)
          << "no sign change between extrema " << i - 1 << " and " << i;
    }
  }
}

// Dense long double scan: the sup error is not larger than reported.
void expect_sup_bounded(const RemezResult& r, double lo, double hi,
                        const std::function<long double(long double)>& f) {
  FastPoly<long double> p(r.poly);
  long double worst = 0;
  for (long double x : oracle::uniform_grid(lo, hi, 200001)) worst = std::max(worst, std::fabs(f(x) - p(x)));
  const long double E = r.minimax_error.to_long_double();
  EXPECT_LE(worst, E * (1 + 1e-9L) + 1e-16L);
  EXPECT_GE(worst, E * (1 - 1e-3L));
}

}  // namespace

TEST(Remez, SignDegreeOneClosedForm) {
  // min_c max |1 - c x| on [a, b]: c = 2/(a+b), error (b-a)/(b+a).
  RemezResult r = remez_sign_odd(SymmetricDomain(BigReal(0.25), BigReal(1)), 1);
  EXPECT_NEAR(r.minimax_error.to_double(), 0.75 / 1.25, 1e-30);
  Poly pw = to_power_basis(r.poly);
  EXPECT_NEAR(pw.coeffs()[1].to_double(), 2 / 1.25, 1e-15);
  EXPECT_TRUE(pw.coeffs()[0].is_zero());
}

TEST(Remez, ReluLowDegreeClosedForms) {
  // |x| on [-1,1]: degree 1 -> 1/2, degree 2 -> x^2 + 1/8 with error 1/8.
  // ReLU = x/2 + |x|/2 halves both.
  RemezResult r1 = remez_general(Target::kRelu, BigReal(-1), BigReal(1), 1);
  EXPECT_NEAR(r1.minimax_error.to_double(), 0.25, 1e-15);
  RemezResult r2 = remez_general(Target::kRelu, BigReal(-1), BigReal(1), 2);
  EXPECT_NEAR(r2.minimax_error.to_double(), 1.0 / 16, 1e-15);
  Poly p2 = to_power_basis(r2.poly);
  EXPECT_NEAR(p2.coeffs()[0].to_double(), 1.0 / 16, 1e-15);
  EXPECT_NEAR(p2.coeffs()[1].to_double(), 0.5, 1e-15);
  EXPECT_NEAR(p2.coeffs()[2].to_double(), 0.5, 1e-15);
  RemezResult a2 = remez_general(Target::kAbs, BigReal(-1), BigReal(1), 2);
  EXPECT_NEAR(a2.minimax_error.to_double(), 1.0 / 8, 1e-15);
}

TEST(Remez, SignEquioscillation) {
  for (int d : {3, 7, 15, 27}) {
    SCOPED_TRACE("degree " + std::to_string(d));
    RemezResult r = remez_sign_odd(SymmetricDomain(BigReal(0.05), BigReal(1)), d);
    expect_equioscillation(r, [](const BigReal&) { return BigReal(1); }, (d + 1) / 2 + 1);
    expect_sup_bounded(r, 0.05, 1, [](long double) { return 1.0L; });
  }
}

TEST(Remez, ReluEquioscillationOnHalfInterval) {
  for (int d : {10, 20, 41}) {
    SCOPED_TRACE("degree " + std::to_string(d));
    RemezResult r = remez_general(Target::kRelu, BigReal(-1), BigReal(1), d);
    // The mirrored set pairs +-x; alternation holds on x >= 0.
    RemezResult half = r;
    half.extrema.clear();
    half.extremal_errors.clear();
    for (size_t i = 0; i < r.extrema.size(); ++i) {
      if (r.extrema[i] >= 0) {
        half.extrema.push_back(r.extrema[i]);
        half.extremal_errors.push_back(r.extremal_errors[i]);
      }
    }
    expect_equioscillation(half, relu, static_cast<size_t>(d / 2 + 2));
    expect_sup_bounded(r, -1, 1, [](long double x) { return x > 0 ? x : 0.0L; });
  }
}

TEST(Remez, NonSymmetricInterval) {
  const int d = 6;
  RemezResult r = remez_general(Target::kAbs, BigReal(-0.3), BigReal(1), d);
  expect_equioscillation(r, [](const BigReal& x) { return abs(x); }, d + 2);
  expect_sup_bounded(r, -0.3, 1, [](long double x) { return std::fabs(x); });
}

TEST(Remez, OptimalityUnderPerturbation) {
  RemezResult r = remez_sign_odd(SymmetricDomain(BigReal(0.1), BigReal(1)), 9);
  PrecisionGuard g(r.precision_bits);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n01;
  const BigReal E = r.minimax_error;
  for (int trial = 0; trial < 50; ++trial) {
    // q = random odd polynomial of degree <= 9, scaled well below E.
    std::vector<BigReal> q(10, BigReal(0));
    for (int k = 1; k <= 9; k += 2) q[static_cast<size_t>(k)] = BigReal(n01(rng) * 1e-6);
    BigReal worst(0);
    for (size_t i = 0; i < r.extrema.size(); ++i) {
      BigReal e = r.extremal_errors[i] - oracle::horner(q, r.extrema[i]);
      worst = max(worst, abs(e));
    }
    EXPECT_GE(worst.to_double(), E.to_double() * (1 - 1e-12)) << "trial " << trial;
  }
}

TEST(Remez, OddSymmetry) {
  RemezResult r = remez_sign_odd(SymmetricDomain(BigReal(0.2), BigReal(1.5)), 13);
  for (size_t k = 0; k < r.poly.coeffs().size(); k += 2) EXPECT_TRUE(r.poly.coeffs()[k].is_zero());
  for (double x : {0.2, 0.7, 1.1, 1.5}) {
    EXPECT_TRUE(r.poly.eval(BigReal(-x)) == -r.poly.eval(BigReal(x)));
  }
}

TEST(Remez, ErrorDecreasesWithDegree) {
  BigReal prev(1e9);
  for (int d = 3; d <= 31; d += 2) {
    RemezResult r = remez_sign_odd(SymmetricDomain(BigReal(0.05), BigReal(1)), d);
    EXPECT_LT(r.minimax_error, prev) << "degree " << d;
    prev = r.minimax_error;
  }
  prev = BigReal(1e9);
  for (int d = 2; d <= 40; d += 2) {
    RemezResult r = remez_general(Target::kRelu, BigReal(-1), BigReal(1), d);
    EXPECT_LT(r.minimax_error, prev) << "degree " << d;
    prev = r.minimax_error;
  }
}

TEST(Remez, ReferenceDegreeTen) {
  RemezResult r = remez_general(Target::kRelu, BigReal(-1), BigReal(1), 10);
  EXPECT_NEAR(-std::log2(r.minimax_error.to_double()), 6.1664, 0.01);
}

TEST(Remez, InvalidInputs) {
  SymmetricDomain dom(BigReal(0.1), BigReal(1));
  EXPECT_THROW(remez_sign_odd(dom, 4), std::invalid_argument);
  EXPECT_THROW(remez_sign_odd(dom, 0), std::invalid_argument);
  EXPECT_THROW(remez_general(Target::kRelu, BigReal(1), BigReal(-1), 4), std::invalid_argument);
  EXPECT_THROW(remez_general(Target::kRelu, BigReal(1), BigReal(1), 4), std::invalid_argument);
  EXPECT_THROW(remez_general(Target::kRelu, BigReal(-1), BigReal(1), 0), std::invalid_argument);
}

TEST(Remez, NonConvergenceCarriesBracket) {
  RemezOptions opts;
  opts.max_iterations = 1;
  try {
    remez_general(Target::kRelu, BigReal(-1), BigReal(1), 60, opts);
    FAIL() << "expected RemezError";
  } catch (const RemezError& e) {
    EXPECT_EQ(e.iterations(), 1);
    EXPECT_LE(e.lower(), e.upper());
    EXPECT_GT(e.upper(), 0);
  }
}

TEST(Remez, PrecisionPolicy) {
  EXPECT_EQ(effective_precision_bits(10, 300), 300u);
  EXPECT_GE(effective_precision_bits(200, 300), 800u);
  EXPECT_GE(effective_precision_bits(200, 0), 800u);
  RemezResult r = remez_general(Target::kRelu, BigReal(-1), BigReal(1), 100);
  EXPECT_GE(r.precision_bits, 400u);
}
