// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "compoly/composite.hpp"
#include "compoly/reference_tables.hpp"
#include "oracles.hpp"

using namespace compoly;

namespace {

std::vector<long double> power_ld(const Poly& p) {
  std::vector<long double> c;
  const Poly q = to_power_basis(p);
  for (const BigReal& v : q.coeffs()) c.push_back(v.to_long_double());
  return c;
}

}  // namespace

TEST(Composite, DepthFormula) {
  EXPECT_EQ(composite_depth({5}), 4);
  EXPECT_EQ(composite_depth({7, 7}), 7);
  EXPECT_EQ(composite_depth({15, 27, 29}), 15);
  for (const auto& row : reference::kSchedules) {
    auto d = reference::degrees_of(row);
    int want = 1;
    for (int k : d) want += oracle::ceil_log2(k + 1);
    EXPECT_EQ(composite_depth(std::vector<int>(d.begin(), d.end())), want);
  }
}

TEST(Composite, TabulatedSpecRange) {
  EXPECT_THROW(tabulated_spec(3), std::out_of_range);
  EXPECT_THROW(tabulated_spec(15), std::out_of_range);
  ApproxSpec s = tabulated_spec(7);
  EXPECT_EQ(s.zeta, 11);
  EXPECT_EQ(s.degrees, (std::vector<int>{7, 7}));
  EXPECT_DOUBLE_EQ(s.epsilon().to_double(), 11.0 / 128);
}

TEST(Composite, DegreeOneClosedForm) {
  SignComposite c = build_sign_composite(BigReal(0.5), {1});
  ASSERT_EQ(c.stages().size(), 1u);
  EXPECT_NEAR(c.stage_errors()[0].to_double(), 1.0 / 3, 1e-30);
  EXPECT_NEAR(c(0.75), 0.75 * 2 / 1.5, 1e-15);
  EXPECT_NEAR(c.beta().to_double(), -std::log2(1.0 / 3), 1e-12);
}

TEST(Composite, SingleStageForAlphaFour) {
  SignComposite c = build_sign_composite(tabulated_spec(4).epsilon(), tabulated_spec(4).degrees);
  EXPECT_EQ(c.degrees(), (std::vector<int>{5}));
  EXPECT_GE(c.beta().to_double(), 3.0);
}

TEST(Composite, ImageIntervalContainsBruteForceImage) {
  ApproxSpec s = tabulated_spec(10);
  SignComposite c = build_sign_composite(s.epsilon(), s.degrees);
  const long double eps = s.epsilon().to_long_double();
  std::vector<std::vector<long double>> pw;
  for (const Poly& p : c.stages()) pw.push_back(power_ld(p));
  std::vector<long double> xs = oracle::uniform_grid(eps, 1.0L, 1000000);
  for (size_t k = 1; k < c.stages().size(); ++k) {
    long double lo = 10, hi = -10;
    for (long double x : xs) {
      long double y = x;
      for (size_t i = 0; i < k; ++i) y = oracle::horner(pw[i], y);
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    ImageCertificate cert = image_interval(c, k);
    EXPECT_LE(cert.domain.a.to_long_double(), lo + 1e-15L) << "prefix " << k;
    EXPECT_GE(cert.domain.b.to_long_double(), hi - 1e-15L) << "prefix " << k;
    // The certificate should not be loose either.
    const long double dev = std::max(1 - lo, hi - 1);
    EXPECT_NEAR(cert.refined_max.to_long_double(), dev, 1e-9L * dev);
    EXPECT_TRUE(cert.domain.a == c.stage_domains()[k].a);
  }
}

TEST(Composite, ClosenessForSmallAlpha) {
  for (int alpha = 4; alpha <= 9; ++alpha) {
    SCOPED_TRACE("alpha " + std::to_string(alpha));
    ApproxSpec s = tabulated_spec(alpha);
    SignComposite c = build_sign_composite(s.epsilon(), s.degrees);
    ClosenessReport rep = certify_closeness(c, alpha - 1, 100000);
    EXPECT_TRUE(rep.close);
    EXPECT_GE(rep.achieved_beta, alpha - 1);
    // Independent Horner evaluation of the power form.
    std::vector<std::vector<long double>> pw;
    for (const Poly& p : c.stages()) pw.push_back(power_ld(p));
    long double worst = 0;
    for (long double x : oracle::log_spaced(s.epsilon().to_long_double(), 1, 100000)) {
      long double y = x;
      for (const auto& q : pw) y = oracle::horner(q, y);
      worst = std::max(worst, std::fabs(y - 1));
    }
    EXPECT_LE(worst, std::ldexp(1.0L, -(alpha - 1)));
    EXPECT_NEAR(static_cast<double>(worst), static_cast<double>(rep.max_deviation), 1e-9);
  }
}

TEST(Composite, OddSymmetry) {
  const auto& c = *composite_for_alpha(8);
  for (double x : {0.1, 0.3, 0.9}) EXPECT_EQ(c(-x), -c(x));
}

TEST(Composite, DumpRoundTrip) {
  ApproxSpec s = tabulated_spec(8);
  SignComposite c = build_sign_composite(s.epsilon(), s.degrees);
  std::stringstream ss;
  write_coefficient_dump(ss, c);
  const std::string text = ss.str();
  EXPECT_EQ(text.rfind("# compoly coefficient dump v1\n", 0), 0u);
  std::vector<Poly> back = read_coefficient_dump(ss);
  ASSERT_EQ(back.size(), c.stages().size());
  for (size_t i = 0; i < back.size(); ++i) {
    Poly want = to_power_basis(c.stages()[i]);
    ASSERT_EQ(back[i].coeffs().size(), want.coeffs().size());
    EXPECT_EQ(back[i].parity(), Parity::kOdd);
    for (size_t k = 0; k < want.coeffs().size(); ++k) {
      const BigReal diff = abs(back[i].coeffs()[k] - want.coeffs()[k]);
      EXPECT_LE(diff.to_double(), 1e-80 * std::max(1.0, std::fabs(want.coeffs()[k].to_double())));
    }
  }
}

TEST(Composite, DumpParseErrorsCarryLineNumbers) {
  std::istringstream bad("# compoly coefficient dump v1\nstage 1 degree 3\n0\n1\nnot-a-number\n0\n");
  try {
    read_coefficient_dump(bad);
    FAIL() << "expected a parse error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos) << e.what();
  }
  std::istringstream short_stage("stage 1 degree 3\n0\n1\n");
  EXPECT_THROW(read_coefficient_dump(short_stage), std::runtime_error);
}

TEST(Composite, InvalidBuilds) {
  EXPECT_THROW(build_sign_composite(BigReal(0), {3}), std::invalid_argument);
  EXPECT_THROW(build_sign_composite(BigReal(1), {3}), std::invalid_argument);
  EXPECT_THROW(build_sign_composite(BigReal(0.1), {}), std::invalid_argument);
  EXPECT_THROW(build_sign_composite(BigReal(0.1), {4}), std::invalid_argument);
}
