// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "compoly/netmodel.hpp"

using namespace compoly;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// ||A||_inf = max over sign vectors s of ||A s||_inf.
double sign_probe_norm(const MatrixXd& a) {
  double best = 0;
  const int n = static_cast<int>(a.cols());
  for (long mask = 0; mask < (1L << n); ++mask) {
    VectorXd s(n);
    for (int j = 0; j < n; ++j) s(j) = (mask >> j) & 1 ? 1.0 : -1.0;
    best = std::max(best, (a * s).cwiseAbs().maxCoeff());
  }
  return best;
}

Model relu_then_linear(double norm) {
  MatrixXd a = MatrixXd::Zero(2, 2);
  a(0, 0) = norm;
  return Model{Shape{2, 1, 1}, {Block{Relu{}}, Block{Linear{a, {}, {}}}}};
}

std::vector<VectorXd> random_inputs(int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<VectorXd> xs;
  for (int i = 0; i < count; ++i) {
    VectorXd x(n);
    for (int j = 0; j < n; ++j) x(j) = u(rng);
    xs.push_back(x);
  }
  return xs;
}

}  // namespace

TEST(Netmodel, InfinityNorm) {
  MatrixXd a(2, 2);
  a << 1, -2, 3, 4;
  EXPECT_DOUBLE_EQ(infinity_norm(a), 7.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int t = 0; t < 20; ++t) {
    MatrixXd m(5, 7);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 7; ++j) m(i, j) = u(rng);
    EXPECT_NEAR(infinity_norm(m), sign_probe_norm(m), 1e-12);
  }
}

TEST(Netmodel, BoundConstants) {
  Model relu_only{Shape{3, 1, 1}, {Block{Relu{}}}};
  EXPECT_DOUBLE_EQ(error_bound(relu_only, 10, 50).C, 50.0);
  EXPECT_DOUBLE_EQ(error_bound(relu_then_linear(3), 10, 50).C, 150.0);
  // Softmax halves the incoming error.
  Model rs{Shape{3, 1, 1}, {Block{Relu{}}, Block{Softmax{}}}};
  EXPECT_DOUBLE_EQ(error_bound(rs, 10, 50).C, 25.0);
  // Max-pool of a 2x2 window: 10 B ceil(log2 4).
  Model mp{Shape{1, 2, 2}, {Block{MaxPool{2, 2}}}};
  EXPECT_DOUBLE_EQ(error_bound(mp, 10, 50).C, 1000.0);
  EXPECT_THROW(error_bound(relu_only, 3, 50), std::invalid_argument);
}

TEST(Netmodel, ResidualBound) {
  MatrixXd a = MatrixXd::Identity(2, 2) * 2;
  MatrixXd p = MatrixXd::Identity(2, 2) * 0.5;
  Residual r{{Block{Relu{}}, Block{Linear{a, {}, {}}}}, p};
  Model m{Shape{2, 1, 1}, {Block{Relu{}}, Block{r}}};
  // e1 = 50u; residual: c = 2 * 50 = 100, L = 0.5 + 2.
  BoundTrace t = error_bound(m, 10, 50);
  EXPECT_DOUBLE_EQ(t.C, 100 + 2.5 * 50);
  ASSERT_EQ(t.per_block_error.size(), 2u);
}

TEST(Netmodel, SoftmaxIsContraction) {
  Model m{Shape{6, 1, 1}, {Block{Softmax{}}}};
  auto xs = random_inputs(6, 400, 9);
  for (size_t i = 0; i + 1 < xs.size(); i += 2) {
    VectorXd a = xs[i] * 5, b = xs[i + 1] * 5;
    const double lhs = (run_original(m, a) - run_original(m, b)).cwiseAbs().maxCoeff();
    EXPECT_LE(lhs, 0.5 * (a - b).cwiseAbs().maxCoeff() + 1e-15);
  }
}

TEST(Netmodel, FoldingPreservesOutputs) {
  MatrixXd lift = MatrixXd::Random(32, 6);
  Model m{Shape{6, 1, 1},
          {Block{Linear{lift, VectorXd::Random(32), Shape{2, 4, 4}}},
           Block{AvgPool{2, 2}},
           Block{BatchNormInf{VectorXd::Constant(2, 1.5), VectorXd::Constant(2, -0.25)}},
           Block{Relu{}}}};
  Model f = fold_linear(m);
  ASSERT_EQ(f.blocks.size(), 4u);
  EXPECT_TRUE(std::holds_alternative<Linear>(f.blocks[1].v));
  EXPECT_TRUE(std::holds_alternative<Linear>(f.blocks[2].v));
  EXPECT_EQ(validate(f), validate(m));
  for (const VectorXd& x : random_inputs(6, 50, 3)) {
    EXPECT_LE((run_original(m, x) - run_original(f, x)).cwiseAbs().maxCoeff(), 1e-13);
  }
  // Average of a 2x2 window has norm 1; BN scale 1.5.
  EXPECT_DOUBLE_EQ(infinity_norm(std::get<Linear>(f.blocks[1].v).A), 1.0);
  EXPECT_DOUBLE_EQ(infinity_norm(std::get<Linear>(f.blocks[2].v).A), 1.5);
}

TEST(Netmodel, MaxPoolForward) {
  Model m{Shape{1, 2, 4}, {Block{MaxPool{2, 2}}}};
  VectorXd x(8);
  x << 1, 5, 2, 0, 3, 4, -1, 7;
  VectorXd y = run_original(m, x);
  ASSERT_EQ(y.size(), 2);
  EXPECT_EQ(y(0), 5);
  EXPECT_EQ(y(1), 7);
  ApproxRun ar = run_approx(m, ApproxConfig{12, 50, 50}, x);
  EXPECT_NEAR(ar.y(0), 5, 1000 * std::ldexp(1.0, -12));
}

TEST(Netmodel, ShapeValidation) {
  Model bad{Shape{3, 1, 1}, {Block{Linear{MatrixXd::Ones(2, 4), {}, {}}}}};
  EXPECT_THROW(validate(bad), ShapeError);
  Model pool_too_big{Shape{1, 2, 2}, {Block{MaxPool{3, 1}}}};
  EXPECT_THROW(validate(pool_too_big), ShapeError);
  Model k11{Shape{1, 11, 11}, {Block{MaxPool{11, 11}}}};
  EXPECT_THROW(validate(k11), ShapeError);
  Residual nested{{Block{Residual{{Block{Relu{}}}, {}}}}, {}};
  Model nest{Shape{2, 1, 1}, {Block{nested}}};
  EXPECT_THROW(validate(nest), ShapeError);
  EXPECT_THROW(run_original(relu_then_linear(1), VectorXd::Zero(3)), ShapeError);
}

TEST(Netmodel, RangeHandling) {
  Model m{Shape{2, 1, 1}, {Block{Relu{}}}};
  VectorXd x(2);
  x << 50 * (1 + std::ldexp(1.0, -12)), -3;
  ApproxRun ar = run_approx(m, ApproxConfig{10, 50, 50}, x);
  ASSERT_EQ(ar.range_violations.size(), 1u);
  EXPECT_TRUE(ar.range_violations[0].clamped);
  EXPECT_EQ(ar.range_violations[0].coordinate, 0);
  x(0) = 60;
  try {
    run_approx(m, ApproxConfig{10, 50, 50}, x);
    FAIL() << "expected RangeError";
  } catch (const RangeError& e) {
    EXPECT_FALSE(e.violation().clamped);
    EXPECT_EQ(e.violation().op, "relu");
  }
}

TEST(Netmodel, RandomModelsWithinBound) {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    RandomModelOptions o;
    o.residual = seed % 2 == 0;
    Model m = random_model(seed, o);
    EXPECT_LE(m.blocks.size(), 8u);
    bool has_res = false;
    for (const Block& b : m.blocks) has_res = has_res || std::holds_alternative<Residual>(b.v);
    EXPECT_EQ(has_res, o.residual);
    auto xs = random_inputs(m.input_shape.size(), 30, seed);
    double prev = 1e300;
    for (int alpha : {7, 10, 13}) {
      CompareReport rep = empirical_compare(m, ApproxConfig{alpha, 50, 50}, xs);
      EXPECT_TRUE(rep.within_bound) << "seed " << seed << " alpha " << alpha;
      EXPECT_TRUE(rep.range_violations.empty());
      EXPECT_LE(rep.max_diff, prev);
      prev = rep.max_diff;
    }
  }
  EXPECT_EQ(dump_model(random_model(5)), dump_model(random_model(5)));
}

TEST(Netmodel, JsonRoundTrip) {
  RandomModelOptions o;
  o.residual = true;
  Model m = random_model(42, o);
  const std::string text = dump_model(m);
  Model back = parse_model(text);
  EXPECT_EQ(dump_model(back), text);
  for (const VectorXd& x : random_inputs(m.input_shape.size(), 10, 1)) {
    EXPECT_EQ(run_original(m, x), run_original(back, x));
  }
}

TEST(Netmodel, ParseErrors) {
  auto message = [](const std::string& text) {
    try {
      parse_model(text, "m.json");
    } catch (const ModelParseError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_EQ(message("{\n  \"version\": 1,\n  oops\n}").rfind("m.json:3:", 0), 0u);
  EXPECT_NE(message(R"({"version": 2, "input_shape": [1,1,1], "blocks": []})").find("/version"),
            std::string::npos);
  EXPECT_NE(message(R"({"version": 1, "input_shape": [2,1,1],
      "blocks": [{"type": "linear", "rows": 2, "cols": 2, "weights": [1, 2, 3]}]})")
                .find("/blocks/0/weights"),
            std::string::npos);
  EXPECT_NE(message(R"({"version": 1, "input_shape": [1,11,11],
      "blocks": [{"type": "maxpool", "kernel": 11}]})")
                .find("/blocks/0/kernel"),
            std::string::npos);
  EXPECT_NE(message(R"({"version": 1, "input_shape": [1,1,1], "blocks": [{"type": "conv"}]})")
                .find("unknown block type"),
            std::string::npos);
  EXPECT_NE(message(R"({"version": 1, "input_shape": [2,1,1], "blocks": [{"type": "residual",
      "inner": [{"type": "residual", "inner": [{"type": "relu"}]}]}]})")
                .find("nested"),
            std::string::npos);
  EXPECT_NE(message(R"({"version": 1, "input_shape": [3,1,1],
      "blocks": [{"type": "linear", "rows": 2, "cols": 2, "weights": [1, 0, 0, 1]}]})")
                .find("columns"),
            std::string::npos);
  EXPECT_THROW(load_model("/nonexistent/model.json"), ModelParseError);
}
