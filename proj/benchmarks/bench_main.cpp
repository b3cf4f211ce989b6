// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "compoly/approx_ops.hpp"
#include "compoly/composite.hpp"
#include "compoly/netmodel.hpp"
#include "compoly/polyeval.hpp"
#include "compoly/remez.hpp"

using namespace compoly;

static void BM_RemezRelu(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  for (auto _ : st) {
    RemezResult r = remez_general(Target::kRelu, BigReal(-1), BigReal(1), d);
    benchmark::DoNotOptimize(r.minimax_error);
  }
}
BENCHMARK(BM_RemezRelu)->Arg(10)->Arg(40)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_RemezSign(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  SymmetricDomain dom(BigReal(0.01), BigReal(1));
  for (auto _ : st) {
    RemezResult r = remez_sign_odd(dom, d);
    benchmark::DoNotOptimize(r.minimax_error);
  }
}
BENCHMARK(BM_RemezSign)->Arg(7)->Arg(15)->Arg(29)->Unit(benchmark::kMillisecond);

static void BM_BuildComposite(benchmark::State& st) {
  ApproxSpec s = tabulated_spec(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    SignComposite c = build_sign_composite(s.epsilon(), s.degrees);
    benchmark::DoNotOptimize(c.beta());
  }
}
BENCHMARK(BM_BuildComposite)->Arg(7)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);

static void BM_PlanBsgs(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(plan_bsgs(d, Parity::kNone).nonscalar_mults);
}
BENCHMARK(BM_PlanBsgs)->Arg(31)->Arg(150)->Arg(1151);

static void BM_EvalBsgsDouble(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  std::vector<double> c(static_cast<size_t>(d) + 1, 0.5);
  EvalPlan plan = plan_bsgs(d, Parity::kNone);
  double x = 0.3;
  for (auto _ : st) benchmark::DoNotOptimize(eval_bsgs(c, x, plan));
}
BENCHMARK(BM_EvalBsgsDouble)->Arg(27)->Arg(150);

static void BM_ReluApprox(benchmark::State& st) {
  ReluApprox ra = ReluApprox::for_alpha(static_cast<int>(st.range(0)));
  double x = -0.7;
  for (auto _ : st) {
    benchmark::DoNotOptimize(ra.unit(x));
    x = x > 0.9 ? -0.9 : x + 1e-3;
  }
}
BENCHMARK(BM_ReluApprox)->Arg(7)->Arg(14);

static void BM_MaxPool9(benchmark::State& st) {
  MaxPoolApprox mp = MaxPoolApprox::for_alpha(10, 9, 50.0);
  std::vector<double> xs{1, -3, 4, 0.5, 9, -2, 6, 7, 8.5};
  for (auto _ : st) benchmark::DoNotOptimize(mp(xs));
}
BENCHMARK(BM_MaxPool9);

static void BM_NetApprox(benchmark::State& st) {
  RandomModelOptions o;
  o.residual = true;
  Model m = random_model(7, o);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(m.input_shape.size(), 0.25);
  ApproxConfig cfg{10, 50, 50};
  for (auto _ : st) benchmark::DoNotOptimize(run_approx(m, cfg, x).y);
}
BENCHMARK(BM_NetApprox);

BENCHMARK_MAIN();
