// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <utility>
#include <vector>

#include "compoly/composite.hpp"
#include "compoly/poly.hpp"

namespace compoly {

/// Baby-step giant-step schedule for one polynomial.
///
/// Baby steps are the powers x^2..x^k (general) or x^2, x^4, ..., x^k and the
/// odd powers x^3..x^{k-1} (odd, k a power of two). Giant steps are the
/// squarings x^{2k}, ..., x^{k 2^J}. The polynomial is split recursively as
/// q(x) x^G + r(x) with G a giant power; `splits` records the chosen G for
/// each (degree, depth budget) node, 0 meaning a leaf evaluated from baby
/// powers with scalar multiplications only.
struct EvalPlan {
  int degree = 0;
  Parity parity = Parity::kNone;
  int baby_steps = 0;   // k
  int giant_steps = 0;  // J
  int nonscalar_mults = 0;
  /// ceil(log2(degree + 1)): the depth budget the schedule is built under.
  int depth = 0;
  /// Longest chain of non-scalar products actually used by the schedule.
  int circuit_depth = 0;
  std::map<std::pair<int, int>, int> splits;
};

struct CompositeCost {
  std::vector<EvalPlan> per_stage;
  int total_mults = 0;
  int total_depth = 0;
};

/// Multiplication-minimal schedule among depth-optimal ones. `parity` must be
/// kOdd (odd polynomial) or kNone.
EvalPlan plan_bsgs(int degree, Parity parity);

/// Odd plans per stage plus the final product with x (or a - b).
CompositeCost composite_cost(const std::vector<int>& degrees);
CompositeCost composite_cost(const ApproxSpec& spec);

struct EvalStats {
  int nonscalar_mults = 0;
  int depth = 0;
};

/// Executes `plan` on p (converted to the power basis) with instrumented
/// counting. Throws std::invalid_argument when the plan does not match p.
double eval_bsgs(const Poly& p, double x, const EvalPlan& plan, EvalStats* stats = nullptr);
BigReal eval_bsgs(const Poly& p, const BigReal& x, const EvalPlan& plan,
                  EvalStats* stats = nullptr);

/// Same on explicit power-basis coefficients (index k multiplies x^k).
double eval_bsgs(const std::vector<double>& power_coeffs, double x, const EvalPlan& plan,
                 EvalStats* stats = nullptr);
BigReal eval_bsgs(const std::vector<BigReal>& power_coeffs, const BigReal& x,
                  const EvalPlan& plan, EvalStats* stats = nullptr);

}  // namespace compoly
