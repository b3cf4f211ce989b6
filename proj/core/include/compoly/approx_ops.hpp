// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "compoly/composite.hpp"

namespace compoly {

/// Input outside an operator's domain by more than the clamp slack.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Number of inputs clamped back into an operator domain so far, process-wide.
/// The first clamp is logged as a warning.
std::uint64_t clamp_count();
void reset_clamp_count();

/// r(x) = (x + x p(x)) / 2 and its range-scaled form B r(x / B).
class ReluApprox {
 public:
  ReluApprox(std::shared_ptr<const SignComposite> composite, int alpha, double B = 1.0);
  static ReluApprox for_alpha(int alpha, double B = 1.0);

  int alpha() const { return alpha_; }
  double B() const { return B_; }
  const SignComposite& composite() const { return *composite_; }

  /// |x| <= 1.
  double unit(double x) const;
  long double unit(long double x) const;
  /// |x| <= B.
  double scaled(double x) const;
  long double scaled(long double x) const;

 private:
  template <class T> T unit_impl(T x) const;
  template <class T> T scaled_impl(T x) const;

  std::shared_ptr<const SignComposite> composite_;
  int alpha_;
  double B_;
};

double relu_approx(const ReluApprox& ra, double x);
double relu_approx_scaled(const ReluApprox& ra, double x);

/// m(a, b) = ((a + b) + (a - b) p(a - b)) / 2 on [0, 1]^2.
class MaxApprox {
 public:
  MaxApprox(std::shared_ptr<const SignComposite> composite, int alpha);
  static MaxApprox for_alpha(int alpha);

  int alpha() const { return alpha_; }
  const SignComposite& composite() const { return *composite_; }
  std::shared_ptr<const SignComposite> composite_ptr() const { return composite_; }

  double operator()(double a, double b) const;
  long double operator()(long double a, long double b) const;

 private:
  template <class T> T impl(T a, T b) const;

  std::shared_ptr<const SignComposite> composite_;
  int alpha_;
};

double max_approx(const MaxApprox& ma, double a, double b);

/// One node of the pairwise max recursion.
struct MaxNode {
  int count;         // inputs below this node
  long double lo;    // min of those inputs
  long double hi;    // max of those inputs
  long double value; // node output
  bool in_range;     // value within [lo - L 2^-alpha, hi + L 2^-alpha], L = ceil(log2 count)
};

struct MaxTrace {
  std::vector<MaxNode> nodes;
  bool all_in_range() const;
};

/// ceil(log2 n) for n >= 1.
int ceil_log2_int(long n);

/// Pairwise recursion: n = 2k splits into (first k, last k), n = 2k + 1 into
/// (first k, last k + 1). Inputs must lie in [(L-1) 2^-alpha, 1 - (L-1) 2^-alpha]
/// with L = ceil(log2 n).
double maxpool_approx(const MaxApprox& ma, std::span<const double> xs, MaxTrace* trace = nullptr);
long double maxpool_approx(const MaxApprox& ma, std::span<const long double> xs,
                           MaxTrace* trace = nullptr);

/// Range-scaled max of n inputs in [-B, B]:
/// B' (M(x_1 / B' + 0.5, ..., x_n / B' + 0.5) - 0.5), B' = B / (0.5 - (L-1) 2^-alpha).
class MaxPoolApprox {
 public:
  MaxPoolApprox(std::shared_ptr<const SignComposite> composite, int alpha, int n, double B);
  static MaxPoolApprox for_alpha(int alpha, int n, double B);

  int alpha() const { return alpha_; }
  int n() const { return n_; }
  double B() const { return B_; }
  double B_prime() const { return B_prime_; }

  double operator()(std::span<const double> xs) const;
  long double operator()(std::span<const long double> xs) const;

 private:
  template <class T> T impl(std::span<const T> xs) const;

  std::shared_ptr<const SignComposite> composite_;
  int alpha_;
  int n_;
  double B_;
  double B_prime_;
};

double maxpool_approx_scaled(const MaxPoolApprox& mp, std::span<const double> xs);

enum class OpKind { kRelu, kReluScaled, kMax, kMaxPool, kMaxPoolScaled };

const char* to_string(OpKind k);

struct SamplePlan {
  std::size_t grid_points = 1000000;  // deterministic grid (ReLU forms)
  std::size_t random_samples = 10000; // random draws (max forms)
  std::size_t adversarial_samples = 10000;
  std::uint64_t seed = 1;
  double B = 1.0;
  int n = 2;
};

struct VerifyReport {
  OpKind op = OpKind::kRelu;
  int alpha = 0;
  long double bound = 0;
  long double max_error = 0;
  std::vector<long double> worst_input;
  std::size_t evaluations = 0;
  std::size_t violations = 0;
  bool range_stable = true;  // max forms: every recursion node stayed in range
  bool ok() const { return violations == 0 && range_stable; }
};

/// Empirical maximum error of an operator against its stated bound.
VerifyReport verify_bound(OpKind op, int alpha, const SamplePlan& plan);

}  // namespace compoly
