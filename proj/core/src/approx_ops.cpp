// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#include "compoly/approx_ops.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cfloat>
#include <cmath>
#include <random>
#include <sstream>
#include <utility>

namespace compoly {

namespace {

std::atomic<std::uint64_t> g_clamps{0};

template <class T>
T clamp_into(T x, T lo, T hi, T slack, const char* what) {
  if (std::isnan(x)) throw DomainError(std::string(what) + ": NaN input");
  if (x >= lo && x <= hi) return x;
  if (x >= lo - slack && x <= hi + slack) {
    if (g_clamps.fetch_add(1) == 0) {
      spdlog::warn("{}: input {} clamped into [{}, {}] (further clamps are only counted)", what,
                   static_cast<double>(x), static_cast<double>(lo), static_cast<double>(hi));
    }
    return std::clamp(x, lo, hi);
  }
  std::ostringstream msg;
  msg << what << ": input " << static_cast<double>(x) << " outside [" << static_cast<double>(lo)
      << ", " << static_cast<double>(hi) << "]";
  throw DomainError(msg.str());
}

template <class T>
T pow2(int e) {
  return std::ldexp(T(1), e);
}

template <class T>
T eval_composite(const SignComposite& c, T x) {
  return c(x);
}

}  // namespace

std::uint64_t clamp_count() { return g_clamps.load(); }
void reset_clamp_count() { g_clamps.store(0); }

int ceil_log2_int(long n) {
  if (n < 1) throw std::invalid_argument("ceil_log2 of a non-positive count");
  int k = 0;
  while ((1L << k) < n) ++k;
  return k;
}

// ---------------------------------------------------------------- ReLU

ReluApprox::ReluApprox(std::shared_ptr<const SignComposite> composite, int alpha, double B)
    : composite_(std::move(composite)), alpha_(alpha), B_(B) {
  if (!composite_) throw std::invalid_argument("ReluApprox needs a composite");
  if (!(B_ >= 1.0) || !std::isfinite(B_)) throw std::invalid_argument("ReluApprox needs B >= 1");
}

ReluApprox ReluApprox::for_alpha(int alpha, double B) {
  return ReluApprox(composite_for_alpha(alpha), alpha, B);
}

template <class T>
T ReluApprox::unit_impl(T x) const {
  x = clamp_into<T>(x, T(-1), T(1), pow2<T>(-alpha_), "relu_approx");
  return (x + x * eval_composite(*composite_, x)) / 2;
}

template <class T>
T ReluApprox::scaled_impl(T x) const {
  const T B = static_cast<T>(B_);
  x = clamp_into<T>(x, -B, B, B * pow2<T>(-alpha_), "relu_approx_scaled");
  T u = x / B;
  return B * ((u + u * eval_composite(*composite_, u)) / 2);
}

double ReluApprox::unit(double x) const { return unit_impl(x); }
long double ReluApprox::unit(long double x) const { return unit_impl(x); }
double ReluApprox::scaled(double x) const { return scaled_impl(x); }
long double ReluApprox::scaled(long double x) const { return scaled_impl(x); }

double relu_approx(const ReluApprox& ra, double x) { return ra.unit(x); }
double relu_approx_scaled(const ReluApprox& ra, double x) { return ra.scaled(x); }

// ---------------------------------------------------------------- max

MaxApprox::MaxApprox(std::shared_ptr<const SignComposite> composite, int alpha)
    : composite_(std::move(composite)), alpha_(alpha) {
  if (!composite_) throw std::invalid_argument("MaxApprox needs a composite");
}

MaxApprox MaxApprox::for_alpha(int alpha) { return MaxApprox(composite_for_alpha(alpha), alpha); }

template <class T>
T MaxApprox::impl(T a, T b) const {
  const T slack = pow2<T>(-alpha_);
  a = clamp_into<T>(a, T(0), T(1), slack, "max_approx");
  b = clamp_into<T>(b, T(0), T(1), slack, "max_approx");
  T d = a - b;
  return ((a + b) + d * eval_composite(*composite_, d)) / 2;
}

double MaxApprox::operator()(double a, double b) const { return impl(a, b); }
long double MaxApprox::operator()(long double a, long double b) const { return impl(a, b); }

double max_approx(const MaxApprox& ma, double a, double b) { return ma(a, b); }

bool MaxTrace::all_in_range() const {
  return std::all_of(nodes.begin(), nodes.end(), [](const MaxNode& n) { return n.in_range; });
}

namespace {

template <class T, class Node>
T pool_rec(std::span<const T> xs, const Node& node, int alpha, MaxTrace* trace) {
  if (xs.size() == 1) return xs[0];
  const size_t k = xs.size() / 2;
  T left = pool_rec<T>(xs.subspan(0, k), node, alpha, trace);
  T right = pool_rec<T>(xs.subspan(k), node, alpha, trace);
  T v = node(left, right);
  if (trace) {
    auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    const int L = ceil_log2_int(static_cast<long>(xs.size()));
    const long double pad = static_cast<long double>(L) * std::ldexp(1.0L, -alpha);
    const long double tol = 8 * LDBL_EPSILON;
    const long double vl = static_cast<long double>(v);
    trace->nodes.push_back(MaxNode{static_cast<int>(xs.size()), static_cast<long double>(*lo),
                                   static_cast<long double>(*hi), vl,
                                   vl >= *lo - pad - tol && vl <= *hi + pad + tol});
  }
  return v;
}

template <class T>
T unit_pool(const MaxApprox& ma, std::span<const T> xs, MaxTrace* trace) {
  if (xs.empty()) throw std::invalid_argument("max-pool of zero inputs");
  const int L = ceil_log2_int(static_cast<long>(xs.size()));
  const T margin = static_cast<T>(L - 1) * pow2<T>(-ma.alpha());
  std::vector<T> in(xs.begin(), xs.end());
  for (T& x : in) x = clamp_into<T>(x, margin, T(1) - margin, pow2<T>(-ma.alpha()), "maxpool_approx");
  const SignComposite& c = ma.composite();
  auto node = [&c](T a, T b) {
    T d = a - b;
    return ((a + b) + d * eval_composite(c, d)) / 2;
  };
  return pool_rec<T>(std::span<const T>(in), node, ma.alpha(), trace);
}

}  // namespace

double maxpool_approx(const MaxApprox& ma, std::span<const double> xs, MaxTrace* trace) {
  return unit_pool(ma, xs, trace);
}

long double maxpool_approx(const MaxApprox& ma, std::span<const long double> xs,
                           MaxTrace* trace) {
  return unit_pool(ma, xs, trace);
}

MaxPoolApprox::MaxPoolApprox(std::shared_ptr<const SignComposite> composite, int alpha, int n,
                             double B)
    : composite_(std::move(composite)), alpha_(alpha), n_(n), B_(B) {
  if (!composite_) throw std::invalid_argument("MaxPoolApprox needs a composite");
  if (n_ < 1) throw std::invalid_argument("MaxPoolApprox needs n >= 1");
  if (!(B_ > 0) || !std::isfinite(B_)) throw std::invalid_argument("MaxPoolApprox needs B > 0");
  const int L = ceil_log2_int(n_);
  const double denom = 0.5 - (L - 1) * std::ldexp(1.0, -alpha_);
  if (!(denom > 0)) throw std::invalid_argument("MaxPoolApprox: alpha too small for this n");
  B_prime_ = B_ / denom;
}

MaxPoolApprox MaxPoolApprox::for_alpha(int alpha, int n, double B) {
  return MaxPoolApprox(composite_for_alpha(alpha), alpha, n, B);
}

template <class T>
T MaxPoolApprox::impl(std::span<const T> xs) const {
  if (static_cast<int>(xs.size()) != n_) {
    throw std::invalid_argument("MaxPoolApprox built for n=" + std::to_string(n_) + " got " +
                                std::to_string(xs.size()) + " inputs");
  }
  const T B = static_cast<T>(B_);
  std::vector<T> in(xs.begin(), xs.end());
  for (T& x : in) x = clamp_into<T>(x, -B, B, B * pow2<T>(-alpha_), "maxpool_approx_scaled");
  // Per node this equals the shifted form B'(m(a/B' + 1/2, b/B' + 1/2) - 1/2)
  // without the shift round trip.
  const T bp = static_cast<T>(B_prime_);
  const SignComposite& c = *composite_;
  auto node = [&c, bp](T a, T b) {
    T h = (a - b) / 2;
    return (a + b) / 2 + h * eval_composite(c, (a - b) / bp);
  };
  return pool_rec<T>(std::span<const T>(in), node, alpha_, nullptr);
}

double MaxPoolApprox::operator()(std::span<const double> xs) const { return impl(xs); }
long double MaxPoolApprox::operator()(std::span<const long double> xs) const {
  return impl(xs);
}

double maxpool_approx_scaled(const MaxPoolApprox& mp, std::span<const double> xs) {
  return mp(xs);
}

// ---------------------------------------------------------------- verify

const char* to_string(OpKind k) {
  switch (k) {
    case OpKind::kRelu: return "relu";
    case OpKind::kReluScaled: return "relu_scaled";
    case OpKind::kMax: return "max";
    case OpKind::kMaxPool: return "maxpool";
    case OpKind::kMaxPoolScaled: return "maxpool_scaled";
  }
  return "?";
}

namespace {

void record(VerifyReport& rep, long double err, std::vector<long double> input) {
  ++rep.evaluations;
  if (err > rep.bound) ++rep.violations;
  if (err > rep.max_error || rep.worst_input.empty()) {
    rep.max_error = err;
    rep.worst_input = std::move(input);
  }
}

}  // namespace

VerifyReport verify_bound(OpKind op, int alpha, const SamplePlan& plan) {
  VerifyReport rep;
  rep.op = op;
  rep.alpha = alpha;
  const long double unit = std::ldexp(1.0L, -alpha);
  std::mt19937_64 rng(plan.seed);
  std::uniform_real_distribution<long double> u01(0.0L, 1.0L);
  auto composite = composite_for_alpha(alpha);
  const long double eps = composite->epsilon().to_long_double();

  if (op == OpKind::kRelu || op == OpKind::kReluScaled) {
    const bool scaled = op == OpKind::kReluScaled;
    ReluApprox ra(composite, alpha, scaled ? plan.B : 1.0);
    const long double B = scaled ? plan.B : 1.0L;
    rep.bound = B * unit;
    auto probe = [&](long double x) {
      long double y = scaled ? ra.scaled(x) : ra.unit(x);
      record(rep, std::fabs(y - std::max(x, 0.0L)), {x});
    };
    const size_t n = std::max<size_t>(plan.grid_points, 2);
    for (size_t i = 0; i < n; ++i) probe(-B + 2 * B * static_cast<long double>(i) / (n - 1));
    // Dense scan of the sign transition region |x| <= 2 eps B.
    for (size_t i = 0; i < plan.adversarial_samples; ++i) {
      long double t = static_cast<long double>(i) / std::max<size_t>(plan.adversarial_samples - 1, 1);
      probe(2 * eps * B * t);
      probe(-2 * eps * B * t);
    }
    return rep;
  }

  if (op == OpKind::kMax) {
    MaxApprox ma(composite, alpha);
    rep.bound = unit;
    auto probe = [&](long double a, long double b) {
      record(rep, std::fabs(ma(a, b) - std::max(a, b)), {a, b});
    };
    for (size_t i = 0; i < plan.random_samples; ++i) probe(u01(rng), u01(rng));
    for (size_t i = 0; i < plan.adversarial_samples; ++i) {
      long double a = u01(rng);
      long double b = std::clamp(a + (2 * u01(rng) - 1) * 2 * eps, 0.0L, 1.0L);
      probe(a, b);
    }
    return rep;
  }

  const int n = plan.n;
  const int L = ceil_log2_int(n);
  if (op == OpKind::kMaxPool) {
    MaxApprox ma(composite, alpha);
    rep.bound = L * unit;
    const long double lo = (L - 1) * unit, hi = 1 - (L - 1) * unit;
    auto probe = [&](std::vector<long double> xs) {
      MaxTrace tr;
      long double v = maxpool_approx(ma, std::span<const long double>(xs), &tr);
      rep.range_stable = rep.range_stable && tr.all_in_range();
      long double m = *std::max_element(xs.begin(), xs.end());
      record(rep, std::fabs(v - m), std::move(xs));
    };
    for (size_t i = 0; i < plan.random_samples; ++i) {
      std::vector<long double> xs(static_cast<size_t>(n));
      for (long double& x : xs) x = lo + (hi - lo) * u01(rng);
      probe(std::move(xs));
    }
    for (size_t i = 0; i < plan.adversarial_samples; ++i) {
      std::vector<long double> xs(static_cast<size_t>(n));
      long double c = lo + (hi - lo) * u01(rng);
      for (long double& x : xs) x = std::clamp(c + (2 * u01(rng) - 1) * 2 * eps, lo, hi);
      probe(std::move(xs));
    }
    return rep;
  }

  MaxPoolApprox mp(composite, alpha, n, plan.B);
  const long double B = plan.B;
  rep.bound = static_cast<long double>(mp.B_prime()) * unit * L;
  auto probe = [&](std::vector<long double> xs) {
    long double v = mp(std::span<const long double>(xs));
    long double m = *std::max_element(xs.begin(), xs.end());
    record(rep, std::fabs(v - m), std::move(xs));
  };
  for (size_t i = 0; i < plan.random_samples; ++i) {
    std::vector<long double> xs(static_cast<size_t>(n));
    for (long double& x : xs) x = -B + 2 * B * u01(rng);
    probe(std::move(xs));
  }
  for (size_t i = 0; i < plan.adversarial_samples; ++i) {
    std::vector<long double> xs(static_cast<size_t>(n));
    long double c = -B + 2 * B * u01(rng);
    const long double w = 2 * eps * static_cast<long double>(mp.B_prime());
    for (long double& x : xs) x = std::clamp(c + (2 * u01(rng) - 1) * w, -B, B);
    probe(std::move(xs));
  }
  return rep;
}

}  // namespace compoly
