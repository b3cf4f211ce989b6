// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

// Test-side reference computations. Nothing here calls the code under test
// except for plain data accessors.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "compoly/bigreal.hpp"

namespace oracle {

/// Horner in the power basis.
template <class T>
T horner(const std::vector<T>& c, const T& x) {
  T acc = c.empty() ? T(0) : c.back();
  for (size_t i = c.size(); i-- > 1;) acc = acc * x + c[i - 1];
  return acc;
}

/// T_k(t) by the three-term recurrence.
inline compoly::BigReal chebyshev_t(int k, const compoly::BigReal& t) {
  compoly::BigReal a(1), b = t;
  if (k == 0) return a;
  for (int i = 1; i < k; ++i) {
    compoly::BigReal c = 2 * t * b - a;
    a = b;
    b = c;
  }
  return b;
}

/// n points log-spaced on [lo, hi], both ends included.
inline std::vector<long double> log_spaced(long double lo, long double hi, size_t n) {
  std::vector<long double> x(n);
  const long double l0 = std::log(lo), l1 = std::log(hi);
  for (size_t i = 0; i < n; ++i) {
    x[i] = std::exp(l0 + (l1 - l0) * static_cast<long double>(i) / static_cast<long double>(n - 1));
  }
  x.front() = lo;
  x.back() = hi;
  return x;
}

inline std::vector<long double> uniform_grid(long double lo, long double hi, size_t n) {
  std::vector<long double> x(n);
  for (size_t i = 0; i < n; ++i) {
    x[i] = lo + (hi - lo) * static_cast<long double>(i) / static_cast<long double>(n - 1);
  }
  return x;
}

inline int ceil_log2(long n) {
  int k = 0;
  while ((1L << k) < n) ++k;
  return k;
}

/// Power-basis coefficients of p(s x + o) given those of p.
inline std::vector<compoly::BigReal> affine_substitute(const std::vector<compoly::BigReal>& c,
                                                       const compoly::BigReal& s,
                                                       const compoly::BigReal& o) {
  using compoly::BigReal;
  std::vector<BigReal> out(c.size(), BigReal(0));
  std::vector<BigReal> pw{BigReal(1)};  // (s x + o)^k
  for (size_t k = 0; k < c.size(); ++k) {
    for (size_t i = 0; i < pw.size(); ++i) out[i] += c[k] * pw[i];
    std::vector<BigReal> next(pw.size() + 1, BigReal(0));
    for (size_t i = 0; i < pw.size(); ++i) {
      next[i] += pw[i] * o;
      next[i + 1] += pw[i] * s;
    }
    pw = std::move(next);
  }
  return out;
}

}  // namespace oracle
