// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "compoly/bigreal.hpp"

namespace compoly {

enum class Basis { kChebyshev, kPower };
enum class Parity { kOdd, kEven, kNone };

const char* to_string(Basis b);
const char* to_string(Parity p);

/// The set [-b,-a] U [a,b].
struct SymmetricDomain {
  BigReal a;
  BigReal b;

  SymmetricDomain(BigReal a_, BigReal b_);
};

/// Univariate polynomial with an interval of validity.
///
/// In the Chebyshev basis coefficient k multiplies T_k(t) where t is the
/// affine image of x in [lo, hi] onto [-1, 1]. In the power basis coefficient
/// k multiplies x^k. A parity tag other than kNone requires the interval to be
/// symmetric about zero and the off-parity coefficients to be exactly zero.
class Poly {
 public:
  Poly(Basis basis, BigReal lo, BigReal hi, std::vector<BigReal> coeffs,
       Parity parity = Parity::kNone);

  Basis basis() const { return basis_; }
  Parity parity() const { return parity_; }
  const BigReal& lo() const { return lo_; }
  const BigReal& hi() const { return hi_; }
  const std::vector<BigReal>& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  BigReal eval(const BigReal& x) const;

 private:
  Basis basis_;
  BigReal lo_;
  BigReal hi_;
  std::vector<BigReal> coeffs_;
  Parity parity_;
};

/// Same polynomial with power-basis coefficients in x on the same interval.
Poly to_power_basis(const Poly& p);

/// Fixed-precision copy of a Poly for fast repeated evaluation.
template <class T>
class FastPoly {
 public:
  FastPoly() = default;
  explicit FastPoly(const Poly& p);

  T operator()(T x) const;
  int degree() const { return static_cast<int>(c_.size()) - 1; }

 private:
  Basis basis_ = Basis::kPower;
  Parity parity_ = Parity::kNone;
  T scale_ = 1;   // t = scale * x + shift
  T shift_ = 0;
  std::vector<T> c_;  // parity-compressed when parity != kNone
};

extern template class FastPoly<double>;
extern template class FastPoly<long double>;

/// Chebyshev series helpers shared by the Remez engine. `c` holds only the
/// parity-selected coefficients: for kOdd c[j] multiplies T_{2j+1}, for kEven
/// c[j] multiplies T_{2j}, for kNone c[j] multiplies T_j.
template <class T>
T chebyshev_series(const std::vector<T>& c, Parity parity, const T& t);

/// Expands a compressed coefficient list back to one entry per degree.
std::vector<BigReal> expand_parity(const std::vector<BigReal>& c, Parity parity);

}  // namespace compoly
