// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <mpfr.h>

#include <compare>
#include <string>
#include <string_view>

namespace compoly {

inline constexpr unsigned kDefaultPrecisionBits = 300;
inline constexpr unsigned kMinPrecisionBits = 128;

/// Arbitrary-precision binary floating point value backed by MPFR.
///
/// Every value carries its own mantissa width. Newly created values and the
/// results of arithmetic take the precision of the active PrecisionGuard on
/// the calling thread (kDefaultPrecisionBits when none is active), so a whole
/// computation runs at one precision by opening a single guard.
class BigReal {
 public:
  BigReal();
  BigReal(double v);  // NOLINT(google-explicit-constructor)
  BigReal(int v);     // NOLINT(google-explicit-constructor)
  BigReal(long v);    // NOLINT(google-explicit-constructor)
  /// Parses a decimal (or MPFR-accepted) literal; throws std::invalid_argument.
  explicit BigReal(std::string_view text);

  BigReal(const BigReal& other);
  BigReal(BigReal&& other) noexcept;
  BigReal& operator=(const BigReal& other);
  BigReal& operator=(BigReal&& other) noexcept;
  BigReal& operator=(double v);
  ~BigReal();

  /// Mantissa bits used for new values on this thread.
  static unsigned context_precision();

  unsigned precision() const;
  double to_double() const;
  long double to_long_double() const;
  /// Scientific notation with `digits` significant decimal digits.
  std::string to_string(int digits) const;
  /// Significant decimal digits that round-trip this value's precision.
  int round_trip_digits() const;

  bool is_finite() const;
  bool is_zero() const;
  int sign() const;

  BigReal& operator+=(const BigReal& o);
  BigReal& operator-=(const BigReal& o);
  BigReal& operator*=(const BigReal& o);
  BigReal& operator/=(const BigReal& o);
  BigReal& operator+=(double o);
  BigReal& operator-=(double o);
  BigReal& operator*=(double o);
  BigReal& operator/=(double o);
  BigReal operator-() const;

  friend BigReal operator+(BigReal a, const BigReal& b) { a += b; return a; }
  friend BigReal operator-(BigReal a, const BigReal& b) { a -= b; return a; }
  friend BigReal operator*(BigReal a, const BigReal& b) { a *= b; return a; }
  friend BigReal operator/(BigReal a, const BigReal& b) { a /= b; return a; }
  friend BigReal operator+(BigReal a, double b) { a += b; return a; }
  friend BigReal operator-(BigReal a, double b) { a -= b; return a; }
  friend BigReal operator*(BigReal a, double b) { a *= b; return a; }
  friend BigReal operator/(BigReal a, double b) { a /= b; return a; }
  friend BigReal operator+(double a, BigReal b) { b += a; return b; }
  friend BigReal operator*(double a, BigReal b) { b *= a; return b; }
  friend BigReal operator-(double a, const BigReal& b);
  friend BigReal operator/(double a, const BigReal& b);

  friend bool operator==(const BigReal& a, const BigReal& b);
  friend std::partial_ordering operator<=>(const BigReal& a, const BigReal& b);
  friend bool operator==(const BigReal& a, double b);
  friend std::partial_ordering operator<=>(const BigReal& a, double b);

  /// this = a * b + this, single rounding.
  void fma_accumulate(const BigReal& a, const BigReal& b);

  mpfr_ptr raw() { return value_; }
  mpfr_srcptr raw() const { return value_; }

 private:
  void ensure_live(mpfr_prec_t prec);

  mpfr_t value_;
  bool live_ = false;
};

BigReal abs(const BigReal& x);
BigReal sqrt(const BigReal& x);
BigReal log2(const BigReal& x);
BigReal exp2(const BigReal& x);
BigReal cos(const BigReal& x);
BigReal pow(const BigReal& x, long n);
/// x * 2^e, exact.
BigReal ldexp(const BigReal& x, long e);
BigReal pi();
const BigReal& min(const BigReal& a, const BigReal& b);
/// Copy of x rounded to the current context precision.
BigReal at_context_precision(const BigReal& x);
const BigReal& max(const BigReal& a, const BigReal& b);

/// Scoped override of the precision used for new BigReal values on the
/// current thread. Guards nest; the destructor restores the previous value.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(unsigned bits);
  ~PrecisionGuard();
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned previous_;
};

/// Throws std::domain_error naming `what` when x is NaN or infinite.
void require_finite(const BigReal& x, std::string_view what);

}  // namespace compoly
