// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#include "compoly/bigreal.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace compoly {
namespace {

thread_local unsigned g_context_bits = kDefaultPrecisionBits;

mpfr_prec_t ctx() { return static_cast<mpfr_prec_t>(g_context_bits); }

}  // namespace

BigReal::BigReal() {
  mpfr_init2(value_, ctx());
  mpfr_set_zero(value_, 1);
  live_ = true;
}

BigReal::BigReal(double v) {
  mpfr_init2(value_, ctx());
  mpfr_set_d(value_, v, MPFR_RNDN);
  live_ = true;
}

BigReal::BigReal(int v) : BigReal(static_cast<long>(v)) {}

BigReal::BigReal(long v) {
  mpfr_init2(value_, ctx());
  mpfr_set_si(value_, v, MPFR_RNDN);
  live_ = true;
}

BigReal::BigReal(std::string_view text) {
  mpfr_init2(value_, ctx());
  live_ = true;
  std::string owned(text);
  char* end = nullptr;
  if (owned.empty()) throw std::invalid_argument("BigReal: empty literal");
  mpfr_strtofr(value_, owned.c_str(), &end, 10, MPFR_RNDN);
  if (end == owned.c_str() || (end != nullptr && *end != '\0')) {
    throw std::invalid_argument("BigReal: malformed literal '" + owned + "'");
  }
}

BigReal::BigReal(const BigReal& other) {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_set(value_, other.value_, MPFR_RNDN);
  live_ = true;
}

BigReal::BigReal(BigReal&& other) noexcept {
  std::memcpy(value_, other.value_, sizeof(mpfr_t));
  live_ = other.live_;
  other.live_ = false;
}

BigReal& BigReal::operator=(const BigReal& other) {
  if (this == &other) return *this;
  ensure_live(mpfr_get_prec(other.value_));
  if (mpfr_get_prec(value_) != mpfr_get_prec(other.value_)) {
    mpfr_set_prec(value_, mpfr_get_prec(other.value_));
  }
  mpfr_set(value_, other.value_, MPFR_RNDN);
  return *this;
}

BigReal& BigReal::operator=(BigReal&& other) noexcept {
  if (this == &other) return *this;
  if (live_) mpfr_clear(value_);
  std::memcpy(value_, other.value_, sizeof(mpfr_t));
  live_ = other.live_;
  other.live_ = false;
  return *this;
}

BigReal& BigReal::operator=(double v) {
  ensure_live(ctx());
  mpfr_set_d(value_, v, MPFR_RNDN);
  return *this;
}

BigReal::~BigReal() {
  if (live_) mpfr_clear(value_);
}

void BigReal::ensure_live(mpfr_prec_t prec) {
  if (!live_) {
    mpfr_init2(value_, prec);
    live_ = true;
  }
}

unsigned BigReal::context_precision() { return g_context_bits; }

unsigned BigReal::precision() const {
  return static_cast<unsigned>(mpfr_get_prec(value_));
}

double BigReal::to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }

long double BigReal::to_long_double() const {
  return mpfr_get_ld(value_, MPFR_RNDN);
}

int BigReal::round_trip_digits() const {
  // ceil(bits * log10(2)) + 1 guarantees a decimal round trip.
  return static_cast<int>(std::ceil(precision() * 0.30102999566398120)) + 1;
}

std::string BigReal::to_string(int digits) const {
  if (mpfr_zero_p(value_)) return "0";
  if (digits < 2) digits = 2;
  std::vector<char> buf(static_cast<size_t>(digits) + 32);
  int n = mpfr_snprintf(buf.data(), buf.size(), "%.*Re", digits - 1, value_);
  if (n < 0) throw std::runtime_error("BigReal: formatting failed");
  if (static_cast<size_t>(n) >= buf.size()) {
    buf.resize(static_cast<size_t>(n) + 1);
    mpfr_snprintf(buf.data(), buf.size(), "%.*Re", digits - 1, value_);
  }
  return std::string(buf.data());
}

bool BigReal::is_finite() const { return mpfr_number_p(value_) != 0; }
bool BigReal::is_zero() const { return mpfr_zero_p(value_) != 0; }
int BigReal::sign() const { return mpfr_sgn(value_); }

// Compound assignment keeps the left operand's storage but re-rounds the
// result to the context precision so mixed-precision operands never leak.
#define COMPOLY_COMPOUND(op, fn)                                \
  BigReal& BigReal::operator op(const BigReal& o) {             \
    if (mpfr_get_prec(value_) != ctx()) mpfr_prec_round(value_, ctx(), MPFR_RNDN); \
    fn(value_, value_, o.value_, MPFR_RNDN);                    \
    return *this;                                               \
  }
COMPOLY_COMPOUND(+=, mpfr_add)
COMPOLY_COMPOUND(-=, mpfr_sub)
COMPOLY_COMPOUND(*=, mpfr_mul)
COMPOLY_COMPOUND(/=, mpfr_div)
#undef COMPOLY_COMPOUND

#define COMPOLY_COMPOUND_D(op, fn)                              \
  BigReal& BigReal::operator op(double o) {                     \
    if (mpfr_get_prec(value_) != ctx()) mpfr_prec_round(value_, ctx(), MPFR_RNDN); \
    fn(value_, value_, o, MPFR_RNDN);                           \
    return *this;                                               \
  }
COMPOLY_COMPOUND_D(+=, mpfr_add_d)
COMPOLY_COMPOUND_D(-=, mpfr_sub_d)
COMPOLY_COMPOUND_D(*=, mpfr_mul_d)
COMPOLY_COMPOUND_D(/=, mpfr_div_d)
#undef COMPOLY_COMPOUND_D

BigReal BigReal::operator-() const {
  BigReal r;
  mpfr_neg(r.value_, value_, MPFR_RNDN);
  return r;
}

BigReal operator-(double a, const BigReal& b) {
  BigReal r;
  mpfr_d_sub(r.value_, a, b.value_, MPFR_RNDN);
  return r;
}

BigReal operator/(double a, const BigReal& b) {
  BigReal r;
  mpfr_d_div(r.value_, a, b.value_, MPFR_RNDN);
  return r;
}

bool operator==(const BigReal& a, const BigReal& b) {
  return mpfr_equal_p(a.value_, b.value_) != 0;
}

std::partial_ordering operator<=>(const BigReal& a, const BigReal& b) {
  if (mpfr_unordered_p(a.value_, b.value_)) return std::partial_ordering::unordered;
  int c = mpfr_cmp(a.value_, b.value_);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

bool operator==(const BigReal& a, double b) {
  return !mpfr_nan_p(a.value_) && !std::isnan(b) && mpfr_cmp_d(a.value_, b) == 0;
}

std::partial_ordering operator<=>(const BigReal& a, double b) {
  if (mpfr_nan_p(a.value_) || std::isnan(b)) return std::partial_ordering::unordered;
  int c = mpfr_cmp_d(a.value_, b);
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

void BigReal::fma_accumulate(const BigReal& a, const BigReal& b) {
  if (mpfr_get_prec(value_) != ctx()) mpfr_prec_round(value_, ctx(), MPFR_RNDN);
  mpfr_fma(value_, a.value_, b.value_, value_, MPFR_RNDN);
}

BigReal abs(const BigReal& x) {
  BigReal r;
  mpfr_abs(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

BigReal sqrt(const BigReal& x) {
  BigReal r;
  mpfr_sqrt(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

BigReal log2(const BigReal& x) {
  BigReal r;
  mpfr_log2(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

BigReal exp2(const BigReal& x) {
  BigReal r;
  mpfr_exp2(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

BigReal cos(const BigReal& x) {
  BigReal r;
  mpfr_cos(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

BigReal pow(const BigReal& x, long n) {
  BigReal r;
  mpfr_pow_si(r.raw(), x.raw(), n, MPFR_RNDN);
  return r;
}

BigReal ldexp(const BigReal& x, long e) {
  BigReal r;
  mpfr_mul_2si(r.raw(), x.raw(), e, MPFR_RNDN);
  return r;
}

BigReal pi() {
  BigReal r;
  mpfr_const_pi(r.raw(), MPFR_RNDN);
  return r;
}

BigReal at_context_precision(const BigReal& x) {
  BigReal r;
  mpfr_set(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

const BigReal& min(const BigReal& a, const BigReal& b) { return b < a ? b : a; }
const BigReal& max(const BigReal& a, const BigReal& b) { return a < b ? b : a; }

PrecisionGuard::PrecisionGuard(unsigned bits) : previous_(g_context_bits) {
  if (bits < MPFR_PREC_MIN) throw std::invalid_argument("PrecisionGuard: precision too small");
  g_context_bits = bits;
}

PrecisionGuard::~PrecisionGuard() { g_context_bits = previous_; }

void require_finite(const BigReal& x, std::string_view what) {
  if (!x.is_finite()) {
    throw std::domain_error(std::string(what) + " is not finite");
  }
}

}  // namespace compoly
