// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#include "compoly/poly.hpp"

#include <stdexcept>
#include <utility>

namespace compoly {

const char* to_string(Basis b) {
  return b == Basis::kChebyshev ? "chebyshev" : "power";
}

const char* to_string(Parity p) {
  switch (p) {
    case Parity::kOdd: return "odd";
    case Parity::kEven: return "even";
    case Parity::kNone: break;
  }
  return "none";
}

SymmetricDomain::SymmetricDomain(BigReal a_, BigReal b_) : a(std::move(a_)), b(std::move(b_)) {
  require_finite(a, "domain lower bound");
  require_finite(b, "domain upper bound");
  if (!(a > 0) || !(a < b)) {
    throw std::invalid_argument("SymmetricDomain requires 0 < a < b");
  }
}

namespace {

bool keeps(Parity p, size_t k) {
  if (p == Parity::kOdd) return k % 2 == 1;
  if (p == Parity::kEven) return k % 2 == 0;
  return true;
}

std::vector<BigReal> compress(const std::vector<BigReal>& c, Parity p) {
  if (p == Parity::kNone) return c;
  std::vector<BigReal> out;
  for (size_t k = p == Parity::kOdd ? 1 : 0; k < c.size(); k += 2) out.push_back(c[k]);
  return out;
}

template <class T>
T clenshaw_t(const std::vector<T>& c, const T& t) {
  if (c.empty()) return T(0);
  T b1 = T(0), b2 = T(0);
  T two_t = t * 2;
  for (size_t k = c.size() - 1; k >= 1; --k) {
    T b0 = two_t * b1 - b2 + c[k];
    b2 = std::move(b1);
    b1 = std::move(b0);
  }
  return t * b1 - b2 + c[0];
}

// Sum c_j W_j(u) with W_0 = 1, W_1 = 2u - 1 and the Chebyshev recurrence, so
// that T_{2j+1}(t) = t W_j(2t^2 - 1).
template <class T>
T clenshaw_w(const std::vector<T>& c, const T& u) {
  if (c.empty()) return T(0);
  T b1 = T(0), b2 = T(0);
  T two_u = u * 2;
  for (size_t k = c.size() - 1; k >= 1; --k) {
    T b0 = two_u * b1 - b2 + c[k];
    b2 = std::move(b1);
    b1 = std::move(b0);
  }
  return (two_u - 1) * b1 - b2 + c[0];
}

template <class T>
T horner(const std::vector<T>& c, const T& x) {
  if (c.empty()) return T(0);
  T acc = c.back();
  for (size_t k = c.size() - 1; k-- > 0;) {
    acc *= x;
    acc += c[k];
  }
  return acc;
}

}  // namespace

template <class T>
T chebyshev_series(const std::vector<T>& c, Parity parity, const T& t) {
  switch (parity) {
    case Parity::kNone:
      return clenshaw_t(c, t);
    case Parity::kEven: {
      T u = t * t * 2 - 1;
      return clenshaw_t(c, u);
    }
    case Parity::kOdd: {
      T u = t * t * 2 - 1;
      return t * clenshaw_w(c, u);
    }
  }
  return T(0);
}

template BigReal chebyshev_series<BigReal>(const std::vector<BigReal>&, Parity, const BigReal&);
template double chebyshev_series<double>(const std::vector<double>&, Parity, const double&);
template long double chebyshev_series<long double>(const std::vector<long double>&, Parity,
                                                   const long double&);

std::vector<BigReal> expand_parity(const std::vector<BigReal>& c, Parity parity) {
  if (parity == Parity::kNone) return c;
  std::vector<BigReal> out(parity == Parity::kOdd ? 2 * c.size() : 2 * c.size() - 1, BigReal(0));
  for (size_t j = 0; j < c.size(); ++j) out[parity == Parity::kOdd ? 2 * j + 1 : 2 * j] = c[j];
  return out;
}

Poly::Poly(Basis basis, BigReal lo, BigReal hi, std::vector<BigReal> coeffs, Parity parity)
    : basis_(basis), lo_(std::move(lo)), hi_(std::move(hi)), coeffs_(std::move(coeffs)),
      parity_(parity) {
  if (coeffs_.empty()) throw std::invalid_argument("Poly needs at least one coefficient");
  require_finite(lo_, "Poly interval lo");
  require_finite(hi_, "Poly interval hi");
  if (!(lo_ < hi_)) throw std::invalid_argument("Poly interval requires lo < hi");
  for (const BigReal& c : coeffs_) require_finite(c, "Poly coefficient");
  if (parity_ != Parity::kNone) {
    if (basis_ == Basis::kChebyshev && lo_ != -hi_) {
      throw std::invalid_argument("parity-tagged Chebyshev Poly needs a symmetric interval");
    }
    for (size_t k = 0; k < coeffs_.size(); ++k) {
      if (!keeps(parity_, k) && !coeffs_[k].is_zero()) {
        throw std::invalid_argument("parity-tagged Poly has a nonzero off-parity coefficient");
      }
    }
  }
}

BigReal Poly::eval(const BigReal& x) const {
  if (basis_ == Basis::kPower) {
    if (parity_ == Parity::kNone) return horner(coeffs_, x);
    std::vector<BigReal> c = compress(coeffs_, parity_);
    BigReal q = horner(c, x * x);
    return parity_ == Parity::kOdd ? x * q : q;
  }
  BigReal t = (x * 2 - lo_ - hi_) / (hi_ - lo_);
  if (parity_ == Parity::kNone) return clenshaw_t(coeffs_, t);
  return chebyshev_series(compress(coeffs_, parity_), parity_, t);
}

Poly to_power_basis(const Poly& p) {
  if (p.basis() == Basis::kPower) return p;
  const size_t n = p.coeffs().size();
  // Power coefficients in t, accumulated from T_k = 2t T_{k-1} - T_{k-2}.
  std::vector<BigReal> a(n, BigReal(0));
  std::vector<BigReal> tkm1(n, BigReal(0)), tk(n, BigReal(0));
  tkm1[0] = 1;
  a[0] += p.coeffs()[0];
  if (n > 1) {
    tk[1] = 1;
    a[1] += p.coeffs()[1];
  }
  for (size_t k = 2; k < n; ++k) {
    std::vector<BigReal> next(n, BigReal(0));
    for (size_t i = 0; i < k; ++i) {
      if (!tk[i].is_zero()) next[i + 1] += tk[i] * 2;
      if (!tkm1[i].is_zero()) next[i] -= tkm1[i];
    }
    if (!p.coeffs()[k].is_zero()) {
      for (size_t i = 0; i <= k; ++i) {
        if (!next[i].is_zero()) a[i].fma_accumulate(p.coeffs()[k], next[i]);
      }
    }
    tkm1 = std::move(tk);
    tk = std::move(next);
  }
  // Substitute t = s x + o by Horner composition.
  BigReal width = p.hi() - p.lo();
  BigReal s = BigReal(2) / width;
  BigReal o = -(p.lo() + p.hi()) / width;
  std::vector<BigReal> out(n, BigReal(0));
  if (o.is_zero()) {
    BigReal sk(1);
    for (size_t k = 0; k < n; ++k) {
      out[k] = a[k] * sk;
      sk *= s;
    }
  } else {
    out[0] = a[n - 1];
    for (size_t k = n - 1; k-- > 0;) {
      for (size_t i = n - 1; i >= 1; --i) {
        out[i] = out[i] * o + out[i - 1] * s;
      }
      out[0] = out[0] * o + a[k];
    }
  }
  for (size_t k = 0; k < n; ++k) {
    if (!keeps(p.parity(), k)) out[k] = 0;
  }
  return Poly(Basis::kPower, p.lo(), p.hi(), std::move(out), p.parity());
}

template <class T>
FastPoly<T>::FastPoly(const Poly& p) : basis_(p.basis()), parity_(p.parity()) {
  std::vector<BigReal> c = compress(p.coeffs(), parity_);
  c_.reserve(c.size());
  for (const BigReal& v : c) c_.push_back(static_cast<T>(v.to_long_double()));
  if (basis_ == Basis::kChebyshev) {
    BigReal width = p.hi() - p.lo();
    scale_ = static_cast<T>((BigReal(2) / width).to_long_double());
    shift_ = static_cast<T>((-(p.lo() + p.hi()) / width).to_long_double());
  }
}

template <class T>
T FastPoly<T>::operator()(T x) const {
  if (basis_ == Basis::kPower) {
    if (parity_ == Parity::kNone) return horner(c_, x);
    T q = horner(c_, x * x);
    return parity_ == Parity::kOdd ? x * q : q;
  }
  T t = scale_ * x + shift_;
  return chebyshev_series(c_, parity_, t);
}

template class FastPoly<double>;
template class FastPoly<long double>;

}  // namespace compoly
