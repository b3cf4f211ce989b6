// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "compoly/bigreal.hpp"
#include "compoly/poly.hpp"

namespace compoly {

enum class Target { kRelu, kAbs };

const char* to_string(Target t);

struct RemezOptions {
  /// Relative width of the error band at convergence. Unset means 2^-40.
  std::optional<BigReal> tol;
  /// Working precision. 0 selects default_precision_bits(), and degrees above
  /// 75 are raised to at least 4 * degree bits either way.
  unsigned precision_bits = 0;
  /// Dense-grid points per unit of degree.
  int grid_density = 64;
  int max_iterations = 100;
};

struct RemezResult {
  Poly poly;
  BigReal minimax_error;
  std::vector<BigReal> extrema;
  /// Signed error target - poly at each extremum.
  std::vector<BigReal> extremal_errors;
  int iterations = 0;
  unsigned precision_bits = 0;
};

/// Thrown when the exchange does not settle. Carries the last error bracket.
class RemezError : public std::runtime_error {
 public:
  RemezError(const std::string& what, double lower, double upper, int iterations)
      : std::runtime_error(what), lower_(lower), upper_(upper), iterations_(iterations) {}
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  int iterations() const { return iterations_; }

 private:
  double lower_;
  double upper_;
  int iterations_;
};

/// Default precision: COMPOLY_PRECISION_BITS when set and valid, else 300.
unsigned default_precision_bits();

/// Precision a Remez run of the given degree will use for `requested` bits.
unsigned effective_precision_bits(int degree, unsigned requested);

/// Odd polynomial of degree <= `degree` minimizing max |1 - p(x)| on [a,b],
/// equivalently the minimax approximation of sgn on [-b,-a] U [a,b]. The
/// returned Poly is in the odd Chebyshev basis of x / b.
RemezResult remez_sign_odd(const SymmetricDomain& domain, int degree,
                           const RemezOptions& opts = {});

/// Minimax approximation of ReLU or |x| on [lo, hi] of degree <= `degree`.
RemezResult remez_general(Target f, const BigReal& lo, const BigReal& hi, int degree,
                          const RemezOptions& opts = {});

}  // namespace compoly
