// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "compoly/bigreal.hpp"
#include "compoly/poly.hpp"
#include "compoly/remez.hpp"

namespace compoly {

/// Precision parameter alpha with its max-function factor zeta and the
/// stage degree schedule; epsilon = zeta * 2^-alpha.
struct ApproxSpec {
  int alpha = 0;
  int zeta = 0;
  std::vector<int> degrees;
  int depth = 0;
  std::optional<double> B;

  BigReal epsilon() const;
};

/// sum ceil(log2(d_i + 1)) + 1.
int composite_depth(const std::vector<int>& degrees);

/// Tabulated schedule for alpha in [4, 14]; throws std::out_of_range otherwise.
ApproxSpec tabulated_spec(int alpha);

struct CompositeOptions {
  unsigned precision_bits = 0;
  /// Chebyshev grid points used to certify each stage image.
  int image_grid = 4097;
  RemezOptions remez;
};

/// p = p_k o ... o p_1 where p_1 is the odd sign minimax polynomial on
/// [eps, 1] and p_i is the one on the certified image of the prefix.
class SignComposite {
 public:
  SignComposite(BigReal epsilon, std::vector<Poly> stages, std::vector<SymmetricDomain> domains,
                std::vector<BigReal> stage_errors, std::vector<BigReal> deviations);

  const std::vector<Poly>& stages() const { return stages_; }
  const std::vector<SymmetricDomain>& stage_domains() const { return domains_; }
  /// Minimax error of each stage on its own domain.
  const std::vector<BigReal>& stage_errors() const { return stage_errors_; }
  /// Certified max |prefix_i(x) - 1| on [eps, 1] before padding.
  const std::vector<BigReal>& prefix_deviations() const { return deviations_; }
  const BigReal& epsilon() const { return epsilon_; }
  /// -log2 of the certified deviation of the full composition.
  const BigReal& beta() const { return beta_; }
  std::vector<int> degrees() const;

  double operator()(double x) const;
  long double operator()(long double x) const;
  BigReal operator()(const BigReal& x) const;
  /// First `k` stages only.
  BigReal eval_prefix(size_t k, const BigReal& x) const;
  long double eval_prefix(size_t k, long double x) const;

 private:
  BigReal epsilon_;
  std::vector<Poly> stages_;
  std::vector<SymmetricDomain> domains_;
  std::vector<BigReal> stage_errors_;
  std::vector<BigReal> deviations_;
  BigReal beta_;
  std::vector<FastPoly<double>> fast_d_;
  std::vector<FastPoly<long double>> fast_ld_;
};

/// Certified image of the first `prefix_len` stages on [eps, 1], mirrored.
/// A zero-length prefix returns [eps, 1] itself.
struct ImageCertificate {
  SymmetricDomain domain;
  BigReal grid_max;     // max deviation on the Chebyshev grid
  BigReal refined_max;  // after golden-section refinement of grid peaks
};

ImageCertificate image_interval(const SignComposite& c, size_t prefix_len, int grid_points = 4097);

/// Same certification on explicit stages, used while the chain is growing.
ImageCertificate image_interval(const std::vector<Poly>& stages, const BigReal& epsilon,
                                const BigReal& last_stage_error, int grid_points);

SignComposite build_sign_composite(const BigReal& epsilon, const std::vector<int>& degrees,
                                   const CompositeOptions& opts = {});

struct ClosenessReport {
  bool close = false;
  long double max_deviation = 0;
  long double witness = 0;
  long double achieved_beta = 0;
  size_t points = 0;
};

/// Scans `points` log-spaced abscissae on [eps, 1] in extended precision and
/// checks max |p(x) - 1| <= 2^-beta_target. Odd symmetry covers [-1, -eps].
ClosenessReport certify_closeness(const SignComposite& c, double beta_target,
                                  size_t points = 1000000);

/// Coefficient dump: per stage a header `stage <i> degree <d>` followed by
/// the power-basis coefficients in ascending order, one per line.
void write_coefficient_dump(std::ostream& out, const SignComposite& c);
std::vector<Poly> read_coefficient_dump(std::istream& in);

/// Composite for a tabulated alpha, built once per process and shared.
std::shared_ptr<const SignComposite> composite_for_alpha(int alpha);

}  // namespace compoly
