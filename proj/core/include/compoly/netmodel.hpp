// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "compoly/approx_ops.hpp"

namespace compoly {

/// Channel-major tensor shape; flat index is (c * h + y) * w + x.
struct Shape {
  int c = 1;
  int h = 1;
  int w = 1;
  int size() const { return c * h * w; }
  bool operator==(const Shape&) const = default;
};

std::string to_string(const Shape& s);

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Block;

struct Linear {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;  // empty means zero
  std::optional<Shape> out_shape;  // defaults to {rows, 1, 1}
};
struct Relu {};
struct MaxPool {
  int kernel = 2;
  int stride = 2;
};
struct AvgPool {
  int kernel = 2;
  int stride = 2;
};
/// Inference-time batch normalization: y = scale[c] * x + shift[c].
struct BatchNormInf {
  Eigen::VectorXd scale;
  Eigen::VectorXd shift;
};
struct Softmax {};
/// R(x) = G(x) + P x; P absent means identity.
struct Residual {
  std::vector<Block> inner;
  std::optional<Eigen::MatrixXd> projection;
};

struct Block {
  std::variant<Linear, Relu, MaxPool, AvgPool, BatchNormInf, Softmax, Residual> v;
};

const char* block_name(const Block& b);

struct Model {
  Shape input_shape;
  std::vector<Block> blocks;
};

/// Output shape of `b` on input `in`; throws ShapeError.
Shape output_shape(const Block& b, const Shape& in);
/// Checks the whole chain and returns the final shape.
Shape validate(const Model& m);

/// AvgPool and BatchNormInf rewritten as Linear blocks, recursively.
Model fold_linear(const Model& m);

/// Max absolute row sum.
double infinity_norm(const Eigen::MatrixXd& a);

Eigen::VectorXd run_original(const Model& m, const Eigen::VectorXd& x);

struct ApproxConfig {
  int alpha = 10;
  double B_relu = 50.0;
  double B_pool = 50.0;
};

struct RangeViolation {
  std::size_t block = 0;  // top-level block index
  int coordinate = 0;
  double value = 0;
  double bound = 0;
  bool clamped = false;  // within slack and clamped, rather than fatal
  std::string op;
};

class RangeError : public DomainError {
 public:
  RangeError(const std::string& what, RangeViolation v) : DomainError(what), v_(std::move(v)) {}
  const RangeViolation& violation() const { return v_; }

 private:
  RangeViolation v_;
};

struct ApproxRun {
  Eigen::VectorXd y;
  std::vector<RangeViolation> range_violations;
};

/// ReLU -> range-scaled r, MaxPool -> range-scaled pairwise max; every other
/// block is evaluated exactly.
ApproxRun run_approx(const Model& m, const ApproxConfig& cfg, const Eigen::VectorXd& x);

struct BoundTrace {
  std::vector<double> per_block_error;  // prefix bounds, absolute units
  double C = 0;
  double B_used = 0;
  double B_pool_used = 0;
  int alpha = 0;
  std::vector<RangeViolation> range_violations;
};

/// Error propagation bound with e_0 = 0; C 2^-alpha equals the last prefix.
BoundTrace error_bound(const Model& m, int alpha, double B_relu, double B_pool);
inline BoundTrace error_bound(const Model& m, int alpha, double B) {
  return error_bound(m, alpha, B, B);
}

struct CompareReport {
  double max_diff = 0;
  std::size_t argmax = 0;
  double bound = 0;
  bool within_bound = true;
  BoundTrace trace;
  std::vector<RangeViolation> range_violations;
};

CompareReport empirical_compare(const Model& m, const ApproxConfig& cfg,
                                const std::vector<Eigen::VectorXd>& inputs);

/// Model file (JSON). Syntax errors report line and column, semantic errors
/// the JSON pointer of the offending field.
class ModelParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Model parse_model(const std::string& text, const std::string& source = "<model>");
Model load_model(const std::string& path);
std::string dump_model(const Model& m);

struct RandomModelOptions {
  int max_blocks = 8;
  int max_width = 32;
  bool residual = false;     // include at least one residual block
  bool allow_maxpool = true;
  double activation_cap = 35.0;  // target sup bound on pre-activation values
};

/// Random model with weights in [-1, 1], rescaled so every ReLU/MaxPool input
/// stays within activation_cap for inputs in [-1, 1]^n.
Model random_model(std::uint64_t seed, const RandomModelOptions& opts = {});

}  // namespace compoly
