// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#include "compoly/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace compoly {

using json = nlohmann::json;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(const Shape& s) {
  return "(" + std::to_string(s.c) + "," + std::to_string(s.h) + "," + std::to_string(s.w) + ")";
}

namespace {

template <class... F>
struct Overloaded : F... {
  using F::operator()...;
};
template <class... F>
Overloaded(F...) -> Overloaded<F...>;

bool is_basic(const Block& b) { return !std::holds_alternative<Residual>(b.v); }

Shape chain_shape(const std::vector<Block>& blocks, Shape s, const std::string& where) {
  for (size_t i = 0; i < blocks.size(); ++i) {
    try {
      s = output_shape(blocks[i], s);
    } catch (const ShapeError& e) {
      throw ShapeError(where + "block " + std::to_string(i) + " (" + block_name(blocks[i]) +
                       "): " + e.what());
    }
  }
  return s;
}

Shape pool_shape(int k, int stride, const Shape& in) {
  if (k < 1 || stride < 1) throw ShapeError("pool kernel and stride must be >= 1");
  if (in.h < k || in.w < k) {
    throw ShapeError("pool kernel " + std::to_string(k) + " larger than input " + to_string(in));
  }
  return Shape{in.c, (in.h - k) / stride + 1, (in.w - k) / stride + 1};
}

}  // namespace

const char* block_name(const Block& b) {
  return std::visit(Overloaded{
                        [](const Linear&) { return "linear"; },
                        [](const Relu&) { return "relu"; },
                        [](const MaxPool&) { return "maxpool"; },
                        [](const AvgPool&) { return "avgpool"; },
                        [](const BatchNormInf&) { return "batchnorm"; },
                        [](const Softmax&) { return "softmax"; },
                        [](const Residual&) { return "residual"; },
                    },
                    b.v);
}

Shape output_shape(const Block& b, const Shape& in) {
  return std::visit(
      Overloaded{
          [&](const Linear& l) {
            if (l.A.cols() != in.size()) {
              throw ShapeError("matrix has " + std::to_string(l.A.cols()) +
                               " columns, input has " + std::to_string(in.size()) + " values");
            }
            if (l.b.size() != 0 && l.b.size() != l.A.rows()) {
              throw ShapeError("bias length does not match matrix rows");
            }
            Shape out{static_cast<int>(l.A.rows()), 1, 1};
            if (l.out_shape) {
              if (l.out_shape->size() != l.A.rows()) {
                throw ShapeError("out_shape " + to_string(*l.out_shape) + " does not hold " +
                                 std::to_string(l.A.rows()) + " values");
              }
              out = *l.out_shape;
            }
            return out;
          },
          [&](const Relu&) { return in; },
          [&](const Softmax&) { return in; },
          [&](const MaxPool& p) {
            if (p.kernel > 10) {
              throw ShapeError("max-pool kernel " + std::to_string(p.kernel) +
                               " exceeds the supported maximum of 10");
            }
            return pool_shape(p.kernel, p.stride, in);
          },
          [&](const AvgPool& p) { return pool_shape(p.kernel, p.stride, in); },
          [&](const BatchNormInf& bn) {
            if (bn.scale.size() != in.c || bn.shift.size() != in.c) {
              throw ShapeError("batchnorm needs one scale and shift per channel");
            }
            return in;
          },
          [&](const Residual& r) {
            if (r.inner.empty()) throw ShapeError("residual block has no inner blocks");
            for (const Block& ib : r.inner) {
              if (!is_basic(ib)) throw ShapeError("residual inner blocks must be basic blocks");
            }
            Shape out = chain_shape(r.inner, in, "inner ");
            if (r.projection) {
              if (r.projection->cols() != in.size() || r.projection->rows() != out.size()) {
                throw ShapeError("projection must be " + std::to_string(out.size()) + "x" +
                                 std::to_string(in.size()));
              }
            } else if (out.size() != in.size()) {
              throw ShapeError("identity shortcut needs inner output size " +
                               std::to_string(in.size()));
            }
            return out;
          },
      },
      b.v);
}

Shape validate(const Model& m) {
  if (m.input_shape.c < 1 || m.input_shape.h < 1 || m.input_shape.w < 1) {
    throw ShapeError("input shape must be positive");
  }
  return chain_shape(m.blocks, m.input_shape, "");
}

double infinity_norm(const MatrixXd& a) {
  if (!a.allFinite()) throw std::invalid_argument("infinity_norm of a non-finite matrix");
  if (a.rows() == 0) return 0.0;
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

namespace {

MatrixXd avgpool_matrix(const AvgPool& p, const Shape& in) {
  Shape out = pool_shape(p.kernel, p.stride, in);
  MatrixXd a = MatrixXd::Zero(out.size(), in.size());
  const double wgt = 1.0 / (p.kernel * p.kernel);
  for (int c = 0; c < in.c; ++c)
    for (int oy = 0; oy < out.h; ++oy)
      for (int ox = 0; ox < out.w; ++ox) {
        int row = (c * out.h + oy) * out.w + ox;
        for (int dy = 0; dy < p.kernel; ++dy)
          for (int dx = 0; dx < p.kernel; ++dx) {
            int col = (c * in.h + oy * p.stride + dy) * in.w + ox * p.stride + dx;
            a(row, col) = wgt;
          }
      }
  return a;
}

std::vector<Block> fold_chain(const std::vector<Block>& blocks, Shape s) {
  std::vector<Block> out;
  for (const Block& b : blocks) {
    Shape next = output_shape(b, s);
    if (const auto* p = std::get_if<AvgPool>(&b.v)) {
      out.push_back(Block{Linear{avgpool_matrix(*p, s), VectorXd::Zero(next.size()), next}});
    } else if (const auto* bn = std::get_if<BatchNormInf>(&b.v)) {
      VectorXd diag(s.size()), shift(s.size());
      for (int c = 0; c < s.c; ++c) {
        for (int i = 0; i < s.h * s.w; ++i) {
          diag(c * s.h * s.w + i) = bn->scale(c);
          shift(c * s.h * s.w + i) = bn->shift(c);
        }
      }
      out.push_back(Block{Linear{MatrixXd(diag.asDiagonal()), shift, s}});
    } else if (const auto* r = std::get_if<Residual>(&b.v)) {
      out.push_back(Block{Residual{fold_chain(r->inner, s), r->projection}});
    } else {
      out.push_back(b);
    }
    s = next;
  }
  return out;
}

std::vector<double> window(const VectorXd& x, const Shape& in, int c, int oy, int ox, int k,
                           int stride) {
  std::vector<double> w;
  w.reserve(static_cast<size_t>(k * k));
  for (int dy = 0; dy < k; ++dy)
    for (int dx = 0; dx < k; ++dx)
      w.push_back(x((c * in.h + oy * stride + dy) * in.w + ox * stride + dx));
  return w;
}

VectorXd softmax(const VectorXd& x) {
  if (x.size() == 0) return x;
  VectorXd e = (x.array() - x.maxCoeff()).exp();
  return e / e.sum();
}

// Forward pass with pluggable ReLU and max-pool implementations.
template <class ReluOp, class PoolOp>
VectorXd forward(const std::vector<Block>& blocks, Shape s, VectorXd x, size_t top_index,
                 bool top_level, const ReluOp& relu, const PoolOp& pool) {
  for (size_t i = 0; i < blocks.size(); ++i) {
    const size_t idx = top_level ? i : top_index;
    const Block& b = blocks[i];
    Shape next = output_shape(b, s);
    std::visit(Overloaded{
                   [&](const Linear& l) {
                     VectorXd y = l.A * x;
                     if (l.b.size() != 0) y += l.b;
                     x = std::move(y);
                   },
                   [&](const Relu&) { x = relu(x, idx); },
                   [&](const Softmax&) { x = softmax(x); },
                   [&](const MaxPool& p) {
                     VectorXd y(next.size());
                     for (int c = 0; c < s.c; ++c)
                       for (int oy = 0; oy < next.h; ++oy)
                         for (int ox = 0; ox < next.w; ++ox)
                           y((c * next.h + oy) * next.w + ox) =
                               pool(window(x, s, c, oy, ox, p.kernel, p.stride), p.kernel, idx);
                     x = std::move(y);
                   },
                   [&](const AvgPool& p) { x = avgpool_matrix(p, s) * x; },
                   [&](const BatchNormInf& bn) {
                     for (int c = 0; c < s.c; ++c)
                       for (int j = 0; j < s.h * s.w; ++j) {
                         double& v = x(c * s.h * s.w + j);
                         v = bn.scale(c) * v + bn.shift(c);
                       }
                   },
                   [&](const Residual& r) {
                     VectorXd g = forward(r.inner, s, x, idx, false, relu, pool);
                     x = r.projection ? VectorXd(g + *r.projection * x) : VectorXd(g + x);
                   },
               },
               b.v);
    s = next;
  }
  return x;
}

void check_input(const Model& m, const VectorXd& x) {
  Shape in = m.input_shape;
  if (x.size() != in.size()) {
    throw ShapeError("input has " + std::to_string(x.size()) + " values, model expects " +
                     std::to_string(in.size()));
  }
}

}  // namespace

Model fold_linear(const Model& m) {
  validate(m);
  return Model{m.input_shape, fold_chain(m.blocks, m.input_shape)};
}

VectorXd run_original(const Model& m, const VectorXd& x) {
  validate(m);
  check_input(m, x);
  auto relu = [](const VectorXd& v, size_t) { return VectorXd(v.cwiseMax(0.0)); };
  auto pool = [](const std::vector<double>& w, int, size_t) {
    return *std::max_element(w.begin(), w.end());
  };
  return forward(m.blocks, m.input_shape, x, 0, true, relu, pool);
}

ApproxRun run_approx(const Model& m, const ApproxConfig& cfg, const VectorXd& x) {
  validate(m);
  check_input(m, x);
  ApproxRun run;
  ReluApprox ra = ReluApprox::for_alpha(cfg.alpha, cfg.B_relu);
  std::vector<std::optional<MaxPoolApprox>> pools(11);
  const double unit = std::ldexp(1.0, -cfg.alpha);

  auto check = [&](double v, int coord, size_t idx, double B, const char* op) {
    if (std::fabs(v) <= B) return;
    RangeViolation rv{idx, coord, v, B, std::fabs(v) <= B * (1 + unit), op};
    run.range_violations.push_back(rv);
    if (!rv.clamped) {
      std::ostringstream msg;
      msg << op << " input " << v << " at block " << idx << " coordinate " << coord
          << " is outside [-" << B << ", " << B << "] beyond the clamp slack";
      throw RangeError(msg.str(), rv);
    }
  };
  auto relu = [&](const VectorXd& v, size_t idx) {
    VectorXd y(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      check(v(i), static_cast<int>(i), idx, cfg.B_relu, "relu");
      y(i) = ra.scaled(v(i));
    }
    return y;
  };
  int pool_coord = 0;
  auto pool = [&](const std::vector<double>& w, int k, size_t idx) {
    for (double v : w) check(v, pool_coord, idx, cfg.B_pool, "maxpool");
    ++pool_coord;
    auto& mp = pools[static_cast<size_t>(k)];
    if (!mp) mp.emplace(MaxPoolApprox::for_alpha(cfg.alpha, k * k, cfg.B_pool));
    return (*mp)(std::span<const double>(w));
  };
  run.y = forward(m.blocks, m.input_shape, x, 0, true, relu, pool);
  return run;
}

namespace {

// E(e) = c 2^-alpha + L e.
struct Affine {
  double c = 0;
  double L = 1;
};

Affine compose(const Affine& first, const Affine& then) {
  return Affine{then.c + then.L * first.c, then.L * first.L};
}

Affine block_bound(const Block& b, double B_relu, double B_pool) {
  return std::visit(
      Overloaded{
          [&](const Linear& l) { return Affine{0, infinity_norm(l.A)}; },
          [&](const Relu&) { return Affine{B_relu, 1}; },
          [&](const MaxPool& p) {
            return Affine{10.0 * B_pool * ceil_log2_int(static_cast<long>(p.kernel) * p.kernel), 1};
          },
          [&](const Softmax&) { return Affine{0, 0.5}; },
          [&](const AvgPool&) -> Affine { throw std::logic_error("unfolded avgpool"); },
          [&](const BatchNormInf&) -> Affine { throw std::logic_error("unfolded batchnorm"); },
          [&](const Residual& r) {
            Affine g{0, 1};
            for (const Block& ib : r.inner) g = compose(g, block_bound(ib, B_relu, B_pool));
            double pn = r.projection ? infinity_norm(*r.projection) : 1.0;
            return Affine{g.c, pn + g.L};
          },
      },
      b.v);
}

}  // namespace

BoundTrace error_bound(const Model& m, int alpha, double B_relu, double B_pool) {
  if (alpha < 4) throw std::invalid_argument("error bound requires alpha >= 4");
  if (!(B_relu > 0) || !(B_pool > 0)) throw std::invalid_argument("error bound requires B > 0");
  Model f = fold_linear(m);
  BoundTrace t;
  t.alpha = alpha;
  t.B_used = B_relu;
  t.B_pool_used = B_pool;
  const double unit = std::ldexp(1.0, -alpha);
  double e = 0;
  for (const Block& b : f.blocks) {
    Affine a = block_bound(b, B_relu, B_pool);
    e = a.c * unit + a.L * e;
    t.per_block_error.push_back(e);
  }
  t.C = e / unit;
  return t;
}

CompareReport empirical_compare(const Model& m, const ApproxConfig& cfg,
                                const std::vector<VectorXd>& inputs) {
  CompareReport rep;
  rep.trace = error_bound(m, cfg.alpha, cfg.B_relu, cfg.B_pool);
  rep.bound = rep.trace.C * std::ldexp(1.0, -cfg.alpha);
  for (size_t i = 0; i < inputs.size(); ++i) {
    VectorXd y0 = run_original(m, inputs[i]);
    ApproxRun ar = run_approx(m, cfg, inputs[i]);
    double d = y0.size() == 0 ? 0.0 : (ar.y - y0).cwiseAbs().maxCoeff();
    if (d > rep.max_diff || i == 0) {
      rep.max_diff = d;
      rep.argmax = i;
    }
    rep.range_violations.insert(rep.range_violations.end(), ar.range_violations.begin(),
                                ar.range_violations.end());
  }
  rep.trace.range_violations = rep.range_violations;
  rep.within_bound = rep.max_diff <= rep.bound;
  return rep;
}

// ---------------------------------------------------------------- JSON

namespace {

[[noreturn]] void semantic(const std::string& source, const std::string& ptr,
                           const std::string& why) {
  throw ModelParseError(source + ": at " + (ptr.empty() ? "/" : ptr) + ": " + why);
}

const json& field(const json& obj, const char* key, const std::string& source,
                  const std::string& ptr) {
  auto it = obj.find(key);
  if (it == obj.end()) semantic(source, ptr, std::string("missing field '") + key + "'");
  return *it;
}

int get_int(const json& obj, const char* key, const std::string& source, const std::string& ptr,
            std::optional<int> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    semantic(source, ptr, std::string("missing field '") + key + "'");
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) semantic(source, ptr + "/" + key, "expected an integer");
  return v.get<int>();
}

std::vector<double> get_numbers(const json& v, const std::string& source,
                                const std::string& ptr) {
  if (!v.is_array()) semantic(source, ptr, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) semantic(source, ptr + "/" + std::to_string(i), "expected a number");
    double d = v[i].get<double>();
    if (!std::isfinite(d)) semantic(source, ptr + "/" + std::to_string(i), "non-finite value");
    out.push_back(d);
  }
  return out;
}

VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

MatrixXd get_matrix(const json& obj, const std::string& source, const std::string& ptr) {
  int rows = get_int(obj, "rows", source, ptr);
  int cols = get_int(obj, "cols", source, ptr);
  if (rows < 1 || cols < 1) semantic(source, ptr, "rows and cols must be positive");
  std::vector<double> w = get_numbers(field(obj, "weights", source, ptr), source, ptr + "/weights");
  if (w.size() != static_cast<size_t>(rows) * static_cast<size_t>(cols)) {
    semantic(source, ptr + "/weights",
             "expected " + std::to_string(rows * cols) + " values, found " +
                 std::to_string(w.size()));
  }
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      w.data(), rows, cols);
}

Shape get_shape(const json& v, const std::string& source, const std::string& ptr) {
  std::vector<double> s = get_numbers(v, source, ptr);
  if (s.size() != 3) semantic(source, ptr, "shape must be [channels, height, width]");
  for (double d : s) {
    if (d < 1 || d != std::floor(d)) semantic(source, ptr, "shape entries must be positive integers");
  }
  return Shape{static_cast<int>(s[0]), static_cast<int>(s[1]), static_cast<int>(s[2])};
}

std::vector<Block> parse_blocks(const json& arr, const std::string& source, const std::string& ptr,
                                bool allow_residual);

Block parse_block(const json& b, const std::string& source, const std::string& ptr,
                  bool allow_residual) {
  if (!b.is_object()) semantic(source, ptr, "block must be an object");
  const json& tj = field(b, "type", source, ptr);
  if (!tj.is_string()) semantic(source, ptr + "/type", "expected a string");
  const std::string type = tj.get<std::string>();
  if (type == "linear") {
    Linear l;
    l.A = get_matrix(b, source, ptr);
    if (b.contains("bias")) {
      l.b = to_vector(get_numbers(b.at("bias"), source, ptr + "/bias"));
      if (l.b.size() != l.A.rows()) semantic(source, ptr + "/bias", "bias length must equal rows");
    }
    if (b.contains("out_shape")) l.out_shape = get_shape(b.at("out_shape"), source, ptr + "/out_shape");
    return Block{std::move(l)};
  }
  if (type == "relu") return Block{Relu{}};
  if (type == "softmax") return Block{Softmax{}};
  if (type == "maxpool" || type == "avgpool") {
    int k = get_int(b, "kernel", source, ptr);
    int s = get_int(b, "stride", source, ptr, k);
    if (k < 1 || s < 1) semantic(source, ptr, "kernel and stride must be positive");
    if (type == "maxpool") {
      if (k > 10) {
        semantic(source, ptr + "/kernel",
                 "max-pool kernel " + std::to_string(k) + " exceeds the supported maximum of 10");
      }
      return Block{MaxPool{k, s}};
    }
    return Block{AvgPool{k, s}};
  }
  if (type == "batchnorm") {
    BatchNormInf bn;
    bn.scale = to_vector(get_numbers(field(b, "scale", source, ptr), source, ptr + "/scale"));
    bn.shift = to_vector(get_numbers(field(b, "shift", source, ptr), source, ptr + "/shift"));
    if (bn.scale.size() != bn.shift.size()) semantic(source, ptr, "scale and shift lengths differ");
    return Block{std::move(bn)};
  }
  if (type == "residual") {
    if (!allow_residual) semantic(source, ptr, "residual blocks cannot be nested");
    Residual r;
    r.inner = parse_blocks(field(b, "inner", source, ptr), source, ptr + "/inner", false);
    if (b.contains("projection")) {
      r.projection = get_matrix(b.at("projection"), source, ptr + "/projection");
    }
    return Block{std::move(r)};
  }
  semantic(source, ptr + "/type", "unknown block type '" + type + "'");
}

std::vector<Block> parse_blocks(const json& arr, const std::string& source, const std::string& ptr,
                                bool allow_residual) {
  if (!arr.is_array()) semantic(source, ptr, "expected an array of blocks");
  std::vector<Block> out;
  for (size_t i = 0; i < arr.size(); ++i) {
    out.push_back(parse_block(arr[i], source, ptr + "/" + std::to_string(i), allow_residual));
  }
  return out;
}

json matrix_json(const MatrixXd& a) {
  json j;
  j["rows"] = a.rows();
  j["cols"] = a.cols();
  std::vector<double> w;
  w.reserve(static_cast<size_t>(a.size()));
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) w.push_back(a(r, c));
  j["weights"] = std::move(w);
  return j;
}

json shape_json(const Shape& s) { return json::array({s.c, s.h, s.w}); }

json blocks_json(const std::vector<Block>& blocks) {
  json arr = json::array();
  for (const Block& b : blocks) {
    json j;
    j["type"] = block_name(b);
    std::visit(Overloaded{
                   [&](const Linear& l) {
                     json m = matrix_json(l.A);
                     for (auto& [k, v] : m.items()) j[k] = v;
                     if (l.b.size() != 0) j["bias"] = std::vector<double>(l.b.data(), l.b.data() + l.b.size());
                     if (l.out_shape) j["out_shape"] = shape_json(*l.out_shape);
                   },
                   [&](const Relu&) {},
                   [&](const Softmax&) {},
                   [&](const MaxPool& p) {
                     j["kernel"] = p.kernel;
                     j["stride"] = p.stride;
                   },
                   [&](const AvgPool& p) {
                     j["kernel"] = p.kernel;
                     j["stride"] = p.stride;
                   },
                   [&](const BatchNormInf& bn) {
                     j["scale"] = std::vector<double>(bn.scale.data(), bn.scale.data() + bn.scale.size());
                     j["shift"] = std::vector<double>(bn.shift.data(), bn.shift.data() + bn.shift.size());
                   },
                   [&](const Residual& r) {
                     j["inner"] = blocks_json(r.inner);
                     if (r.projection) j["projection"] = matrix_json(*r.projection);
                   },
               },
               b.v);
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace

Model parse_model(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    size_t line = 1, col = 1;
    const size_t stop = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    // Drop the library's own "[json.exception...] parse error at line L, column C: " prefix.
    if (auto pos = what.find(": "); pos != std::string::npos && what.rfind("[json.", 0) == 0) {
      what = what.substr(pos + 2);
    }
    throw ModelParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                          ": " + what);
  }
  if (!doc.is_object()) semantic(source, "", "top level must be an object");
  if (doc.contains("format") && doc.at("format") != "compoly-model") {
    semantic(source, "/format", "expected \"compoly-model\"");
  }
  int version = get_int(doc, "version", source, "");
  if (version != 1) semantic(source, "/version", "unsupported version " + std::to_string(version));
  Model m;
  m.input_shape = get_shape(field(doc, "input_shape", source, ""), source, "/input_shape");
  m.blocks = parse_blocks(field(doc, "blocks", source, ""), source, "/blocks", true);
  try {
    validate(m);
  } catch (const ShapeError& e) {
    throw ModelParseError(source + ": " + e.what());
  }
  return m;
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelParseError(path + ": cannot open model file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str(), path);
}

std::string dump_model(const Model& m) {
  json doc;
  doc["format"] = "compoly-model";
  doc["version"] = 1;
  doc["input_shape"] = shape_json(m.input_shape);
  doc["blocks"] = blocks_json(m.blocks);
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------- random

namespace {

struct Gen {
  std::mt19937_64 rng;
  double cap;

  double u() { return std::uniform_real_distribution<double>(-1.0, 1.0)(rng); }
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  MatrixXd mat(int r, int c) {
    MatrixXd a(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) a(i, j) = u();
    return a;
  }
  VectorXd vec(int n) {
    VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = 0.5 * u();
    return v;
  }

  // Linear layer whose outputs stay within cap given |input| <= bound.
  Linear linear(int in, int out, double& bound, std::optional<Shape> shape = std::nullopt) {
    Linear l{mat(out, in), vec(out), shape};
    double nb = infinity_norm(l.A) * bound + l.b.cwiseAbs().maxCoeff();
    if (nb > cap) {
      double f = cap / nb;
      l.A *= f;
      l.b *= f;
      nb = cap;
    }
    bound = nb;
    return l;
  }
};

}  // namespace

Model random_model(std::uint64_t seed, const RandomModelOptions& opts) {
  if (opts.max_blocks < 2 || opts.max_width < 4) {
    throw std::invalid_argument("random_model needs max_blocks >= 2 and max_width >= 4");
  }
  Gen g{std::mt19937_64(seed), opts.activation_cap};
  Model m;
  const int w0 = g.pick(4, opts.max_width);
  m.input_shape = Shape{w0, 1, 1};
  const int nblocks = g.pick(2, opts.max_blocks);
  const int residual_at = opts.residual ? g.pick(0, nblocks - 1) : -1;
  Shape s = m.input_shape;
  double bound = 1.0;
  bool last_linear = false;
  while (static_cast<int>(m.blocks.size()) < nblocks) {
    const int left = nblocks - static_cast<int>(m.blocks.size());
    const int pos = static_cast<int>(m.blocks.size());
    if (pos == residual_at) {
      const int d = s.size();
      const int h = g.pick(4, opts.max_width);
      double b = bound;
      Residual r;
      r.inner.push_back(Block{g.linear(d, h, b)});
      r.inner.push_back(Block{Relu{}});
      Linear out = g.linear(h, d, b, s);
      double pn = 1.0;
      if (g.pick(0, 1) == 1) {
        r.projection = g.mat(d, d);
        pn = infinity_norm(*r.projection);
      }
      double total = b + pn * bound;
      if (total > g.cap) {
        double f = g.cap / total;
        out.A *= f;
        out.b *= f;
        if (r.projection) {
          *r.projection *= f;
        } else {
          r.projection = MatrixXd::Identity(d, d) * f;
        }
        total = g.cap;
      }
      r.inner.push_back(Block{std::move(out)});
      m.blocks.push_back(Block{std::move(r)});
      bound = total;
      last_linear = false;
      continue;
    }
    if (left == 1 && g.pick(0, 1) == 1) {
      m.blocks.push_back(Block{Softmax{}});
      bound = 1.0;
      continue;
    }
    if (!last_linear) {
      const bool pool = opts.allow_maxpool && left >= 2 && g.pick(0, 3) == 0 &&
                        residual_at != pos + 1;
      if (pool) {
        const int ch = g.pick(1, std::max(1, opts.max_width / 16));
        Shape img{ch, 4, 4};
        m.blocks.push_back(Block{g.linear(s.size(), img.size(), bound, img)});
        m.blocks.push_back(Block{MaxPool{2, 2}});
        s = output_shape(m.blocks.back(), img);
        last_linear = false;
        continue;
      }
      const int out = g.pick(4, opts.max_width);
      m.blocks.push_back(Block{g.linear(s.size(), out, bound)});
      s = Shape{out, 1, 1};
      last_linear = true;
      continue;
    }
    m.blocks.push_back(Block{Relu{}});
    last_linear = false;
  }
  validate(m);
  return m;
}

}  // namespace compoly
