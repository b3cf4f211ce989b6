// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#include "compoly/remez.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <utility>

#include <spdlog/spdlog.h>

namespace compoly {

const char* to_string(Target t) { return t == Target::kRelu ? "relu" : "abs"; }

unsigned default_precision_bits() {
  if (const char* env = std::getenv("COMPOLY_PRECISION_BITS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= static_cast<long>(kMinPrecisionBits) && v <= 1 << 20) {
      return static_cast<unsigned>(v);
    }
  }
  return kDefaultPrecisionBits;
}

unsigned effective_precision_bits(int degree, unsigned requested) {
  unsigned bits = requested == 0 ? default_precision_bits() : requested;
  if (bits < kMinPrecisionBits) {
    throw std::invalid_argument("precision below " + std::to_string(kMinPrecisionBits) +
                                " bits");
  }
  if (degree > 75) {
    bits = std::max(bits, std::max(kDefaultPrecisionBits, 4u * static_cast<unsigned>(degree)));
  }
  return bits;
}

namespace {

// Approximate f on [a, b] by sum_j c_j phi_j(x), where phi_j are the
// parity-selected Chebyshev polynomials of t = scale * x + shift.
struct Problem {
  Parity parity = Parity::kNone;
  BigReal scale;
  BigReal shift;
  int n = 0;
  BigReal a;
  BigReal b;
  std::function<BigReal(const BigReal&)> f;
  int grid_degree = 0;
};

struct Extremum {
  BigReal x;
  BigReal e;
};

struct State {
  std::vector<BigReal> c;
  BigReal level;
};

BigReal to_t(const Problem& pr, const BigReal& x) { return pr.scale * x + pr.shift; }

std::vector<BigReal> basis_row(const Problem& pr, const BigReal& x) {
  BigReal t = to_t(pr, x);
  int top = pr.parity == Parity::kNone ? pr.n - 1 : 2 * pr.n - 1;
  std::vector<BigReal> tk;
  tk.reserve(static_cast<size_t>(top) + 1);
  tk.emplace_back(1);
  if (top >= 1) tk.push_back(t);
  BigReal two_t = t * 2;
  for (int k = 2; k <= top; ++k) tk.push_back(two_t * tk[k - 1] - tk[k - 2]);
  std::vector<BigReal> row;
  row.reserve(static_cast<size_t>(pr.n));
  for (int j = 0; j < pr.n; ++j) {
    int k = pr.parity == Parity::kNone ? j : (pr.parity == Parity::kOdd ? 2 * j + 1 : 2 * j);
    row.push_back(tk[k]);
  }
  return row;
}

// Dense Gaussian elimination with partial pivoting; overwrites m and rhs.
std::vector<BigReal> solve(std::vector<std::vector<BigReal>>& m, std::vector<BigReal>& rhs) {
  const size_t n = rhs.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    BigReal best = abs(m[col][col]);
    for (size_t r = col + 1; r < n; ++r) {
      BigReal v = abs(m[r][col]);
      if (v > best) {
        best = std::move(v);
        piv = r;
      }
    }
    if (best.is_zero()) throw std::runtime_error("Remez: singular reference system");
    std::swap(m[col], m[piv]);
    std::swap(rhs[col], rhs[piv]);
    for (size_t r = col + 1; r < n; ++r) {
      if (m[r][col].is_zero()) continue;
      BigReal factor = m[r][col] / m[col][col];
      for (size_t k = col + 1; k < n; ++k) m[r][k] -= factor * m[col][k];
      rhs[r] -= factor * rhs[col];
      m[r][col] = 0;
    }
  }
  std::vector<BigReal> x(n);
  for (size_t i = n; i-- > 0;) {
    BigReal acc = rhs[i];
    for (size_t k = i + 1; k < n; ++k) acc -= m[i][k] * x[k];
    x[i] = acc / m[i][i];
  }
  return x;
}

State solve_reference(const Problem& pr, const std::vector<BigReal>& ref) {
  const size_t m = ref.size();
  std::vector<std::vector<BigReal>> mat(m);
  std::vector<BigReal> rhs(m);
  for (size_t i = 0; i < m; ++i) {
    mat[i] = basis_row(pr, ref[i]);
    mat[i].emplace_back(i % 2 == 0 ? 1 : -1);
    rhs[i] = pr.f(ref[i]);
  }
  std::vector<BigReal> sol = solve(mat, rhs);
  State st;
  st.level = sol.back();
  sol.pop_back();
  st.c = std::move(sol);
  return st;
}

BigReal error_at(const Problem& pr, const std::vector<BigReal>& c, const BigReal& x) {
  return pr.f(x) - chebyshev_series(c, pr.parity, to_t(pr, x));
}

std::vector<BigReal> make_grid(const Problem& pr, int density) {
  const int count = std::max(16, density * std::max(1, pr.grid_degree)) | 1;
  BigReal width = pr.b - pr.a;
  BigReal half = width / 2;
  BigReal mid = (pr.a + pr.b) / 2;
  std::vector<BigReal> g;
  g.reserve(static_cast<size_t>(3 * count + 1));
  for (int i = 0; i < count; ++i) {
    if (i == 0) {
      g.push_back(pr.a);
    } else if (i == count - 1) {
      g.push_back(pr.b);
    } else {
      g.push_back(pr.a + width * (static_cast<double>(i) / (count - 1)));
    }
  }
  for (int i = 1; i < count - 1; ++i) {
    g.push_back(mid - half * std::cos(M_PI * i / (count - 1)));
  }
  if (pr.a > 0) {
    double ratio = std::log((pr.b / pr.a).to_double());
    for (int i = 1; i < count - 1; ++i) {
      g.push_back(pr.a * std::exp(ratio * i / (count - 1)));
    }
  }
  if (pr.a < 0 && pr.b > 0) g.emplace_back(0);
  std::sort(g.begin(), g.end(), [](const BigReal& l, const BigReal& r) { return l < r; });
  std::vector<BigReal> out;
  out.reserve(g.size());
  for (BigReal& v : g) {
    if (v < pr.a || v > pr.b) continue;
    if (!out.empty() && out.back() == v) continue;
    out.push_back(std::move(v));
  }
  return out;
}

// Maximizes s * e(x) on [lo, hi] by golden section, starting from the grid
// candidate; returns whichever of the refined point, the candidate and the
// bracket ends is best.
Extremum refine(const Problem& pr, const std::vector<BigReal>& c, int s, const BigReal& lo,
                const BigReal& hi, Extremum seed) {
  static const int kIterations = 40;
  auto g = [&](const BigReal& x) { return error_at(pr, c, x); };
  BigReal gr = (sqrt(BigReal(5)) - 1) / 2;
  BigReal l = lo, h = hi;
  BigReal x1 = h - gr * (h - l), x2 = l + gr * (h - l);
  BigReal e1 = g(x1), e2 = g(x2);
  for (int it = 0; it < kIterations; ++it) {
    if (e1 * s < e2 * s) {
      l = x1;
      x1 = x2;
      e1 = e2;
      x2 = l + gr * (h - l);
      e2 = g(x2);
    } else {
      h = x2;
      x2 = x1;
      e2 = e1;
      x1 = h - gr * (h - l);
      e1 = g(x1);
    }
  }
  Extremum best = std::move(seed);
  auto consider = [&](const BigReal& x, const BigReal& e) {
    if (e * s > best.e * s) best = Extremum{x, e};
  };
  consider(x1, e1);
  consider(x2, e2);
  if (lo == pr.a) consider(lo, g(lo));
  if (hi == pr.b) consider(hi, g(hi));
  return best;
}

// One extremum per sign run of the error on the grid, refined.
std::vector<Extremum> find_extrema(const Problem& pr, const std::vector<BigReal>& c,
                                   const std::vector<BigReal>& grid, unsigned bits) {
  std::vector<double> ev(grid.size());
  {
    PrecisionGuard scan(std::min(bits, 160u));
    std::vector<BigReal> cs;
    cs.reserve(c.size());
    for (const BigReal& v : c) cs.push_back(at_context_precision(v));
    Problem lowp = pr;
    lowp.scale = at_context_precision(pr.scale);
    lowp.shift = at_context_precision(pr.shift);
    for (size_t i = 0; i < grid.size(); ++i) ev[i] = error_at(lowp, cs, grid[i]).to_double();
  }
  std::vector<Extremum> out;
  size_t i = 0;
  while (i < grid.size()) {
    int s = ev[i] >= 0 ? 1 : -1;
    size_t best = i;
    size_t j = i;
    while (j < grid.size() && (ev[j] >= 0 ? 1 : -1) == s) {
      if (std::fabs(ev[j]) > std::fabs(ev[best])) best = j;
      ++j;
    }
    const BigReal& lo = grid[best == 0 ? 0 : best - 1];
    const BigReal& hi = grid[best + 1 >= grid.size() ? grid.size() - 1 : best + 1];
    Extremum seed{grid[best], error_at(pr, c, grid[best])};
    out.push_back(refine(pr, c, s, lo, hi, std::move(seed)));
    i = j;
  }
  // Refinement cannot flip a run's sign, but merge accidental repeats.
  std::vector<Extremum> merged;
  for (Extremum& e : out) {
    if (!merged.empty() && merged.back().e.sign() == e.e.sign()) {
      if (abs(e.e) > abs(merged.back().e)) merged.back() = std::move(e);
    } else {
      merged.push_back(std::move(e));
    }
  }
  return merged;
}

size_t argmax_abs(const std::vector<Extremum>& v) {
  size_t g = 0;
  for (size_t i = 1; i < v.size(); ++i) {
    if (abs(v[i].e) > abs(v[g].e)) g = i;
  }
  return g;
}

// Classic single point exchange: put x* into the reference keeping
// alternation of the current error signs.
std::vector<BigReal> single_exchange(const Problem& pr, const std::vector<BigReal>& c,
                                     std::vector<BigReal> ref, const Extremum& star) {
  auto sgn = [&](const BigReal& x) { return error_at(pr, c, x).sign(); };
  const int s = star.e.sign();
  size_t pos = 0;
  while (pos < ref.size() && ref[pos] < star.x) ++pos;
  if (pos < ref.size() && ref[pos] == star.x) return ref;
  if (pos == 0) {
    if (sgn(ref[0]) == s) {
      ref[0] = star.x;
    } else {
      ref.pop_back();
      ref.insert(ref.begin(), star.x);
    }
  } else if (pos == ref.size()) {
    if (sgn(ref.back()) == s) {
      ref.back() = star.x;
    } else {
      ref.erase(ref.begin());
      ref.push_back(star.x);
    }
  } else if (sgn(ref[pos - 1]) == s) {
    ref[pos - 1] = star.x;
  } else {
    ref[pos] = star.x;
  }
  return ref;
}

// Chebyshev extrema mapped affinely onto the domain. For parity-reduced
// problems the mapping is done in u = 2t^2 - 1, the variable in which the
// reduced basis is a full Chebyshev basis.
std::vector<BigReal> initial_reference(const Problem& pr) {
  const int m = pr.n + 1;
  const bool reduced = pr.parity != Parity::kNone;
  auto fwd = [&](const BigReal& x) {
    BigReal t = to_t(pr, x);
    return reduced ? t * t * 2 - 1 : t;
  };
  auto back = [&](const BigReal& v) {
    BigReal t = reduced ? sqrt((v + 1) / 2) : v;
    return (t - pr.shift) / pr.scale;
  };
  BigReal ua = fwd(pr.a), ub = fwd(pr.b);
  BigReal mid = (ua + ub) / 2, half = (ub - ua) / 2;
  BigReal step = pi() / pr.n;
  std::vector<BigReal> ref;
  ref.reserve(static_cast<size_t>(m));
  ref.push_back(pr.a);
  for (int i = 1; i < m - 1; ++i) {
    ref.push_back(back(mid - half * cos(step * static_cast<long>(i))));
  }
  ref.push_back(pr.b);
  return ref;
}

struct Solved {
  std::vector<BigReal> c;
  std::vector<Extremum> extrema;
  BigReal max_err;
  int iterations = 0;
};

Solved run(const Problem& pr, const RemezOptions& opts, unsigned bits) {
  BigReal tol = opts.tol ? at_context_precision(*opts.tol) : ldexp(BigReal(1), -40);
  if (!(tol > 0)) throw std::invalid_argument("Remez tolerance must be positive");
  if (opts.max_iterations < 1) throw std::invalid_argument("Remez needs max_iterations >= 1");
  const int m = pr.n + 1;
  std::vector<BigReal> ref = initial_reference(pr);
  const std::vector<BigReal> grid = make_grid(pr, opts.grid_density);

  double lower = 0, upper = 0;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    State st = solve_reference(pr, ref);
    std::vector<Extremum> ext = find_extrema(pr, st.c, grid, bits);
    const size_t g = argmax_abs(ext);
    spdlog::debug("remez iteration {} level {} max {}", it, st.level.to_double(),
                  abs(ext[g].e).to_double());
    std::vector<Extremum> window;
    if (static_cast<int>(ext.size()) >= m) {
      size_t first = g + 1 >= static_cast<size_t>(m) ? g + 1 - m : 0;
      size_t last = std::min(g, ext.size() - m);
      size_t pick = first;
      BigReal pick_min(-1);
      for (size_t s = first; s <= last; ++s) {
        BigReal mn = abs(ext[s].e);
        for (size_t k = s + 1; k < s + m; ++k) mn = min(mn, abs(ext[k].e));
        if (mn > pick_min) {
          pick_min = mn;
          pick = s;
        }
      }
      window.assign(ext.begin() + static_cast<long>(pick), ext.begin() + static_cast<long>(pick + m));
    }
    if (!window.empty()) {
      BigReal mx = abs(window[0].e), mn = mx;
      for (const Extremum& e : window) {
        mx = max(mx, abs(e.e));
        mn = min(mn, abs(e.e));
      }
      lower = mn.to_double();
      upper = mx.to_double();
      if ((mx - mn) <= tol * mx) {
        Solved out;
        out.c = std::move(st.c);
        out.extrema = std::move(window);
        out.max_err = std::move(mx);
        out.iterations = it;
        return out;
      }
      ref.clear();
      for (const Extremum& e : window) ref.push_back(e.x);
    } else {
      lower = abs(st.level).to_double();
      upper = abs(ext[g].e).to_double();
      ref = single_exchange(pr, st.c, std::move(ref), ext[g]);
    }
  }
  std::ostringstream msg;
  msg << "Remez did not converge after " << opts.max_iterations << " iterations; error band ["
      << lower << ", " << upper << "]";
  throw RemezError(msg.str(), lower, upper, opts.max_iterations);
}

void check_interval(const BigReal& lo, const BigReal& hi, unsigned bits) {
  BigReal floor = ldexp(max(abs(lo), abs(hi)), -static_cast<long>(bits) + 8);
  if (!(hi - lo > floor)) {
    throw std::invalid_argument("Remez interval is degenerate at the working precision");
  }
}

}  // namespace

RemezResult remez_sign_odd(const SymmetricDomain& domain, int degree, const RemezOptions& opts) {
  if (degree < 1 || degree % 2 == 0) {
    throw std::invalid_argument("sign approximation degree must be odd and >= 1");
  }
  const unsigned bits = effective_precision_bits(degree, opts.precision_bits);
  PrecisionGuard guard(bits);
  Problem pr;
  pr.parity = Parity::kOdd;
  pr.a = at_context_precision(domain.a);
  pr.b = at_context_precision(domain.b);
  check_interval(pr.a, pr.b, bits);
  pr.scale = BigReal(1) / pr.b;
  pr.shift = 0;
  pr.n = (degree + 1) / 2;
  pr.f = [](const BigReal&) { return BigReal(1); };
  pr.grid_degree = degree;
  Solved s = run(pr, opts, bits);

  RemezResult r{Poly(Basis::kChebyshev, -pr.b, pr.b, expand_parity(s.c, Parity::kOdd),
                     Parity::kOdd),
                s.max_err, {}, {}, s.iterations, bits};
  for (Extremum& e : s.extrema) {
    r.extrema.push_back(std::move(e.x));
    r.extremal_errors.push_back(std::move(e.e));
  }
  return r;
}

RemezResult remez_general(Target f, const BigReal& lo_in, const BigReal& hi_in, int degree,
                          const RemezOptions& opts) {
  if (degree < 1) throw std::invalid_argument("Remez degree must be >= 1");
  const unsigned bits = effective_precision_bits(degree, opts.precision_bits);
  PrecisionGuard guard(bits);
  BigReal lo = at_context_precision(lo_in), hi = at_context_precision(hi_in);
  require_finite(lo, "interval lo");
  require_finite(hi, "interval hi");
  if (!(lo < hi)) throw std::invalid_argument("Remez interval requires lo < hi");
  check_interval(lo, hi, bits);
  const bool relu = f == Target::kRelu;

  if (lo == -hi) {
    // Symmetric interval: the |x| minimax is even, so solve on [0, hi] with
    // the even basis and mirror. ReLU(x) = x/2 + |x|/2 and x/2 is exact.
    Problem pr;
    pr.parity = Parity::kEven;
    pr.a = 0;
    pr.b = hi;
    pr.scale = BigReal(1) / hi;
    pr.shift = 0;
    pr.n = degree / 2 + 1;
    pr.f = [](const BigReal& x) { return abs(x); };
    pr.grid_degree = degree;
    Solved s = run(pr, opts, bits);
    std::vector<BigReal> full = expand_parity(s.c, Parity::kEven);
    full.resize(static_cast<size_t>(degree) + 1, BigReal(0));
    BigReal err = s.max_err;
    if (relu) {
      for (BigReal& v : full) v /= 2;
      full[1] += hi / 2;
      err /= 2;
    }
    std::vector<BigReal> xs, es;
    for (size_t i = s.extrema.size(); i-- > 0;) {
      if (s.extrema[i].x.is_zero()) continue;
      xs.push_back(-s.extrema[i].x);
      es.push_back(relu ? s.extrema[i].e / 2 : s.extrema[i].e);
    }
    for (Extremum& e : s.extrema) {
      xs.push_back(e.x);
      es.push_back(relu ? e.e / 2 : e.e);
    }
    Parity parity = relu ? Parity::kNone : Parity::kEven;
    return RemezResult{Poly(Basis::kChebyshev, lo, hi, std::move(full), parity),
                       std::move(err), std::move(xs), std::move(es), s.iterations, bits};
  }

  Problem pr;
  pr.parity = Parity::kNone;
  pr.a = lo;
  pr.b = hi;
  pr.scale = BigReal(2) / (hi - lo);
  pr.shift = -(lo + hi) / (hi - lo);
  pr.n = degree + 1;
  if (relu) {
    pr.f = [](const BigReal& x) { return x > 0 ? x : BigReal(0); };
  } else {
    pr.f = [](const BigReal& x) { return abs(x); };
  }
  pr.grid_degree = degree;
  Solved s = run(pr, opts, bits);
  RemezResult r{Poly(Basis::kChebyshev, lo, hi, std::move(s.c), Parity::kNone), s.max_err,
                {}, {}, s.iterations, bits};
  for (Extremum& e : s.extrema) {
    r.extrema.push_back(std::move(e.x));
    r.extremal_errors.push_back(std::move(e.e));
  }
  return r;
}

}  // namespace compoly
