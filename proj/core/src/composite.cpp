// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#include "compoly/composite.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "compoly/reference_tables.hpp"

namespace compoly {

namespace {

int ceil_log2(long n) {
  int k = 0;
  while ((1L << k) < n) ++k;
  return k;
}

}  // namespace

BigReal ApproxSpec::epsilon() const { return ldexp(BigReal(zeta), -alpha); }

int composite_depth(const std::vector<int>& degrees) {
  int depth = 1;
  for (int d : degrees) depth += ceil_log2(static_cast<long>(d) + 1);
  return depth;
}

ApproxSpec tabulated_spec(int alpha) {
  const reference::ScheduleRow* row = reference::find_schedule(alpha);
  if (row == nullptr) {
    throw std::out_of_range("no tabulated schedule for alpha=" + std::to_string(alpha) +
                            " (supported: 4..14); pass epsilon and degrees explicitly");
  }
  ApproxSpec s;
  s.alpha = row->alpha;
  s.zeta = row->zeta;
  auto d = reference::degrees_of(*row);
  s.degrees.assign(d.begin(), d.end());
  s.depth = row->depth;
  return s;
}

SignComposite::SignComposite(BigReal epsilon, std::vector<Poly> stages,
                             std::vector<SymmetricDomain> domains,
                             std::vector<BigReal> stage_errors, std::vector<BigReal> deviations)
    : epsilon_(std::move(epsilon)), stages_(std::move(stages)), domains_(std::move(domains)),
      stage_errors_(std::move(stage_errors)), deviations_(std::move(deviations)) {
  if (stages_.empty()) throw std::invalid_argument("SignComposite needs at least one stage");
  if (domains_.size() != stages_.size() || stage_errors_.size() != stages_.size() ||
      deviations_.size() != stages_.size()) {
    throw std::invalid_argument("SignComposite stage metadata sizes disagree");
  }
  beta_ = -log2(deviations_.back());
  for (const Poly& p : stages_) {
    fast_d_.emplace_back(p);
    fast_ld_.emplace_back(p);
  }
}

std::vector<int> SignComposite::degrees() const {
  std::vector<int> d;
  for (const Poly& p : stages_) d.push_back(p.degree());
  return d;
}

double SignComposite::operator()(double x) const {
  for (const FastPoly<double>& p : fast_d_) x = p(x);
  return x;
}

long double SignComposite::operator()(long double x) const {
  return eval_prefix(fast_ld_.size(), x);
}

BigReal SignComposite::operator()(const BigReal& x) const {
  return eval_prefix(stages_.size(), x);
}

BigReal SignComposite::eval_prefix(size_t k, const BigReal& x) const {
  BigReal y = x;
  for (size_t i = 0; i < k && i < stages_.size(); ++i) y = stages_[i].eval(y);
  return y;
}

long double SignComposite::eval_prefix(size_t k, long double x) const {
  for (size_t i = 0; i < k && i < fast_ld_.size(); ++i) x = fast_ld_[i](x);
  return x;
}

ImageCertificate image_interval(const std::vector<Poly>& stages, const BigReal& epsilon,
                                const BigReal& last_stage_error, int grid_points) {
  if (stages.empty()) return ImageCertificate{SymmetricDomain(epsilon, BigReal(1)), 0, 0};
  if (grid_points < 3) throw std::invalid_argument("image grid needs at least 3 points");
  auto dev = [&](const BigReal& x) {
    BigReal y = x;
    for (const Poly& p : stages) y = p.eval(y);
    return abs(y - 1);
  };
  const int n = grid_points;
  BigReal mid = (epsilon + 1) / 2, half = (BigReal(1) - epsilon) / 2;
  BigReal step = pi() / static_cast<long>(n - 1);
  std::vector<BigReal> xs, ds;
  xs.reserve(static_cast<size_t>(n));
  ds.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      xs.push_back(epsilon);
    } else if (i == n - 1) {
      xs.emplace_back(1);
    } else {
      xs.push_back(mid - half * cos(step * static_cast<long>(i)));
    }
    ds.push_back(dev(xs.back()));
  }
  BigReal grid_max = ds[0];
  for (const BigReal& d : ds) grid_max = max(grid_max, d);

  BigReal refined = grid_max;
  BigReal gr = (sqrt(BigReal(5)) - 1) / 2;
  for (int i = 0; i < n; ++i) {
    bool peak = (i == 0 || ds[i] >= ds[i - 1]) && (i == n - 1 || ds[i] >= ds[i + 1]);
    if (!peak) continue;
    BigReal l = xs[i == 0 ? 0 : i - 1], h = xs[i == n - 1 ? n - 1 : i + 1];
    BigReal x1 = h - gr * (h - l), x2 = l + gr * (h - l);
    BigReal f1 = dev(x1), f2 = dev(x2);
    for (int it = 0; it < 40; ++it) {
      if (f1 < f2) {
        l = x1;
        x1 = x2;
        f1 = f2;
        x2 = l + gr * (h - l);
        f2 = dev(x2);
      } else {
        h = x2;
        x2 = x1;
        f2 = f1;
        x1 = h - gr * (h - l);
        f1 = dev(x1);
      }
    }
    refined = max(refined, max(f1, f2));
  }
  BigReal e = max(last_stage_error, refined) + (refined - grid_max) * 2;
  if (!(e < 1)) {
    throw std::runtime_error("image interval of the partial composition reaches zero");
  }
  return ImageCertificate{SymmetricDomain(BigReal(1) - e, BigReal(1) + e), std::move(grid_max),
                          std::move(refined)};
}

ImageCertificate image_interval(const SignComposite& c, size_t prefix_len, int grid_points) {
  if (prefix_len > c.stages().size()) throw std::out_of_range("prefix longer than composite");
  if (prefix_len == 0) return image_interval({}, c.epsilon(), BigReal(0), grid_points);
  std::vector<Poly> prefix(c.stages().begin(),
                           c.stages().begin() + static_cast<long>(prefix_len));
  return image_interval(prefix, c.epsilon(), c.stage_errors()[prefix_len - 1], grid_points);
}

SignComposite build_sign_composite(const BigReal& epsilon, const std::vector<int>& degrees,
                                   const CompositeOptions& opts) {
  require_finite(epsilon, "epsilon");
  if (!(epsilon > 0) || !(epsilon < 1)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (degrees.empty()) throw std::invalid_argument("composite needs at least one degree");
  int top = 1;
  for (int d : degrees) {
    if (d < 1 || d % 2 == 0) throw std::invalid_argument("composite degrees must be odd and >= 1");
    top = std::max(top, d);
  }
  unsigned requested = opts.precision_bits != 0 ? opts.precision_bits : opts.remez.precision_bits;
  const unsigned bits = effective_precision_bits(top, requested);
  PrecisionGuard guard(bits);
  RemezOptions ro = opts.remez;
  ro.precision_bits = bits;

  BigReal eps = at_context_precision(epsilon);
  std::vector<Poly> stages;
  std::vector<SymmetricDomain> domains;
  std::vector<BigReal> errors, deviations;
  for (size_t i = 0; i < degrees.size(); ++i) {
    SymmetricDomain dom(eps, BigReal(1));
    if (i > 0) {
      ImageCertificate cert = image_interval(stages, eps, errors.back(), opts.image_grid);
      deviations.push_back(max(errors.back(), cert.refined_max));
      dom = cert.domain;
    }
    RemezResult r = remez_sign_odd(dom, degrees[i], ro);
    stages.push_back(std::move(r.poly));
    domains.push_back(std::move(dom));
    errors.push_back(std::move(r.minimax_error));
  }
  ImageCertificate last = image_interval(stages, eps, errors.back(), opts.image_grid);
  deviations.push_back(max(errors.back(), last.refined_max));
  return SignComposite(std::move(eps), std::move(stages), std::move(domains), std::move(errors),
                       std::move(deviations));
}

ClosenessReport certify_closeness(const SignComposite& c, double beta_target, size_t points) {
  if (points < 2) throw std::invalid_argument("closeness scan needs at least 2 points");
  ClosenessReport rep;
  rep.points = points;
  const long double eps = c.epsilon().to_long_double();
  const long double span = std::log(1.0L / eps);
  for (size_t i = 0; i < points; ++i) {
    long double x = i + 1 == points
                        ? 1.0L
                        : eps * std::exp(span * static_cast<long double>(i) / (points - 1));
    long double d = std::fabs(c(x) - 1.0L);
    if (d > rep.max_deviation || i == 0) {
      rep.max_deviation = d;
      rep.witness = x;
    }
  }
  rep.achieved_beta = rep.max_deviation > 0 ? -std::log2(rep.max_deviation)
                                            : std::numeric_limits<long double>::infinity();
  const long double bound = std::exp2(-static_cast<long double>(beta_target));
  rep.close = rep.max_deviation <= bound;
  return rep;
}

void write_coefficient_dump(std::ostream& out, const SignComposite& c) {
  out << "# compoly coefficient dump v1\n";
  out << "# epsilon " << c.epsilon().to_string(c.epsilon().round_trip_digits()) << "\n";
  for (size_t i = 0; i < c.stages().size(); ++i) {
    const Poly& p = c.stages()[i];
    Poly q = to_power_basis(p);
    const SymmetricDomain& dom = c.stage_domains()[i];
    out << "# domain " << dom.a.to_string(dom.a.round_trip_digits()) << " "
        << dom.b.to_string(dom.b.round_trip_digits()) << " interval "
        << p.hi().to_string(p.hi().round_trip_digits()) << " minimax_error "
        << c.stage_errors()[i].to_string(12) << "\n";
    out << "stage " << i + 1 << " degree " << q.degree() << "\n";
    for (const BigReal& v : q.coeffs()) out << v.to_string(v.round_trip_digits()) << "\n";
  }
}

std::vector<Poly> read_coefficient_dump(std::istream& in) {
  std::vector<Poly> out;
  std::string line;
  int lineno = 0;
  BigReal half_width(1);
  auto fail = [&](const std::string& why) {
    throw std::runtime_error("coefficient dump line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string key;
      ss >> key;
      if (key == "domain") {
        std::string a, b, tag, hw;
        ss >> a >> b >> tag >> hw;
        if (tag == "interval" && !hw.empty()) {
          try {
            half_width = BigReal(std::string_view(hw));
          } catch (const std::exception&) {
            fail("bad interval value '" + hw + "'");
          }
        }
      }
      continue;
    }
    std::istringstream ss(line);
    std::string w1, w2;
    int idx = 0, deg = -1;
    if (!(ss >> w1 >> idx >> w2 >> deg) || w1 != "stage" || w2 != "degree" || deg < 0) {
      fail("expected 'stage <i> degree <d>'");
    }
    if (idx != static_cast<int>(out.size()) + 1) fail("stage numbers must be consecutive from 1");
    std::vector<BigReal> coeffs;
    while (static_cast<int>(coeffs.size()) <= deg) {
      if (!std::getline(in, line)) fail("unexpected end of input inside stage");
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      try {
        coeffs.emplace_back(std::string_view(line));
      } catch (const std::exception&) {
        fail("malformed coefficient '" + line + "'");
      }
    }
    bool odd = true;
    for (size_t k = 0; k < coeffs.size(); k += 2) odd = odd && coeffs[k].is_zero();
    out.emplace_back(Basis::kPower, -half_width, half_width, std::move(coeffs),
                     odd ? Parity::kOdd : Parity::kNone);
    half_width = 1;
  }
  return out;
}

std::shared_ptr<const SignComposite> composite_for_alpha(int alpha) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const SignComposite>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(alpha);
    if (it != cache.end()) return it->second;
  }
  ApproxSpec spec = tabulated_spec(alpha);
  auto built = std::make_shared<const SignComposite>(
      build_sign_composite(spec.epsilon(), spec.degrees));
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(alpha, std::move(built)).first->second;
}

}  // namespace compoly
